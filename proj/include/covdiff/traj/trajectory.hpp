// 6-DoF pose sequences: strokes, per-object trajectory sets, padding and
// masking for fixed-horizon batches, and history flattening.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "covdiff/geom/mesh.hpp"
#include "covdiff/geom/vec3.hpp"

namespace covdiff::traj {

// Orientation is the unit tool-approach direction (not Euler angles).
struct Pose6 {
    geom::Vec3 position;     // meters
    geom::Vec3 orientation;  // unit vector
};

bool pose_equal(const Pose6& a, const Pose6& b, double tol);

struct Stroke {
    std::vector<Pose6> poses;  // index = timestep
};

struct TrajectorySet {
    std::vector<Stroke> strokes;  // execution order
    std::string object_id;
    geom::NormalizeTransform transform;  // object normalization used for training
};

std::size_t total_pose_count(const TrajectorySet& t);

// Appends segments in order; a segment whose first pose equals the previous
// segment's last pose within 1e-9 on all six components drops the duplicate.
Stroke concat_segments(const std::vector<Stroke>& segments);

inline constexpr double kConcatDedupTol = 1e-9;

struct PaddedBatch {
    std::size_t batch = 0;
    std::size_t horizon = 0;
    std::vector<double> x;        // [B x H x 6], zeros under mask 0
    std::vector<std::uint8_t> mask;  // [B x H], prefix-1 rows
};

// Right-pads every stroke with zeros to horizon H. Throws naming the stroke
// if one is longer than H.
PaddedBatch pad_and_mask(const std::vector<Stroke>& strokes, std::size_t horizon);

// Inverse of pad_and_mask for one row.
Stroke unpad(const PaddedBatch& batch, std::size_t row);

// Last m poses flattened oldest-first into a 6m-vector; shorter histories
// are left-padded with zero poses, an empty history is all zeros.
std::vector<double> last_m_flat(const Stroke& history, std::size_t m = 4);

// Positions map to (p - offset)/scale; orientations are untouched.
TrajectorySet normalize_traj(const TrajectorySet& t, double scale, geom::Vec3 offset);
TrajectorySet denormalize_traj(const TrajectorySet& t, double scale, geom::Vec3 offset);

// All positions of all strokes in execution order.
std::vector<geom::Vec3> all_positions(const TrajectorySet& t);

}  // namespace covdiff::traj
