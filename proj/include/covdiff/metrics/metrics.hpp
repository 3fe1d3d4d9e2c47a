// Evaluation metrics for one object/trajectory pair, each in two builds:
// a serial brute-force reference and an accelerated version (k-d tree or
// segment grid, OpenMP over independent outputs) that must agree with it.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "covdiff/geom/mesh.hpp"
#include "covdiff/geom/segment.hpp"
#include "covdiff/traj/trajectory.hpp"

namespace covdiff::metrics {

enum class Mode { naive, accelerated };

inline constexpr double kDefaultSprayRadius = 0.05;  // meters

struct ChamferResult {
    double sum = 0.0;   // bidirectional sum of squared nearest distances
    double mean = 0.0;  // sum / (|S1| + |S2|)
};

// Symmetric squared-distance Chamfer between two non-empty point sets.
ChamferResult chamfer(std::span<const geom::Vec3> s1, std::span<const geom::Vec3> s2,
                      Mode mode = Mode::accelerated);

// Spray segments: consecutive pose pairs within each stroke; stroke-to-stroke
// gaps produce no segment.
std::vector<geom::Segment> collect_segments(const traj::TrajectorySet& t);

// True iff some segment passes within r_spray (inclusive) of the face centroid.
bool face_covered(const geom::TriMesh& mesh, std::size_t face_index,
                  std::span<const geom::Segment> segments, double r_spray);

// Per-face covered flags, in face order.
std::vector<std::uint8_t> covered_faces(const geom::TriMesh& mesh,
                                        std::span<const geom::Segment> segments, double r_spray,
                                        Mode mode = Mode::accelerated);

// Fraction of faces covered by at least one segment. Empty trajectories
// yield 0.
double overlap_coverage(const geom::TriMesh& mesh, const traj::TrajectorySet& t,
                        double r_spray = kDefaultSprayRadius, Mode mode = Mode::accelerated);

// Fraction of total face area covered. Throws on zero total area.
double area_coverage(const geom::TriMesh& mesh, const traj::TrajectorySet& t,
                     double r_spray = kDefaultSprayRadius, Mode mode = Mode::accelerated);

// Mean squared third forward difference of position, per stroke, unit
// timestep. Strokes shorter than 4 poses contribute nothing; no valid
// window at all yields 0.
double smoothness(const traj::TrajectorySet& t);

struct MetricsReport {
    double pcd_sum = 0.0;
    double pcd_mean = 0.0;
    double coverage_overlap = 0.0;
    double coverage_area = 0.0;
    double smoothness = 0.0;
    double r_spray = kDefaultSprayRadius;
};

std::string to_json(const MetricsReport& r);
MetricsReport report_from_json(const std::string& text);

}  // namespace covdiff::metrics
