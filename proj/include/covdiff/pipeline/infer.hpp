#pragma once

#include <functional>
#include <span>
#include <string>

#include "covdiff/geom/mesh.hpp"
#include "covdiff/pipeline/dataset.hpp"
#include "covdiff/policy/model.hpp"

namespace covdiff::pipeline {

struct InferOptions {
    std::size_t episodes = 1;
    std::uint64_t seed = 0;
    double guidance_scale = 1.0;
    double eta = 0.0;
    std::size_t cloud_points = 5120;
    // Positions are normalized to the unit box and orientations are unit
    // vectors, so 1.5 bounds any legitimate clean sample.
    double clip_x0 = 1.5;
};

struct InferHooks {
    // History vector handed to each episode (1-based), before encoding.
    std::function<void(std::size_t episode, std::span<const double> history)> on_episode;
};

// Autoregressive generation: episode 1 is conditioned on zero history, each
// later episode on the previous segment's tail. Segments are concatenated
// into a single stroke, positions denormalized to object scale and
// orientations renormalized to unit length.
traj::TrajectorySet infer(const geom::TriMesh& world_mesh, const std::string& object_id,
                          const policy::Policy& policy, const InferOptions& opts,
                          const InferHooks& hooks = {});

// Episode count that tiles a ground-truth trajectory: ceil(pose count / H).
std::size_t default_episode_count(const traj::TrajectorySet& gt, std::size_t horizon);

}  // namespace covdiff::pipeline
