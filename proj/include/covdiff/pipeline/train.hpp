#pragma once

#include <functional>
#include <span>
#include <string>

#include "covdiff/diffusion/schedule.hpp"
#include "covdiff/pipeline/config.hpp"
#include "covdiff/pipeline/dataset.hpp"

namespace covdiff::pipeline {

// One supervision window: a horizon-length slice of the ground-truth pose
// sequence with the poses that precede it as history.
struct Window {
    std::vector<double> x0;          // [H*6], zero-padded
    std::vector<std::uint8_t> mask;  // [H]
    std::vector<double> history;     // [6*m], zero-left-padded
};

// Windows tile the concatenated execution-order pose sequence; the history
// of window w is the m poses immediately before it, so chained inference
// episodes see exactly the conditions training saw.
std::vector<Window> extract_windows(const traj::TrajectorySet& normalized, std::size_t horizon,
                                    std::size_t history_len);

struct TrainHooks {
    std::function<void(std::size_t epoch, double loss)> on_epoch;
    // Manifest sample index of every item in the batch, in batch order.
    std::function<void(std::span<const std::size_t> sample_indices)> on_batch;
    std::function<void(std::size_t item, bool dropped)> on_condition_dropout;
};

struct TrainResult {
    std::string checkpoint_path;
    std::string loss_curve_path;
    std::vector<double> epoch_losses;
};

// Trains on the manifest's train split and writes ckpt.bin plus
// loss_curve.csv under out_dir.
TrainResult train(const DatasetManifest& manifest, const TrainConfig& cfg,
                  const std::string& out_dir, const TrainHooks& hooks = {});

// Deterministic stream splitting for the pipeline's seeded stages.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace covdiff::pipeline
