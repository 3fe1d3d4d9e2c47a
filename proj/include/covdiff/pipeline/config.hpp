#pragma once

#include <cstdint>
#include <string>

#include "covdiff/policy/model.hpp"

namespace covdiff::pipeline {

// Documented defaults are the full-scale recipe; the "desk" preset holds the
// small configuration the test suites run.
struct TrainConfig {
    double lr = 1e-4;
    std::size_t batch = 128;
    std::size_t epochs = 200;
    std::size_t diffusion_steps = 100;  // K
    std::size_t history_len = 4;        // poses of history, 6 dims each
    std::size_t horizon = 16;           // H poses per generated segment
    std::uint64_t seed = 0;
    double cond_dropout = 0.0;  // enable 0.1 to make guidance_scale != 1 meaningful
    policy::Conditioning conditioning = policy::Conditioning::previous;
    std::size_t cloud_points = 5120;
};

// Named presets: "paper" (the defaults above) and "desk" (batch 16, epochs 50).
void apply_preset(TrainConfig& cfg, const std::string& name);

// Plain-text `key = value` lines; '#' comments. Unknown keys are errors.
// A `preset` key applies first regardless of position.
TrainConfig parse_train_config(const std::string& text, const TrainConfig& base = {});
TrainConfig load_train_config_file(const std::string& path, const TrainConfig& base = {});

policy::PolicyConfig policy_config_from(const TrainConfig& cfg);

}  // namespace covdiff::pipeline
