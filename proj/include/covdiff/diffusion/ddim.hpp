// Forward corruption, the masked noise objective, and the DDIM reverse
// update. Trajectories travel through here as flat row-major [H x 6] arrays.
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "covdiff/diffusion/schedule.hpp"
#include "covdiff/num/rng.hpp"

namespace covdiff::diffusion {

// x_k = sqrt(abar_k) x0 + sqrt(1 - abar_k) eps. k = 0 returns x0 unchanged.
std::vector<double> q_sample(std::span<const double> x0, std::size_t k,
                             std::span<const double> eps, const NoiseSchedule& schedule);

// Mean over masked (timestep, dim) entries of the squared prediction error.
// mask has one flag per timestep, broadcast over the 6 pose dims; it must
// select at least one timestep.
double masked_noise_loss(std::span<const double> eps_hat, std::span<const double> eps,
                         std::span<const std::uint8_t> mask);

// d(loss)/d(eps_hat): 2 (eps_hat - eps) / |M| on masked entries, 0 elsewhere.
std::vector<double> masked_noise_loss_grad(std::span<const double> eps_hat,
                                           std::span<const double> eps,
                                           std::span<const std::uint8_t> mask);

// One reverse step k -> k-1. With eta = 0 the step is deterministic and
// `noise` is ignored; otherwise noise must hold one standard normal draw per
// entry.
std::vector<double> ddim_step(std::span<const double> x_k, std::span<const double> eps_hat,
                              std::size_t k, const NoiseSchedule& schedule, double eta = 0.0,
                              std::span<const double> noise = {});

// eps_hat = f(x, k, condition); the condition span is owned by the caller.
using DenoiseFn =
    std::function<std::vector<double>(std::span<const double> x, std::size_t k,
                                      std::span<const double> condition)>;

struct SampleOptions {
    double eta = 0.0;
    double guidance_scale = 1.0;  // s != 1 blends with a zero-condition pass
    // When > 0, the implied clean-sample estimate x0 = (x - sqrt(1-abar) e)
    // / sqrt(abar) is clamped to [-clip_x0, clip_x0] and the noise estimate
    // re-derived before each reverse step. The floored schedule tail
    // amplifies prediction error ~30x per step without this; generation on
    // normalized data should enable it.
    double clip_x0 = 0.0;
};

// Full reverse process: x_K ~ N(0, I) drawn from rng, then K ddim steps.
// Throws (naming the step) if an intermediate goes non-finite.
std::vector<double> sample(const DenoiseFn& denoiser, std::span<const double> condition,
                           std::size_t horizon, const NoiseSchedule& schedule, num::Rng& rng,
                           const SampleOptions& opts = {});

}  // namespace covdiff::diffusion
