#pragma once

#include <cstddef>
#include <vector>

namespace covdiff::diffusion {

// Cumulative signal coefficients for K diffusion steps. Index 0 is clean
// data (alpha_bar[0] == 1 exactly); values are strictly decreasing in (0, 1].
struct NoiseSchedule {
    std::size_t K = 0;
    std::vector<double> alpha_bar;  // K + 1 entries
};

// Squared-cosine schedule: f(k) = cos^2(((k/K + s)/(1 + s)) * pi/2) with
// s = 0.008, alpha_bar_k = f(k)/f(0), and the per-step ratio
// alpha_bar_k / alpha_bar_{k-1} floored at 0.001.
NoiseSchedule cosine_schedule(std::size_t K);

inline constexpr double kCosineScheduleShift = 0.008;
inline constexpr double kStepRatioFloor = 0.001;

}  // namespace covdiff::diffusion
