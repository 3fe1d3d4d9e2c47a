#include "covdiff/diffusion/schedule.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace covdiff::diffusion {

namespace {

double cosine_f(double k, double K) {
    double arg = ((k / K + kCosineScheduleShift) / (1.0 + kCosineScheduleShift)) * std::numbers::pi / 2.0;
    double c = std::cos(arg);
    return c * c;
}

}  // namespace

NoiseSchedule cosine_schedule(std::size_t K) {
    if (K < 1) throw std::invalid_argument("cosine_schedule: K must be >= 1");
    NoiseSchedule s;
    s.K = K;
    s.alpha_bar.resize(K + 1);
    s.alpha_bar[0] = 1.0;
    const double f0 = cosine_f(0.0, static_cast<double>(K));
    double prev_raw = 1.0;
    for (std::size_t k = 1; k <= K; ++k) {
        double raw = cosine_f(static_cast<double>(k), static_cast<double>(K)) / f0;
        double ratio = std::max(raw / prev_raw, kStepRatioFloor);
        s.alpha_bar[k] = s.alpha_bar[k - 1] * ratio;
        prev_raw = raw;
    }
    return s;
}

}  // namespace covdiff::diffusion
