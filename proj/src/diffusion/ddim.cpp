#include "covdiff/diffusion/ddim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace covdiff::diffusion {

namespace {

void check_k(std::size_t k, const NoiseSchedule& s, bool allow_zero) {
    std::size_t lo = allow_zero ? 0 : 1;
    if (k < lo || k > s.K)
        throw std::invalid_argument("diffusion step k=" + std::to_string(k) + " out of range [" +
                                    std::to_string(lo) + "," + std::to_string(s.K) + "]");
}

}  // namespace

std::vector<double> q_sample(std::span<const double> x0, std::size_t k,
                             std::span<const double> eps, const NoiseSchedule& schedule) {
    check_k(k, schedule, /*allow_zero=*/true);
    if (x0.size() != eps.size()) throw std::invalid_argument("q_sample: x0/eps size mismatch");
    double ab = schedule.alpha_bar[k];
    double cs = std::sqrt(ab);
    double cn = std::sqrt(1.0 - ab);
    std::vector<double> out(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) out[i] = cs * x0[i] + cn * eps[i];
    return out;
}

double masked_noise_loss(std::span<const double> eps_hat, std::span<const double> eps,
                         std::span<const std::uint8_t> mask) {
    if (eps_hat.size() != eps.size()) throw std::invalid_argument("masked_noise_loss: size mismatch");
    if (mask.size() * 6 != eps.size())
        throw std::invalid_argument("masked_noise_loss: mask covers " + std::to_string(mask.size()) +
                                    " timesteps for " + std::to_string(eps.size()) + " entries");
    std::size_t m = 0;
    double sum = 0.0;
    for (std::size_t t = 0; t < mask.size(); ++t) {
        if (!mask[t]) continue;
        m += 6;
        for (std::size_t d = 0; d < 6; ++d) {
            double e = eps_hat[t * 6 + d] - eps[t * 6 + d];
            sum += e * e;
        }
    }
    if (m == 0) throw std::invalid_argument("masked_noise_loss: mask selects no entries");
    return sum / static_cast<double>(m);
}

std::vector<double> masked_noise_loss_grad(std::span<const double> eps_hat,
                                           std::span<const double> eps,
                                           std::span<const std::uint8_t> mask) {
    if (eps_hat.size() != eps.size()) throw std::invalid_argument("masked_noise_loss_grad: size mismatch");
    std::size_t m = 0;
    for (auto f : mask) m += f ? 6 : 0;
    if (m == 0) throw std::invalid_argument("masked_noise_loss_grad: mask selects no entries");
    std::vector<double> g(eps_hat.size(), 0.0);
    for (std::size_t t = 0; t < mask.size(); ++t) {
        if (!mask[t]) continue;
        for (std::size_t d = 0; d < 6; ++d) {
            std::size_t i = t * 6 + d;
            g[i] = 2.0 * (eps_hat[i] - eps[i]) / static_cast<double>(m);
        }
    }
    return g;
}

std::vector<double> ddim_step(std::span<const double> x_k, std::span<const double> eps_hat,
                              std::size_t k, const NoiseSchedule& schedule, double eta,
                              std::span<const double> noise) {
    check_k(k, schedule, /*allow_zero=*/false);
    if (x_k.size() != eps_hat.size()) throw std::invalid_argument("ddim_step: x/eps size mismatch");
    const double ab = schedule.alpha_bar[k];
    const double ab_prev = schedule.alpha_bar[k - 1];
    double sigma = 0.0;
    if (eta != 0.0) {
        sigma = eta * std::sqrt((1.0 - ab_prev) / (1.0 - ab)) * std::sqrt(1.0 - ab / ab_prev);
        if (noise.size() != x_k.size())
            throw std::invalid_argument("ddim_step: eta != 0 requires one noise draw per entry");
    }
    const double scale = std::sqrt(ab_prev / ab);
    const double eps_coef = scale * std::sqrt(1.0 - ab) - std::sqrt(1.0 - ab_prev - sigma * sigma);
    std::vector<double> out(x_k.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = scale * x_k[i] - eps_coef * eps_hat[i];
        if (sigma != 0.0) out[i] += sigma * noise[i];
    }
    return out;
}

std::vector<double> sample(const DenoiseFn& denoiser, std::span<const double> condition,
                           std::size_t horizon, const NoiseSchedule& schedule, num::Rng& rng,
                           const SampleOptions& opts) {
    std::vector<double> x = rng.gaussian_vec(horizon * 6);
    const std::vector<double> c_null(condition.size(), 0.0);
    for (std::size_t k = schedule.K; k >= 1; --k) {
        std::vector<double> eps_hat = denoiser(x, k, condition);
        if (opts.guidance_scale != 1.0) {
            std::vector<double> eps_null = denoiser(x, k, c_null);
            for (std::size_t i = 0; i < eps_hat.size(); ++i)
                eps_hat[i] = eps_null[i] + opts.guidance_scale * (eps_hat[i] - eps_null[i]);
        }
        if (opts.clip_x0 > 0.0) {
            const double ab = schedule.alpha_bar[k];
            const double cs = std::sqrt(ab), cn = std::sqrt(1.0 - ab);
            for (std::size_t i = 0; i < eps_hat.size(); ++i) {
                double x0 = (x[i] - cn * eps_hat[i]) / cs;
                x0 = std::clamp(x0, -opts.clip_x0, opts.clip_x0);
                eps_hat[i] = (x[i] - cs * x0) / cn;
            }
        }
        std::vector<double> noise;
        if (opts.eta != 0.0) noise = rng.gaussian_vec(x.size());
        x = ddim_step(x, eps_hat, k, schedule, opts.eta, noise);
        for (double v : x)
            if (!std::isfinite(v))
                throw std::runtime_error("sample: non-finite value at step k=" + std::to_string(k));
    }
    return x;
}

}  // namespace covdiff::diffusion
