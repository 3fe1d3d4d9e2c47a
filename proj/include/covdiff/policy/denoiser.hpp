// Residual MLP noise predictor over the flattened [H x 6] trajectory.
// Each residual block is linear -> FiLM -> ReLU -> linear -> skip add; the
// FiLM scale/bias pairs are predicted per block from the sinusoidal timestep
// embedding concatenated with the global condition vector.
#pragma once

#include <vector>

#include "covdiff/num/layers.hpp"

namespace covdiff::policy {

struct DenoiserConfig {
    std::size_t horizon = 16;  // H poses per generated segment
    std::size_t cond_dim = 128;
    std::size_t hidden = 256;
    std::size_t blocks = 4;
    std::size_t time_dim = 64;
};

// Standard sinusoidal embedding of the diffusion step (sin half then cos half).
std::vector<double> timestep_embedding(std::size_t k, std::size_t dim);

class FilmDenoiser {
public:
    FilmDenoiser(num::ParamStore& store, const DenoiserConfig& cfg, num::Rng& init_rng);

    struct BlockCache {
        num::LinearCache a_lin;
        num::Mat a;      // pre-FiLM activations
        num::Mat gamma;  // per-row scales
        num::LinearCache film_lin;
        num::ReluCache relu;
        num::LinearCache b_lin;
    };

    struct Cache {
        num::Mat film_in;  // [B x (time_dim + cond_dim)]
        num::LinearCache in_lin;
        std::vector<BlockCache> blocks;
        num::LinearCache out_lin;
    };

    // x: [B x H*6], k: one diffusion step per row, cond: [B x cond_dim].
    num::Mat forward(const num::Mat& x, std::span<const std::size_t> k, const num::Mat& cond,
                     Cache* cache) const;

    // Accumulates parameter gradients; returns d(condition) [B x cond_dim].
    num::Mat backward(const num::Mat& d_eps, const Cache& cache);

    const DenoiserConfig& config() const { return cfg_; }

private:
    DenoiserConfig cfg_;
    num::Linear in_;
    std::vector<num::Linear> lin_a_;
    std::vector<num::Linear> lin_film_;
    std::vector<num::Linear> lin_b_;
    num::Linear out_;
};

}  // namespace covdiff::policy
