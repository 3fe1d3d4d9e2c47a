// Condition encoders. The geometry encoder runs per-point MLP blocks
// (linear + ReLU + LayerNorm), max-pools over points into a global
// descriptor, and projects it through a final linear + LayerNorm. The state
// encoder is a plain two-layer MLP over the flattened pose history.
#pragma once

#include <memory>
#include <vector>

#include "covdiff/num/layers.hpp"

namespace covdiff::policy {

struct GeometryEncoderConfig {
    std::size_t in_dim = 3;
    std::vector<std::size_t> block_widths = {64, 128, 256};
    std::size_t out_dim = 64;
};

class GeometryEncoder {
public:
    GeometryEncoder(num::ParamStore& store, const GeometryEncoderConfig& cfg, num::Rng& init_rng);

    struct Cache {
        std::vector<num::LinearCache> lin;
        std::vector<num::ReluCache> relu;
        std::vector<num::LayerNormCache> ln;
        num::Mat features;               // [N x last width]
        std::vector<std::size_t> argmax;  // winning point per channel, lowest index on ties
        num::LinearCache proj_lin;
        num::LayerNormCache proj_ln;
    };

    // points: [N x 3], N >= 1. Returns the 64-dim embedding.
    std::vector<double> forward(const num::Mat& points, Cache* cache) const;

    // d_embedding: [1 x out_dim]; accumulates parameter gradients. Max-pool
    // routes gradient only to each channel's argmax point.
    void backward(const num::Mat& d_embedding, const Cache& cache);

    const GeometryEncoderConfig& config() const { return cfg_; }

private:
    GeometryEncoderConfig cfg_;
    std::vector<num::Linear> blocks_;
    std::vector<num::LayerNorm> norms_;
    std::unique_ptr<num::Linear> proj_;
    std::unique_ptr<num::LayerNorm> proj_norm_;
};

struct StateEncoderConfig {
    std::size_t in_dim = 24;
    std::size_t hidden = 128;
    std::size_t out_dim = 64;
};

class StateEncoder {
public:
    StateEncoder(num::ParamStore& store, const StateEncoderConfig& cfg, num::Rng& init_rng);

    struct Cache {
        num::LinearCache l1;
        num::ReluCache relu;
        num::LinearCache l2;
    };

    // x: [B x 24] -> [B x 64].
    num::Mat forward(const num::Mat& x, Cache* cache) const;
    void backward(const num::Mat& dy, const Cache& cache);

    const StateEncoderConfig& config() const { return cfg_; }

private:
    StateEncoderConfig cfg_;
    num::Linear l1_;
    num::Linear l2_;
};

// Channel-wise max over rows; ties keep the lowest row index.
num::Mat max_pool_rows(const num::Mat& features, std::vector<std::size_t>* argmax);
// Routes each channel's gradient to its winning row only.
num::Mat max_pool_rows_backward(const num::Mat& d_pooled, const std::vector<std::size_t>& argmax,
                                std::size_t n_rows);

// c = [geometry | state], geometry half first.
std::vector<double> fuse_condition(std::span<const double> geometry, std::span<const double> state);

// Elementwise gamma * x + beta.
std::vector<double> film(std::span<const double> x, std::span<const double> gamma,
                         std::span<const double> beta);

}  // namespace covdiff::policy
