// Forward/backward pairs for the three layer kinds the policy uses.
// Each forward fills a cache, each backward consumes exactly one cache from
// the matching forward. Batched variants treat every matrix row as one
// independent sample.
#pragma once

#include <span>
#include <vector>

#include "covdiff/num/mat.hpp"
#include "covdiff/num/tensor.hpp"

namespace covdiff::num {

struct LinearCache {
    Mat x;  // forward input [B x in]
};

// y = x * W^T + b. W: [out x in], b: length out, x: [B x in].
Mat linear_forward(const Mat& w, std::span<const double> b, const Mat& x, LinearCache* cache);

// Returns dx; accumulates into dw [out x in] and db [1 x out].
Mat linear_backward(const Mat& w, const Mat& dy, const LinearCache& cache, Mat& dw, Mat& db);

struct ReluCache {
    Mat x;
};

Mat relu_forward(const Mat& x, ReluCache* cache);
// dx_i = dy_i where x_i > 0, else 0 (subgradient 0 at exactly 0).
Mat relu_backward(const ReluCache& cache, const Mat& dy);

struct LayerNormCache {
    Mat xhat;                     // normalized pre-affine values
    std::vector<double> inv_std;  // per row
};

inline constexpr double kLayerNormEps = 1e-5;

// Per-row layer norm with 1/d variance: y = gain * (x - mean)/sqrt(var + eps) + bias.
// Requires d >= 2.
Mat layernorm_forward(const Mat& x, std::span<const double> gain, std::span<const double> bias,
                      double eps, LayerNormCache* cache);

Mat layernorm_backward(const LayerNormCache& cache, std::span<const double> gain, const Mat& dy,
                       Mat& dgain, Mat& dbias);

// Vector convenience forms matching the single-sample contracts.
std::vector<double> layernorm_forward_vec(std::span<const double> x, std::span<const double> gain,
                                          std::span<const double> bias, double eps = kLayerNormEps);

// A linear layer bound to store tensors.
class Linear {
public:
    Linear(ParamStore& store, const std::string& name, std::size_t in, std::size_t out, Rng& init_rng);

    Mat forward(const Mat& x, LinearCache* cache) const;
    Mat backward(const Mat& dy, const LinearCache& cache);

    std::size_t in_dim() const { return w_->value.cols; }
    std::size_t out_dim() const { return w_->value.rows; }
    Tensor& weight() { return *w_; }
    Tensor& bias() { return *b_; }

private:
    Tensor* w_;  // [out x in]
    Tensor* b_;  // [1 x out]
};

// Layer norm gain/bias bound to store tensors (gain init 1, bias init 0).
class LayerNorm {
public:
    LayerNorm(ParamStore& store, const std::string& name, std::size_t dim);

    Mat forward(const Mat& x, LayerNormCache* cache) const;
    Mat backward(const Mat& dy, const LayerNormCache& cache);

    std::size_t dim() const { return gain_->value.cols; }

private:
    Tensor* gain_;
    Tensor* bias_;
};

}  // namespace covdiff::num
