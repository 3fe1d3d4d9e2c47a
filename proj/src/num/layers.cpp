#include "covdiff/num/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace covdiff::num {

Mat linear_forward(const Mat& w, std::span<const double> b, const Mat& x, LinearCache* cache) {
    if (x.cols != w.cols)
        throw std::invalid_argument("linear_forward: input " + x.shape_str() + " vs weight " + w.shape_str());
    if (b.size() != w.rows)
        throw std::invalid_argument("linear_forward: bias length " + std::to_string(b.size()) + " vs weight " + w.shape_str());
    Mat y = matmul_xwt(x, w);
    add_row_inplace(y, b);
    if (cache) cache->x = x;
    return y;
}

Mat linear_backward(const Mat& w, const Mat& dy, const LinearCache& cache, Mat& dw, Mat& db) {
    if (dy.cols != w.rows)
        throw std::invalid_argument("linear_backward: dy " + dy.shape_str() + " vs weight " + w.shape_str());
    accumulate_dw(dy, cache.x, dw);
    for (std::size_t r = 0; r < dy.rows; ++r)
        for (std::size_t c = 0; c < dy.cols; ++c) db.data[c] += dy.at(r, c);
    return matmul_xw(dy, w);
}

Mat relu_forward(const Mat& x, ReluCache* cache) {
    Mat y = x;
    for (auto& v : y.data) v = v > 0.0 ? v : 0.0;
    if (cache) cache->x = x;
    return y;
}

Mat relu_backward(const ReluCache& cache, const Mat& dy) {
    check_same_shape(cache.x, dy, "relu_backward");
    Mat dx = dy;
    for (std::size_t i = 0; i < dx.data.size(); ++i)
        if (cache.x.data[i] <= 0.0) dx.data[i] = 0.0;
    return dx;
}

Mat layernorm_forward(const Mat& x, std::span<const double> gain, std::span<const double> bias,
                      double eps, LayerNormCache* cache) {
    const std::size_t d = x.cols;
    if (d < 2) throw std::invalid_argument("layernorm_forward: dimension " + std::to_string(d) + " < 2");
    if (gain.size() != d || bias.size() != d)
        throw std::invalid_argument("layernorm_forward: gain/bias length vs " + x.shape_str());
    Mat y(x.rows, d);
    Mat xhat(x.rows, d);
    std::vector<double> inv_std(x.rows);
#pragma omp parallel for schedule(static)
    for (long long r = 0; r < static_cast<long long>(x.rows); ++r) {
        const double* xr = x.data.data() + r * d;
        double mean = 0.0;
        for (std::size_t c = 0; c < d; ++c) mean += xr[c];
        mean /= static_cast<double>(d);
        double var = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            double dv = xr[c] - mean;
            var += dv * dv;
        }
        var /= static_cast<double>(d);
        double is = 1.0 / std::sqrt(var + eps);
        inv_std[r] = is;
        double* hr = xhat.data.data() + r * d;
        double* yr = y.data.data() + r * d;
        for (std::size_t c = 0; c < d; ++c) {
            hr[c] = (xr[c] - mean) * is;
            yr[c] = gain[c] * hr[c] + bias[c];
        }
    }
    if (cache) {
        cache->xhat = std::move(xhat);
        cache->inv_std = std::move(inv_std);
    }
    return y;
}

Mat layernorm_backward(const LayerNormCache& cache, std::span<const double> gain, const Mat& dy,
                       Mat& dgain, Mat& dbias) {
    const Mat& xhat = cache.xhat;
    check_same_shape(xhat, dy, "layernorm_backward");
    const std::size_t d = dy.cols;
    Mat dx(dy.rows, d);
#pragma omp parallel for schedule(static)
    for (long long r = 0; r < static_cast<long long>(dy.rows); ++r) {
        const double* dyr = dy.data.data() + r * d;
        const double* hr = xhat.data.data() + r * d;
        double* dxr = dx.data.data() + r * d;
        double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            double dxhat = dyr[c] * gain[c];
            sum_dxhat += dxhat;
            sum_dxhat_xhat += dxhat * hr[c];
        }
        const double inv_d = 1.0 / static_cast<double>(d);
        for (std::size_t c = 0; c < d; ++c) {
            double dxhat = dyr[c] * gain[c];
            dxr[c] = cache.inv_std[r] * (dxhat - sum_dxhat * inv_d - hr[c] * sum_dxhat_xhat * inv_d);
        }
    }
    // Parameter grads reduce over rows in row order.
    for (std::size_t r = 0; r < dy.rows; ++r)
        for (std::size_t c = 0; c < d; ++c) {
            dgain.data[c] += dy.at(r, c) * xhat.at(r, c);
            dbias.data[c] += dy.at(r, c);
        }
    return dx;
}

std::vector<double> layernorm_forward_vec(std::span<const double> x, std::span<const double> gain,
                                          std::span<const double> bias, double eps) {
    Mat m(1, x.size());
    std::copy(x.begin(), x.end(), m.data.begin());
    Mat y = layernorm_forward(m, gain, bias, eps, nullptr);
    return y.data;
}

Linear::Linear(ParamStore& store, const std::string& name, std::size_t in, std::size_t out, Rng& init_rng) {
    w_ = &store.add(name + ".w", out, in);
    b_ = &store.add(name + ".b", 1, out);
    init_uniform_fan_in(*w_, in, init_rng);
}

Mat Linear::forward(const Mat& x, LinearCache* cache) const {
    if (x.cols != w_->value.cols)
        throw std::invalid_argument("Linear::forward: input " + x.shape_str() + " vs weight " + w_->value.shape_str());
    Mat y = matmul_xwt(x, w_->value);
    add_row_inplace(y, std::span<const double>(b_->value.data));
    if (cache) cache->x = x;
    return y;
}

Mat Linear::backward(const Mat& dy, const LinearCache& cache) {
    return linear_backward(w_->value, dy, cache, w_->grad, b_->grad);
}

LayerNorm::LayerNorm(ParamStore& store, const std::string& name, std::size_t dim) {
    gain_ = &store.add(name + ".gain", 1, dim);
    bias_ = &store.add(name + ".bias", 1, dim);
    gain_->value.fill(1.0);
}

Mat LayerNorm::forward(const Mat& x, LayerNormCache* cache) const {
    return layernorm_forward(x, std::span<const double>(gain_->value.data),
                             std::span<const double>(bias_->value.data), kLayerNormEps, cache);
}

Mat LayerNorm::backward(const Mat& dy, const LayerNormCache& cache) {
    return layernorm_backward(cache, std::span<const double>(gain_->value.data), dy, gain_->grad, bias_->grad);
}

}  // namespace covdiff::num
