#include "covdiff/policy/encoders.hpp"

#include <stdexcept>

namespace covdiff::policy {

using num::Mat;

GeometryEncoder::GeometryEncoder(num::ParamStore& store, const GeometryEncoderConfig& cfg,
                                 num::Rng& init_rng)
    : cfg_(cfg) {
    if (cfg.block_widths.empty()) throw std::invalid_argument("GeometryEncoder: no block widths");
    std::size_t in = cfg.in_dim;
    for (std::size_t i = 0; i < cfg.block_widths.size(); ++i) {
        std::string name = "geo.block" + std::to_string(i + 1);
        blocks_.emplace_back(store, name, in, cfg.block_widths[i], init_rng);
        norms_.emplace_back(store, name + ".ln", cfg.block_widths[i]);
        in = cfg.block_widths[i];
    }
    proj_ = std::make_unique<num::Linear>(store, "geo.proj", in, cfg.out_dim, init_rng);
    proj_norm_ = std::make_unique<num::LayerNorm>(store, "geo.proj_ln", cfg.out_dim);
}

std::vector<double> GeometryEncoder::forward(const Mat& points, Cache* cache) const {
    if (points.rows == 0) throw std::invalid_argument("GeometryEncoder: empty point cloud");
    if (points.cols != cfg_.in_dim)
        throw std::invalid_argument("GeometryEncoder: points " + points.shape_str() + ", expected cols " +
                                    std::to_string(cfg_.in_dim));
    if (cache) {
        cache->lin.resize(blocks_.size());
        cache->relu.resize(blocks_.size());
        cache->ln.resize(blocks_.size());
    }
    Mat h = points;
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        h = blocks_[i].forward(h, cache ? &cache->lin[i] : nullptr);
        h = num::relu_forward(h, cache ? &cache->relu[i] : nullptr);
        h = norms_[i].forward(h, cache ? &cache->ln[i] : nullptr);
    }
    std::vector<std::size_t> argmax;
    Mat pooled = max_pool_rows(h, &argmax);
    if (cache) {
        cache->features = std::move(h);
        cache->argmax = std::move(argmax);
    }
    Mat proj = proj_->forward(pooled, cache ? &cache->proj_lin : nullptr);
    Mat out = proj_norm_->forward(proj, cache ? &cache->proj_ln : nullptr);
    return out.data;
}

void GeometryEncoder::backward(const Mat& d_embedding, const Cache& cache) {
    Mat d = proj_norm_->backward(d_embedding, cache.proj_ln);
    d = proj_->backward(d, cache.proj_lin);
    Mat dh = max_pool_rows_backward(d, cache.argmax, cache.features.rows);
    for (std::size_t i = blocks_.size(); i-- > 0;) {
        dh = norms_[i].backward(dh, cache.ln[i]);
        dh = num::relu_backward(cache.relu[i], dh);
        dh = blocks_[i].backward(dh, cache.lin[i]);
    }
}

StateEncoder::StateEncoder(num::ParamStore& store, const StateEncoderConfig& cfg, num::Rng& init_rng)
    : cfg_(cfg),
      l1_(store, "state.l1", cfg.in_dim, cfg.hidden, init_rng),
      l2_(store, "state.l2", cfg.hidden, cfg.out_dim, init_rng) {}

Mat StateEncoder::forward(const Mat& x, Cache* cache) const {
    if (x.cols != cfg_.in_dim)
        throw std::invalid_argument("StateEncoder: input " + x.shape_str() + ", expected cols " +
                                    std::to_string(cfg_.in_dim));
    Mat h = l1_.forward(x, cache ? &cache->l1 : nullptr);
    h = num::relu_forward(h, cache ? &cache->relu : nullptr);
    return l2_.forward(h, cache ? &cache->l2 : nullptr);
}

void StateEncoder::backward(const Mat& dy, const Cache& cache) {
    Mat d = l2_.backward(dy, cache.l2);
    d = num::relu_backward(cache.relu, d);
    l1_.backward(d, cache.l1);
}

Mat max_pool_rows(const Mat& features, std::vector<std::size_t>* argmax) {
    if (features.rows == 0) throw std::invalid_argument("max_pool_rows: no rows");
    const std::size_t n = features.rows, d = features.cols;
    Mat pooled(1, d);
    std::vector<std::size_t> win(d, 0);
    for (std::size_t c = 0; c < d; ++c) {
        double best = features.at(0, c);
        std::size_t best_r = 0;
        for (std::size_t r = 1; r < n; ++r)
            if (features.at(r, c) > best) {  // strict: ties keep the lowest row
                best = features.at(r, c);
                best_r = r;
            }
        pooled.at(0, c) = best;
        win[c] = best_r;
    }
    if (argmax) *argmax = std::move(win);
    return pooled;
}

Mat max_pool_rows_backward(const Mat& d_pooled, const std::vector<std::size_t>& argmax,
                           std::size_t n_rows) {
    if (d_pooled.rows != 1 || argmax.size() != d_pooled.cols)
        throw std::invalid_argument("max_pool_rows_backward: argmax/gradient mismatch");
    Mat dh(n_rows, d_pooled.cols);
    for (std::size_t c = 0; c < dh.cols; ++c) dh.at(argmax[c], c) = d_pooled.at(0, c);
    return dh;
}

std::vector<double> fuse_condition(std::span<const double> geometry, std::span<const double> state) {
    if (geometry.size() != state.size())
        throw std::invalid_argument("fuse_condition: halves differ, " + std::to_string(geometry.size()) +
                                    " vs " + std::to_string(state.size()));
    std::vector<double> c;
    c.reserve(geometry.size() + state.size());
    c.insert(c.end(), geometry.begin(), geometry.end());
    c.insert(c.end(), state.begin(), state.end());
    return c;
}

std::vector<double> film(std::span<const double> x, std::span<const double> gamma,
                         std::span<const double> beta) {
    if (x.size() != gamma.size() || x.size() != beta.size())
        throw std::invalid_argument("film: length mismatch");
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = gamma[i] * x[i] + beta[i];
    return y;
}

}  // namespace covdiff::policy
