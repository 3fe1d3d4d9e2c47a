#include "covdiff/policy/denoiser.hpp"

#include <cmath>
#include <stdexcept>

namespace covdiff::policy {

using num::Mat;

std::vector<double> timestep_embedding(std::size_t k, std::size_t dim) {
    if (dim < 2 || dim % 2 != 0) throw std::invalid_argument("timestep_embedding: dim must be even, >= 2");
    const std::size_t half = dim / 2;
    const double scale = std::log(10000.0) / static_cast<double>(half - 1);
    std::vector<double> emb(dim);
    for (std::size_t i = 0; i < half; ++i) {
        double arg = static_cast<double>(k) * std::exp(-scale * static_cast<double>(i));
        emb[i] = std::sin(arg);
        emb[half + i] = std::cos(arg);
    }
    return emb;
}

FilmDenoiser::FilmDenoiser(num::ParamStore& store, const DenoiserConfig& cfg, num::Rng& init_rng)
    : cfg_(cfg),
      in_(store, "den.in", cfg.horizon * 6, cfg.hidden, init_rng),
      out_(store, "den.out", cfg.hidden, cfg.horizon * 6, init_rng) {
    const std::size_t film_in = cfg.time_dim + cfg.cond_dim;
    for (std::size_t r = 0; r < cfg.blocks; ++r) {
        std::string name = "den.block" + std::to_string(r + 1);
        lin_a_.emplace_back(store, name + ".a", cfg.hidden, cfg.hidden, init_rng);
        lin_film_.emplace_back(store, name + ".film", film_in, 2 * cfg.hidden, init_rng);
        lin_b_.emplace_back(store, name + ".b", cfg.hidden, cfg.hidden, init_rng);
    }
}

Mat FilmDenoiser::forward(const Mat& x, std::span<const std::size_t> k, const Mat& cond,
                          Cache* cache) const {
    const std::size_t B = x.rows;
    if (x.cols != cfg_.horizon * 6)
        throw std::invalid_argument("FilmDenoiser: input " + x.shape_str() + ", expected cols " +
                                    std::to_string(cfg_.horizon * 6));
    if (k.size() != B) throw std::invalid_argument("FilmDenoiser: one step per row required");
    if (cond.rows != B || cond.cols != cfg_.cond_dim)
        throw std::invalid_argument("FilmDenoiser: condition " + cond.shape_str() + ", expected [" +
                                    std::to_string(B) + "x" + std::to_string(cfg_.cond_dim) + "]");

    Mat film_in(B, cfg_.time_dim + cfg_.cond_dim);
    for (std::size_t b = 0; b < B; ++b) {
        auto emb = timestep_embedding(k[b], cfg_.time_dim);
        double* row = film_in.data.data() + b * film_in.cols;
        std::copy(emb.begin(), emb.end(), row);
        std::copy(cond.row(b).begin(), cond.row(b).end(), row + cfg_.time_dim);
    }

    if (cache) {
        cache->film_in = film_in;
        cache->blocks.resize(cfg_.blocks);
    }
    Mat h = in_.forward(x, cache ? &cache->in_lin : nullptr);
    const std::size_t d = cfg_.hidden;
    for (std::size_t r = 0; r < cfg_.blocks; ++r) {
        BlockCache* bc = cache ? &cache->blocks[r] : nullptr;
        Mat a = lin_a_[r].forward(h, bc ? &bc->a_lin : nullptr);
        Mat fg = lin_film_[r].forward(film_in, bc ? &bc->film_lin : nullptr);
        Mat gamma(B, d), f(B, d);
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t c = 0; c < d; ++c) {
                gamma.at(b, c) = fg.at(b, c);
                f.at(b, c) = fg.at(b, c) * a.at(b, c) + fg.at(b, d + c);
            }
        Mat rl = num::relu_forward(f, bc ? &bc->relu : nullptr);
        Mat o = lin_b_[r].forward(rl, bc ? &bc->b_lin : nullptr);
        for (std::size_t i = 0; i < h.data.size(); ++i) h.data[i] += o.data[i];
        if (bc) {
            bc->a = std::move(a);
            bc->gamma = std::move(gamma);
        }
    }
    return out_.forward(h, cache ? &cache->out_lin : nullptr);
}

Mat FilmDenoiser::backward(const Mat& d_eps, const Cache& cache) {
    const std::size_t B = d_eps.rows, d = cfg_.hidden;
    Mat dh = out_.backward(d_eps, cache.out_lin);
    Mat d_film_in(B, cfg_.time_dim + cfg_.cond_dim);
    for (std::size_t r = cfg_.blocks; r-- > 0;) {
        const BlockCache& bc = cache.blocks[r];
        // Skip connection: dh feeds both the block input and the residual.
        Mat drl = lin_b_[r].backward(dh, bc.b_lin);
        Mat df = num::relu_backward(bc.relu, drl);
        Mat dfg(B, 2 * d);
        Mat da(B, d);
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t c = 0; c < d; ++c) {
                double g = df.at(b, c);
                dfg.at(b, c) = g * bc.a.at(b, c);      // d gamma
                dfg.at(b, d + c) = g;                  // d beta
                da.at(b, c) = g * bc.gamma.at(b, c);
            }
        Mat dfi = lin_film_[r].backward(dfg, bc.film_lin);
        for (std::size_t i = 0; i < d_film_in.data.size(); ++i) d_film_in.data[i] += dfi.data[i];
        Mat dh_a = lin_a_[r].backward(da, bc.a_lin);
        for (std::size_t i = 0; i < dh.data.size(); ++i) dh.data[i] += dh_a.data[i];
    }
    in_.backward(dh, cache.in_lin);
    // Timestep half of film_in has no upstream parameters.
    Mat d_cond(B, cfg_.cond_dim);
    for (std::size_t b = 0; b < B; ++b)
        for (std::size_t c = 0; c < cfg_.cond_dim; ++c)
            d_cond.at(b, c) = d_film_in.at(b, cfg_.time_dim + c);
    return d_cond;
}

}  // namespace covdiff::policy
