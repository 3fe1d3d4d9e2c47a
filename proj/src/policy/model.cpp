#include "covdiff/policy/model.hpp"

#include <stdexcept>

namespace covdiff::policy {

using num::Mat;

Conditioning conditioning_from_string(const std::string& s) {
    if (s == "previous") return Conditioning::previous;
    if (s == "zero") return Conditioning::zero;
    if (s == "none") return Conditioning::none;
    throw std::invalid_argument("unknown conditioning variant '" + s + "' (previous|zero|none)");
}

std::string to_string(Conditioning c) {
    switch (c) {
        case Conditioning::previous: return "previous";
        case Conditioning::zero: return "zero";
        case Conditioning::none: return "none";
    }
    throw std::invalid_argument("bad conditioning value");
}

Policy::Policy(const PolicyConfig& cfg, std::uint64_t init_seed) : cfg_(cfg) {
    if (cfg.geo.out_dim + cfg.state.out_dim != cfg.den.cond_dim)
        throw std::invalid_argument("PolicyConfig: encoder outputs must sum to the condition width");
    // Tensors register (and draw their init values) in a fixed order:
    // geometry blocks, state encoder, denoiser.
    num::Rng init_rng(init_seed);
    geo_ = std::make_unique<GeometryEncoder>(store_, cfg.geo, init_rng);
    state_ = std::make_unique<StateEncoder>(store_, cfg.state, init_rng);
    den_ = std::make_unique<FilmDenoiser>(store_, cfg.den, init_rng);
}

std::vector<double> Policy::denoise(std::span<const double> x, std::size_t k,
                                    std::span<const double> condition) const {
    const std::size_t n = cfg_.den.horizon * 6;
    if (x.size() != n)
        throw std::invalid_argument("denoise: input length " + std::to_string(x.size()) + ", expected " +
                                    std::to_string(n));
    if (condition.size() != cfg_.den.cond_dim)
        throw std::invalid_argument("denoise: condition length " + std::to_string(condition.size()) +
                                    ", expected " + std::to_string(cfg_.den.cond_dim));
    Mat xm(1, n);
    std::copy(x.begin(), x.end(), xm.data.begin());
    Mat cm(1, condition.size());
    std::copy(condition.begin(), condition.end(), cm.data.begin());
    std::size_t ks[1] = {k};
    Mat eps = den_->forward(xm, ks, cm, nullptr);
    return eps.data;
}

diffusion::DenoiseFn Policy::denoise_fn() const {
    return [this](std::span<const double> x, std::size_t k, std::span<const double> c) {
        return denoise(x, k, c);
    };
}

namespace {

struct BatchForward {
    Mat xk;
    std::vector<std::size_t> ks;
    Mat cond;
    std::vector<StateEncoder::Cache> state_cache;  // one batched cache
    Mat state_in;
    std::vector<GeometryEncoder::Cache> geo_cache;  // per used object
    std::vector<long long> geo_cache_index;         // object -> cache slot or -1
    FilmDenoiser::Cache den_cache;
    Mat eps_hat;
    double loss = 0.0;
};

// Shared forward pass; with_cache selects whether backward state is kept.
BatchForward run_forward(const Policy& policy, const TrainingBatch& batch,
                         const diffusion::NoiseSchedule& schedule, bool with_cache) {
    const auto& cfg = policy.config();
    const std::size_t B = batch.items.size();
    const std::size_t n = cfg.den.horizon * 6;
    if (B == 0) throw std::invalid_argument("policy loss: empty batch");

    BatchForward fw;
    fw.geo_cache_index.assign(batch.clouds.size(), -1);

    // Geometry embeddings, once per object that some live item references.
    std::vector<std::vector<double>> geo_emb(batch.clouds.size());
    for (std::size_t o = 0; o < batch.clouds.size(); ++o) {
        bool used = false;
        for (const auto& it : batch.items)
            if (it.object == o && !it.drop_condition) used = true;
        if (!used) continue;
        if (with_cache) {
            fw.geo_cache_index[o] = static_cast<long long>(fw.geo_cache.size());
            fw.geo_cache.emplace_back();
            geo_emb[o] = policy.geometry().forward(batch.clouds[o], &fw.geo_cache.back());
        } else {
            geo_emb[o] = policy.geometry().forward(batch.clouds[o], nullptr);
        }
    }

    // State embeddings for the whole batch in one pass.
    Mat state_emb;
    if (cfg.conditioning != Conditioning::none) {
        fw.state_in = Mat(B, cfg.state.in_dim);
        for (std::size_t b = 0; b < B; ++b) {
            const auto& it = batch.items[b];
            if (cfg.conditioning == Conditioning::previous) {
                if (it.history.size() != cfg.state.in_dim)
                    throw std::invalid_argument("policy loss: history length mismatch");
                std::copy(it.history.begin(), it.history.end(), fw.state_in.row(b).begin());
            }  // zero variant leaves the row at zero
        }
        if (with_cache) {
            fw.state_cache.emplace_back();
            state_emb = policy.state_encoder().forward(fw.state_in, &fw.state_cache.back());
        } else {
            state_emb = policy.state_encoder().forward(fw.state_in, nullptr);
        }
    }

    fw.cond = Mat(B, cfg.den.cond_dim);
    fw.xk = Mat(B, n);
    fw.ks.resize(B);
    for (std::size_t b = 0; b < B; ++b) {
        const auto& it = batch.items[b];
        if (it.object >= batch.clouds.size()) throw std::invalid_argument("policy loss: bad object index");
        if (it.x0.size() != n || it.eps.size() != n)
            throw std::invalid_argument("policy loss: x0/eps length mismatch");
        if (!it.drop_condition) {
            const auto& g = geo_emb[it.object];
            std::copy(g.begin(), g.end(), fw.cond.row(b).begin());
            if (cfg.conditioning != Conditioning::none)
                for (std::size_t c = 0; c < cfg.state.out_dim; ++c)
                    fw.cond.at(b, cfg.geo.out_dim + c) = state_emb.at(b, c);
        }
        auto x = diffusion::q_sample(it.x0, it.k, it.eps, schedule);
        std::copy(x.begin(), x.end(), fw.xk.row(b).begin());
        fw.ks[b] = it.k;
    }

    fw.eps_hat = policy.denoiser().forward(fw.xk, fw.ks, fw.cond, with_cache ? &fw.den_cache : nullptr);
    double loss = 0.0;
    for (std::size_t b = 0; b < B; ++b)
        loss += diffusion::masked_noise_loss(fw.eps_hat.row(b), batch.items[b].eps, batch.items[b].mask);
    fw.loss = loss / static_cast<double>(B);
    return fw;
}

}  // namespace

double policy_loss(const Policy& policy, const TrainingBatch& batch,
                   const diffusion::NoiseSchedule& schedule) {
    return run_forward(policy, batch, schedule, /*with_cache=*/false).loss;
}

double policy_loss_and_grad(Policy& policy, const TrainingBatch& batch,
                            const diffusion::NoiseSchedule& schedule) {
    const auto& cfg = policy.config();
    const std::size_t B = batch.items.size();
    policy.params().zero_grads();
    BatchForward fw = run_forward(policy, batch, schedule, /*with_cache=*/true);

    Mat d_eps(B, cfg.den.horizon * 6);
    for (std::size_t b = 0; b < B; ++b) {
        auto g = diffusion::masked_noise_loss_grad(fw.eps_hat.row(b), batch.items[b].eps,
                                                   batch.items[b].mask);
        for (std::size_t i = 0; i < g.size(); ++i) d_eps.at(b, i) = g[i] / static_cast<double>(B);
    }

    Mat d_cond = policy.denoiser().backward(d_eps, fw.den_cache);
    // Dropped conditions were zeroed in the forward, so nothing flows back.
    for (std::size_t b = 0; b < B; ++b)
        if (batch.items[b].drop_condition)
            for (auto& v : d_cond.row(b)) v = 0.0;

    if (cfg.conditioning != Conditioning::none) {
        Mat d_state(B, cfg.state.out_dim);
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t c = 0; c < cfg.state.out_dim; ++c)
                d_state.at(b, c) = d_cond.at(b, cfg.geo.out_dim + c);
        policy.state_encoder().backward(d_state, fw.state_cache.front());
    }

    for (std::size_t o = 0; o < batch.clouds.size(); ++o) {
        if (fw.geo_cache_index[o] < 0) continue;
        Mat d_geo(1, cfg.geo.out_dim);
        bool any = false;
        for (std::size_t b = 0; b < B; ++b) {
            const auto& it = batch.items[b];
            if (it.object != o || it.drop_condition) continue;
            any = true;
            for (std::size_t c = 0; c < cfg.geo.out_dim; ++c) d_geo.at(0, c) += d_cond.at(b, c);
        }
        if (any) policy.geometry().backward(d_geo, fw.geo_cache[fw.geo_cache_index[o]]);
    }
    return fw.loss;
}

}  // namespace covdiff::policy
