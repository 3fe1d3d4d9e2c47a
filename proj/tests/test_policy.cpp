#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "covdiff/diffusion/schedule.hpp"
#include "covdiff/num/adam.hpp"
#include "covdiff/num/gradcheck.hpp"
#include "covdiff/policy/checkpoint.hpp"
#include "covdiff/policy/model.hpp"

using namespace covdiff;
using num::Mat;

namespace {

// Small widths keep exhaustive finite-difference checks fast; the layer
// stack is the real one.
policy::PolicyConfig micro_config() {
    policy::PolicyConfig cfg;
    cfg.geo.block_widths = {6, 8};
    cfg.geo.out_dim = 4;
    cfg.state.in_dim = 12;
    cfg.state.hidden = 8;
    cfg.state.out_dim = 4;
    cfg.den.horizon = 2;
    cfg.den.cond_dim = 8;
    cfg.den.hidden = 10;
    cfg.den.blocks = 1;
    cfg.den.time_dim = 4;
    cfg.diffusion_steps = 10;
    return cfg;
}

Mat random_cloud(std::size_t n, num::Rng& rng) {
    Mat m(n, 3);
    for (auto& v : m.data) v = rng.uniform(-0.5, 0.5);
    return m;
}

policy::TrainingBatch micro_batch(const policy::PolicyConfig& cfg, num::Rng& rng) {
    policy::TrainingBatch batch;
    batch.clouds.push_back(random_cloud(5, rng));
    batch.clouds.push_back(random_cloud(7, rng));
    for (std::size_t b = 0; b < 3; ++b) {
        policy::TrainingBatch::Item item;
        item.object = b % 2;
        item.history.resize(cfg.state.in_dim);
        for (auto& v : item.history) v = rng.uniform(-1, 1);
        item.x0.resize(cfg.den.horizon * 6);
        for (auto& v : item.x0) v = rng.uniform(-1, 1);
        item.mask.assign(cfg.den.horizon, 1);
        if (b == 2) {
            item.mask.back() = 0;  // exercise the padding path
            for (std::size_t d = 0; d < 6; ++d) item.x0[(cfg.den.horizon - 1) * 6 + d] = 0.0;
        }
        item.k = 1 + rng.below(cfg.diffusion_steps);
        item.eps.resize(cfg.den.horizon * 6);
        for (auto& v : item.eps) v = rng.uniform(-1, 1);
        batch.items.push_back(std::move(item));
    }
    return batch;
}

}  // namespace

TEST_CASE("geometry embedding is permutation and duplication invariant") {
    policy::PolicyConfig cfg = micro_config();
    policy::Policy p(cfg, 17);
    num::Rng rng(3);
    Mat cloud = random_cloud(64, rng);
    auto base = p.geometry().forward(cloud, nullptr);

    // Reverse the rows.
    Mat reversed(cloud.rows, 3);
    for (std::size_t r = 0; r < cloud.rows; ++r)
        for (std::size_t c = 0; c < 3; ++c) reversed.at(r, c) = cloud.at(cloud.rows - 1 - r, c);
    CHECK(p.geometry().forward(reversed, nullptr) == base);

    // Duplicate every point.
    Mat doubled(cloud.rows * 2, 3);
    for (std::size_t r = 0; r < cloud.rows; ++r)
        for (std::size_t c = 0; c < 3; ++c) {
            doubled.at(2 * r, c) = cloud.at(r, c);
            doubled.at(2 * r + 1, c) = cloud.at(r, c);
        }
    CHECK(p.geometry().forward(doubled, nullptr) == base);

    // N identical points equal the single-point embedding.
    Mat one(1, 3);
    one.at(0, 0) = 0.3; one.at(0, 1) = -0.2; one.at(0, 2) = 0.1;
    Mat many(9, 3);
    for (std::size_t r = 0; r < 9; ++r)
        for (std::size_t c = 0; c < 3; ++c) many.at(r, c) = one.at(0, c);
    CHECK(p.geometry().forward(many, nullptr) == p.geometry().forward(one, nullptr));

    Mat empty(0, 3);
    CHECK_THROWS_AS(p.geometry().forward(empty, nullptr), std::invalid_argument);
}

TEST_CASE("state encoder contracts") {
    num::ParamStore store;
    num::Rng rng(5);
    policy::StateEncoder enc(store, {}, rng);
    Mat x(1, 24);
    for (auto& v : x.data) v = rng.uniform(-1, 1);
    Mat y = enc.forward(x, nullptr);
    CHECK(y.cols == 64);

    // All-zero parameters map everything to zero.
    num::ParamStore zstore;
    num::Rng zr(1);
    policy::StateEncoder zenc(zstore, {}, zr);
    for (std::size_t i = 0; i < zstore.count(); ++i) zstore[i].value.fill(0.0);
    Mat zy = zenc.forward(x, nullptr);
    for (double v : zy.data) CHECK(v == 0.0);

    Mat bad(1, 23);
    CHECK_THROWS_AS(enc.forward(bad, nullptr), std::invalid_argument);
}

TEST_CASE("state encoder seeded fixture is stable") {
    num::ParamStore store;
    num::Rng rng(2024);
    policy::StateEncoder enc(store, {}, rng);
    Mat x(1, 24);
    for (std::size_t i = 0; i < 24; ++i) x.at(0, i) = 0.1 * static_cast<double>(i) - 1.0;
    Mat y = enc.forward(x, nullptr);
    double sum = 0.0;
    for (double v : y.data) sum += v;
    // Frozen from the reference run of this exact seed/input pair.
    CHECK(sum == doctest::Approx(0.73687850600283622).epsilon(1e-12));
}

TEST_CASE("fuse_condition layout") {
    std::vector<double> g(64, 0.0), s(64, 0.0);
    g[0] = 1.0;
    auto c = policy::fuse_condition(g, s);
    REQUIRE(c.size() == 128);
    CHECK(c[0] == 1.0);
    for (std::size_t i = 1; i < 128; ++i) CHECK(c[i] == 0.0);

    for (std::size_t i = 0; i < 64; ++i) s[i] = static_cast<double>(i);
    c = policy::fuse_condition(g, s);
    for (std::size_t i = 0; i < 64; ++i) CHECK(c[64 + i] == s[i]);

    CHECK_THROWS_AS(policy::fuse_condition(std::vector<double>(3), std::vector<double>(4)),
                    std::invalid_argument);
}

TEST_CASE("film op") {
    std::vector<double> x{0.5, 1.0};
    CHECK(policy::film(x, std::vector<double>{1, 1}, std::vector<double>{0, 0}) == x);
    CHECK(policy::film(x, std::vector<double>{0, 0}, std::vector<double>{3, -2}) ==
          std::vector<double>{3, -2});
    CHECK(policy::film(x, std::vector<double>{2, 2}, std::vector<double>{-1, -1}) ==
          std::vector<double>{0, 1});
    CHECK_THROWS_AS(policy::film(x, std::vector<double>{1}, std::vector<double>{0, 0}),
                    std::invalid_argument);
}

TEST_CASE("max pool rows routing and tie break") {
    Mat f(2, 3);
    f.at(0, 0) = 5; f.at(0, 1) = 2; f.at(0, 2) = 7;
    f.at(1, 0) = 1; f.at(1, 1) = 2; f.at(1, 2) = 3;  // channel 1 ties
    std::vector<std::size_t> argmax;
    Mat pooled = policy::max_pool_rows(f, &argmax);
    CHECK(pooled.data == std::vector<double>{5, 2, 7});
    CHECK(argmax == std::vector<std::size_t>{0, 0, 0});  // tie keeps row 0

    Mat d(1, 3);
    d.at(0, 0) = 1; d.at(0, 1) = 2; d.at(0, 2) = 3;
    Mat dh = policy::max_pool_rows_backward(d, argmax, 2);
    CHECK(dh.row(0)[0] == 1.0);
    CHECK(dh.row(0)[1] == 2.0);
    CHECK(dh.row(0)[2] == 3.0);
    for (double v : dh.row(1)) CHECK(v == 0.0);  // losing row gets nothing
}

TEST_CASE("denoiser shape and determinism") {
    policy::PolicyConfig cfg = micro_config();
    policy::Policy p(cfg, 99);
    num::Rng rng(4);
    std::vector<double> x(cfg.den.horizon * 6);
    for (auto& v : x) v = rng.uniform(-1, 1);
    std::vector<double> c(cfg.den.cond_dim);
    for (auto& v : c) v = rng.uniform(-1, 1);
    auto e1 = p.denoise(x, 3, c);
    CHECK(e1.size() == x.size());
    CHECK(p.denoise(x, 3, c) == e1);
    CHECK_THROWS_AS(p.denoise(std::vector<double>(5), 3, c), std::invalid_argument);
    CHECK_THROWS_AS(p.denoise(x, 3, std::vector<double>(3)), std::invalid_argument);
}

TEST_CASE("zero upstream gradient produces zero parameter gradients") {
    policy::PolicyConfig cfg = micro_config();
    policy::Policy p(cfg, 7);
    num::Rng rng(8);
    policy::TrainingBatch batch = micro_batch(cfg, rng);
    // eps == eps_hat is unreachable; instead check the propagation rule
    // directly through the denoiser with a zero upstream.
    Mat x(2, cfg.den.horizon * 6);
    Mat cond(2, cfg.den.cond_dim);
    std::vector<std::size_t> ks{1, 2};
    policy::FilmDenoiser::Cache cache;
    p.params().zero_grads();
    (void)p.denoiser().forward(x, ks, cond, &cache);
    Mat dzero(2, cfg.den.horizon * 6);
    Mat dc = p.denoiser().backward(dzero, cache);
    for (std::size_t i = 0; i < p.params().count(); ++i)
        for (double g : p.params()[i].grad.data) CHECK(g == 0.0);
    for (double v : dc.data) CHECK(v == 0.0);
}

TEST_CASE("full composite gradient matches central differences") {
    policy::PolicyConfig cfg = micro_config();
    policy::Policy p(cfg, 2026);
    num::Rng rng(31);
    policy::TrainingBatch batch = micro_batch(cfg, rng);
    auto schedule = diffusion::cosine_schedule(cfg.diffusion_steps);

    // Precondition of the finite-difference probe: the loss must be smooth
    // near the point, so no max-pool channel may sit on a near-tie.
    for (const auto& cloud : batch.clouds) {
        policy::GeometryEncoder::Cache cache;
        (void)p.geometry().forward(cloud, &cache);
        const num::Mat& feats = cache.features;
        for (std::size_t c = 0; c < feats.cols; ++c) {
            double best = feats.at(cache.argmax[c], c);
            double gap = 1e9;
            for (std::size_t r = 0; r < feats.rows; ++r)
                if (r != cache.argmax[c]) gap = std::min(gap, best - feats.at(r, c));
            REQUIRE(gap > 1e-4);
        }
    }

    double loss = policy::policy_loss_and_grad(p, batch, schedule);
    CHECK(loss > 0.0);
    auto analytic = p.params().grads_flat();
    auto point = p.params().values_flat();
    auto f = [&](std::span<const double> v) {
        p.params().set_values_flat(v);
        return policy::policy_loss(p, batch, schedule);
    };
    // Two probe widths: difference-quotient noise on near-zero coordinates
    // shrinks with the larger step, while a genuine gradient bug persists at
    // both. Keep the error only if it survives both probes.
    double worst = 0.0;
    for (std::size_t i = 0; i < point.size(); ++i) {
        double e = num::grad_check_coord(f, point, analytic[i], i, 1e-5);
        if (e > 1e-4) e = std::min(e, num::grad_check_coord(f, point, analytic[i], i, 1e-4));
        worst = std::max(worst, e);
    }
    p.params().set_values_flat(point);
    CHECK(worst <= 1e-4);
}

TEST_CASE("backward without forward cache is rejected") {
    policy::PolicyConfig cfg = micro_config();
    policy::Policy p(cfg, 1);
    Mat d(1, cfg.den.horizon * 6);
    policy::FilmDenoiser::Cache empty_cache;
    CHECK_THROWS(p.denoiser().backward(d, empty_cache));
}

TEST_CASE("denoiser stays finite on wild inputs") {
    policy::PolicyConfig cfg = micro_config();
    policy::Policy p(cfg, 55);
    num::Rng rng(66);
    const std::size_t n = 10000;
    Mat x(n, cfg.den.horizon * 6);
    Mat c(n, cfg.den.cond_dim);
    std::vector<std::size_t> ks(n);
    for (auto& v : x.data) v = rng.uniform(-10, 10);
    for (auto& v : c.data) v = rng.uniform(-10, 10);
    for (auto& k : ks) k = rng.below(cfg.diffusion_steps + 1);
    Mat out = p.denoiser().forward(x, ks, c, nullptr);
    CHECK(num::all_finite(out));
}

TEST_CASE("changing the condition changes trained outputs") {
    policy::PolicyConfig cfg = micro_config();
    policy::Policy p(cfg, 12);
    num::Rng rng(13);
    auto schedule = diffusion::cosine_schedule(cfg.diffusion_steps);
    policy::TrainingBatch batch = micro_batch(cfg, rng);
    num::AdamState adam(p.params());
    for (int step = 0; step < 20; ++step) {
        policy::policy_loss_and_grad(p, batch, schedule);
        adam.step(p.params(), {.lr = 1e-3});
    }
    std::vector<double> x(cfg.den.horizon * 6, 0.1);
    std::vector<double> c1(cfg.den.cond_dim, 0.5);
    std::vector<double> c2(cfg.den.cond_dim, -0.5);
    auto e1 = p.denoise(x, 2, c1);
    auto e2 = p.denoise(x, 2, c2);
    double diff = 0.0;
    for (std::size_t i = 0; i < e1.size(); ++i) diff += std::fabs(e1[i] - e2[i]);
    CHECK(diff > 1e-6);
}

TEST_CASE("one adam step decreases the loss for most inits") {
    policy::PolicyConfig cfg = micro_config();
    auto schedule = diffusion::cosine_schedule(cfg.diffusion_steps);
    num::Rng rng(40);
    policy::TrainingBatch batch = micro_batch(cfg, rng);
    int decreased = 0;
    for (int trial = 0; trial < 100; ++trial) {
        policy::Policy p(cfg, 1000 + trial);
        num::AdamState adam(p.params());
        double before = policy::policy_loss_and_grad(p, batch, schedule);
        adam.step(p.params(), {.lr = 1e-4});
        double after = policy::policy_loss(p, batch, schedule);
        if (after < before) ++decreased;
    }
    CHECK(decreased >= 95);
}

TEST_CASE("checkpoint round trip preserves everything") {
    policy::PolicyConfig cfg = micro_config();
    cfg.conditioning = policy::Conditioning::zero;
    policy::Policy p(cfg, 321);
    std::string path = "build_test_ckpt.bin";
    policy::save_checkpoint(p, path);
    policy::Policy q = policy::load_checkpoint(path);
    std::remove(path.c_str());

    CHECK(q.config().den.horizon == cfg.den.horizon);
    CHECK(q.config().den.blocks == cfg.den.blocks);
    CHECK(q.config().conditioning == policy::Conditioning::zero);
    CHECK(q.config().geo.block_widths == cfg.geo.block_widths);
    REQUIRE(q.params().count() == p.params().count());
    for (std::size_t i = 0; i < p.params().count(); ++i)
        CHECK(q.params()[i].value.data == p.params()[i].value.data);

    num::Rng rng(77);
    std::vector<double> x(cfg.den.horizon * 6);
    for (auto& v : x) v = rng.uniform(-1, 1);
    std::vector<double> c(cfg.den.cond_dim);
    for (auto& v : c) v = rng.uniform(-1, 1);
    CHECK(p.denoise(x, 5, c) == q.denoise(x, 5, c));
}

TEST_CASE("load rejects a corrupted magic") {
    std::string path = "build_test_bad.bin";
    {
        std::FILE* f = std::fopen(path.c_str(), "wb");
        std::fputs("NOPE", f);
        std::fclose(f);
    }
    CHECK_THROWS_WITH_AS(policy::load_checkpoint(path), doctest::Contains("magic"),
                         std::runtime_error);
    std::remove(path.c_str());
}
