#include "covdiff/pipeline/train.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "covdiff/geom/obj.hpp"
#include "covdiff/geom/sample.hpp"
#include "covdiff/num/adam.hpp"
#include "covdiff/policy/checkpoint.hpp"
#include "covdiff/traj/csv.hpp"

namespace fs = std::filesystem;

namespace covdiff::pipeline {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 step over seed ^ stream tag
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<Window> extract_windows(const traj::TrajectorySet& normalized, std::size_t horizon,
                                    std::size_t history_len) {
    traj::Stroke flat = traj::concat_segments(normalized.strokes);
    const auto& poses = flat.poses;
    std::vector<Window> out;
    for (std::size_t s = 0; s < poses.size(); s += horizon) {
        std::size_t end = std::min(s + horizon, poses.size());
        traj::Stroke w;
        w.poses.assign(poses.begin() + s, poses.begin() + end);
        traj::PaddedBatch padded = traj::pad_and_mask({w}, horizon);

        traj::Stroke prefix;
        std::size_t have = std::min(history_len, s);
        prefix.poses.assign(poses.begin() + (s - have), poses.begin() + s);

        Window win;
        win.x0 = std::move(padded.x);
        win.mask = std::move(padded.mask);
        win.history = traj::last_m_flat(prefix, history_len);
        out.push_back(std::move(win));
    }
    return out;
}

TrainResult train(const DatasetManifest& manifest, const TrainConfig& cfg, const std::string& out_dir,
                  const TrainHooks& hooks) {
    auto train_samples = manifest.split_samples("train");
    if (train_samples.empty()) throw std::runtime_error("train: manifest has no train samples");

    // Per-object clouds and supervision windows, all in normalized coordinates.
    struct Entry {
        std::size_t object;
        std::size_t sample_index;
        Window window;
    };
    std::vector<num::Mat> clouds;
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < train_samples.size(); ++i) {
        const Sample& s = *train_samples[i];
        geom::TriMesh mesh = geom::read_obj_file(s.mesh_path);
        geom::PointCloud cloud = geom::sample_surface(mesh, cfg.cloud_points, mix_seed(cfg.seed, 1000 + i));
        num::Mat pts(cloud.points.size(), 3);
        geom::NormalizeTransform tf{s.scale, s.offset};
        for (std::size_t p = 0; p < cloud.points.size(); ++p) {
            geom::Vec3 q = geom::normalize(cloud.points[p], tf);
            pts.at(p, 0) = q.x;
            pts.at(p, 1) = q.y;
            pts.at(p, 2) = q.z;
        }
        clouds.push_back(std::move(pts));

        traj::TrajectorySet gt = traj::read_traj_csv_file(s.traj_path);
        gt = traj::normalize_traj(gt, s.scale, s.offset);
        for (auto& w : extract_windows(gt, cfg.horizon, cfg.history_len))
            entries.push_back({i, static_cast<std::size_t>(train_samples[i] - manifest.samples.data()),
                               std::move(w)});
    }
    if (entries.empty()) throw std::runtime_error("train: no supervision windows");

    policy::Policy policy(policy_config_from(cfg), mix_seed(cfg.seed, 1));
    num::AdamState adam(policy.params());
    num::AdamConfig adam_cfg;
    adam_cfg.lr = cfg.lr;
    diffusion::NoiseSchedule schedule = diffusion::cosine_schedule(cfg.diffusion_steps);
    num::Rng rng(mix_seed(cfg.seed, 2));

    std::vector<double> epoch_losses;
    // Batches hold windows of a single object, so the costly geometry
    // encoder runs once per batch. Window order within objects and the
    // batch order both reshuffle every epoch.
    std::vector<std::vector<std::size_t>> per_object(clouds.size());
    for (std::size_t i = 0; i < entries.size(); ++i) per_object[entries[i].object].push_back(i);

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::vector<std::pair<std::size_t, std::size_t>> batch_spans;  // (object, chunk start)
        for (auto& windows : per_object) {
            for (std::size_t i = windows.size(); i > 1; --i)
                std::swap(windows[i - 1], windows[rng.below(i)]);
        }
        for (std::size_t o = 0; o < per_object.size(); ++o)
            for (std::size_t start = 0; start < per_object[o].size(); start += cfg.batch)
                batch_spans.emplace_back(o, start);
        for (std::size_t i = batch_spans.size(); i > 1; --i)
            std::swap(batch_spans[i - 1], batch_spans[rng.below(i)]);

        double loss_sum = 0.0;
        for (const auto& [obj, start] : batch_spans) {
            const auto& windows = per_object[obj];
            std::size_t end = std::min(start + cfg.batch, windows.size());
            policy::TrainingBatch batch;
            batch.clouds = clouds;  // shared per-object clouds
            std::vector<std::size_t> sample_ids;
            for (std::size_t i = start; i < end; ++i) {
                const Entry& e = entries[windows[i]];
                policy::TrainingBatch::Item item;
                item.object = e.object;
                item.history = e.window.history;
                item.x0 = e.window.x0;
                item.mask = e.window.mask;
                item.k = 1 + rng.below(cfg.diffusion_steps);
                item.eps = rng.gaussian_vec(cfg.horizon * 6);
                if (cfg.cond_dropout > 0.0) {
                    item.drop_condition = rng.uniform() < cfg.cond_dropout;
                    if (hooks.on_condition_dropout)
                        hooks.on_condition_dropout(i - start, item.drop_condition);
                }
                batch.items.push_back(std::move(item));
                sample_ids.push_back(e.sample_index);
            }
            if (hooks.on_batch) hooks.on_batch(sample_ids);
            double loss = policy::policy_loss_and_grad(policy, batch, schedule);
            adam.step(policy.params(), adam_cfg);
            loss_sum += loss * static_cast<double>(end - start);
        }
        double epoch_loss = loss_sum / static_cast<double>(entries.size());
        epoch_losses.push_back(epoch_loss);
        if (hooks.on_epoch) hooks.on_epoch(epoch, epoch_loss);
    }

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    TrainResult result;
    result.checkpoint_path = (fs::path(out_dir) / "ckpt.bin").string();
    result.loss_curve_path = (fs::path(out_dir) / "loss_curve.csv").string();
    result.epoch_losses = epoch_losses;
    policy::save_checkpoint(policy, result.checkpoint_path);

    std::ofstream curve(result.loss_curve_path, std::ios::binary);
    if (!curve) throw std::runtime_error("cannot write loss curve: " + result.loss_curve_path);
    curve << "epoch,loss\n";
    char buf[64];
    for (std::size_t i = 0; i < epoch_losses.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i + 1, epoch_losses[i]);
        curve << buf;
    }
    return result;
}

}  // namespace covdiff::pipeline
