#include "covdiff/pipeline/infer.hpp"

#include <cmath>
#include <stdexcept>

#include "covdiff/diffusion/ddim.hpp"
#include "covdiff/geom/sample.hpp"
#include "covdiff/pipeline/train.hpp"

namespace covdiff::pipeline {

std::size_t default_episode_count(const traj::TrajectorySet& gt, std::size_t horizon) {
    std::size_t n = traj::total_pose_count(gt);
    return (n + horizon - 1) / horizon;
}

traj::TrajectorySet infer(const geom::TriMesh& world_mesh, const std::string& object_id,
                          const policy::Policy& policy, const InferOptions& opts,
                          const InferHooks& hooks) {
    if (opts.episodes < 1) throw std::invalid_argument("infer: episodes must be >= 1");
    const auto& cfg = policy.config();
    const std::size_t H = cfg.den.horizon;
    const std::size_t m = cfg.state.in_dim / 6;

    geom::NormalizeTransform tf;
    (void)geom::normalize_to_unit(world_mesh, tf);

    geom::PointCloud cloud = geom::sample_surface(world_mesh, opts.cloud_points, mix_seed(opts.seed, 1));
    num::Mat pts(cloud.points.size(), 3);
    for (std::size_t p = 0; p < cloud.points.size(); ++p) {
        geom::Vec3 q = geom::normalize(cloud.points[p], tf);
        pts.at(p, 0) = q.x;
        pts.at(p, 1) = q.y;
        pts.at(p, 2) = q.z;
    }
    std::vector<double> geo_emb = policy.geometry().forward(pts, nullptr);

    diffusion::NoiseSchedule schedule = diffusion::cosine_schedule(cfg.diffusion_steps);
    num::Rng rng(mix_seed(opts.seed, 2));
    diffusion::SampleOptions sample_opts;
    sample_opts.eta = opts.eta;
    sample_opts.guidance_scale = opts.guidance_scale;
    sample_opts.clip_x0 = opts.clip_x0;
    diffusion::DenoiseFn denoise = policy.denoise_fn();

    std::vector<traj::Stroke> segments;
    traj::Stroke prev;  // previous episode's output, normalized coords
    for (std::size_t e = 1; e <= opts.episodes; ++e) {
        std::vector<double> history(6 * m, 0.0);
        if (cfg.conditioning == policy::Conditioning::previous && e > 1)
            history = traj::last_m_flat(prev, m);
        if (hooks.on_episode) hooks.on_episode(e, history);

        std::vector<double> state_emb(cfg.state.out_dim, 0.0);
        if (cfg.conditioning != policy::Conditioning::none) {
            num::Mat h(1, 6 * m);
            std::copy(history.begin(), history.end(), h.data.begin());
            num::Mat s = policy.state_encoder().forward(h, nullptr);
            state_emb = s.data;
        }
        std::vector<double> cond = policy::fuse_condition(geo_emb, state_emb);

        std::vector<double> x0;
        try {
            x0 = diffusion::sample(denoise, cond, H, schedule, rng, sample_opts);
        } catch (const std::runtime_error& err) {
            throw std::runtime_error("infer: episode " + std::to_string(e) + ": " + err.what());
        }

        traj::Stroke seg;
        for (std::size_t t = 0; t < H; ++t) {
            const double* row = x0.data() + t * 6;
            seg.poses.push_back({{row[0], row[1], row[2]}, {row[3], row[4], row[5]}});
        }
        prev = seg;
        segments.push_back(std::move(seg));
    }

    traj::Stroke full = traj::concat_segments(segments);
    for (auto& p : full.poses) {
        double n = geom::norm(p.orientation);
        p.orientation = n < 1e-12 ? geom::Vec3{0, 0, 1} : p.orientation / n;
        p.position = geom::denormalize(p.position, tf);
    }

    traj::TrajectorySet out;
    out.strokes.push_back(std::move(full));
    out.object_id = object_id;
    out.transform = tf;
    return out;
}

}  // namespace covdiff::pipeline
