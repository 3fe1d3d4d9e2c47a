#include "covdiff/traj/trajectory.hpp"

#include <cmath>
#include <stdexcept>

namespace covdiff::traj {

bool pose_equal(const Pose6& a, const Pose6& b, double tol) {
    return std::fabs(a.position.x - b.position.x) <= tol &&
           std::fabs(a.position.y - b.position.y) <= tol &&
           std::fabs(a.position.z - b.position.z) <= tol &&
           std::fabs(a.orientation.x - b.orientation.x) <= tol &&
           std::fabs(a.orientation.y - b.orientation.y) <= tol &&
           std::fabs(a.orientation.z - b.orientation.z) <= tol;
}

std::size_t total_pose_count(const TrajectorySet& t) {
    std::size_t n = 0;
    for (const auto& s : t.strokes) n += s.poses.size();
    return n;
}

Stroke concat_segments(const std::vector<Stroke>& segments) {
    if (segments.empty()) throw std::invalid_argument("concat_segments: empty segment list");
    Stroke out;
    for (const Stroke& seg : segments) {
        std::size_t start = 0;
        if (!out.poses.empty() && !seg.poses.empty() &&
            pose_equal(out.poses.back(), seg.poses.front(), kConcatDedupTol))
            start = 1;  // drop the duplicated boundary pose
        out.poses.insert(out.poses.end(), seg.poses.begin() + start, seg.poses.end());
    }
    return out;
}

PaddedBatch pad_and_mask(const std::vector<Stroke>& strokes, std::size_t horizon) {
    PaddedBatch batch;
    batch.batch = strokes.size();
    batch.horizon = horizon;
    batch.x.assign(strokes.size() * horizon * 6, 0.0);
    batch.mask.assign(strokes.size() * horizon, 0);
    for (std::size_t b = 0; b < strokes.size(); ++b) {
        const auto& poses = strokes[b].poses;
        if (poses.size() > horizon)
            throw std::invalid_argument("pad_and_mask: stroke " + std::to_string(b) + " length " +
                                        std::to_string(poses.size()) + " exceeds horizon " + std::to_string(horizon));
        for (std::size_t t = 0; t < poses.size(); ++t) {
            double* row = batch.x.data() + (b * horizon + t) * 6;
            row[0] = poses[t].position.x;
            row[1] = poses[t].position.y;
            row[2] = poses[t].position.z;
            row[3] = poses[t].orientation.x;
            row[4] = poses[t].orientation.y;
            row[5] = poses[t].orientation.z;
            batch.mask[b * horizon + t] = 1;
        }
    }
    return batch;
}

Stroke unpad(const PaddedBatch& batch, std::size_t row) {
    if (row >= batch.batch) throw std::invalid_argument("unpad: row out of range");
    Stroke s;
    for (std::size_t t = 0; t < batch.horizon; ++t) {
        if (!batch.mask[row * batch.horizon + t]) break;
        const double* r = batch.x.data() + (row * batch.horizon + t) * 6;
        s.poses.push_back({{r[0], r[1], r[2]}, {r[3], r[4], r[5]}});
    }
    return s;
}

std::vector<double> last_m_flat(const Stroke& history, std::size_t m) {
    if (m < 1) throw std::invalid_argument("last_m_flat: m must be >= 1");
    std::vector<double> out(6 * m, 0.0);
    std::size_t have = std::min(history.poses.size(), m);
    std::size_t dst = m - have;  // zero poses fill the oldest slots
    for (std::size_t i = 0; i < have; ++i) {
        const Pose6& p = history.poses[history.poses.size() - have + i];
        double* r = out.data() + (dst + i) * 6;
        r[0] = p.position.x;
        r[1] = p.position.y;
        r[2] = p.position.z;
        r[3] = p.orientation.x;
        r[4] = p.orientation.y;
        r[5] = p.orientation.z;
    }
    return out;
}

namespace {

TrajectorySet map_positions(const TrajectorySet& t, auto&& fn) {
    TrajectorySet out = t;
    for (auto& s : out.strokes)
        for (auto& p : s.poses) p.position = fn(p.position);
    return out;
}

}  // namespace

TrajectorySet normalize_traj(const TrajectorySet& t, double scale, geom::Vec3 offset) {
    if (scale <= 0.0) throw std::invalid_argument("normalize_traj: scale must be > 0");
    return map_positions(t, [&](geom::Vec3 p) { return (p - offset) / scale; });
}

TrajectorySet denormalize_traj(const TrajectorySet& t, double scale, geom::Vec3 offset) {
    if (scale <= 0.0) throw std::invalid_argument("denormalize_traj: scale must be > 0");
    return map_positions(t, [&](geom::Vec3 p) { return scale * p + offset; });
}

std::vector<geom::Vec3> all_positions(const TrajectorySet& t) {
    std::vector<geom::Vec3> out;
    out.reserve(total_pose_count(t));
    for (const auto& s : t.strokes)
        for (const auto& p : s.poses) out.push_back(p.position);
    return out;
}

}  // namespace covdiff::traj
