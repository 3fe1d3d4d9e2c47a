#include "covdiff/metrics/metrics.hpp"

#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "covdiff/geom/segment_grid.hpp"
#include "covdiff/metrics/kdtree.hpp"

namespace covdiff::metrics {

using geom::Segment;
using geom::TriMesh;
using geom::Vec3;

namespace {

// One direction of the Chamfer sum; per-point minima are independent, the
// reduction runs serially in point order.
double directed_sum(std::span<const Vec3> from, std::span<const Vec3> to, Mode mode) {
    std::vector<double> min_d2(from.size());
    if (mode == Mode::naive) {
        for (std::size_t i = 0; i < from.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const Vec3& q : to) best = std::min(best, norm2(from[i] - q));
            min_d2[i] = best;
        }
    } else {
        KdTree3 tree(to);
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(from.size()); ++i)
            min_d2[i] = tree.nearest_dist2(from[i]);
    }
    double sum = 0.0;
    for (double d : min_d2) sum += d;
    return sum;
}

}  // namespace

ChamferResult chamfer(std::span<const Vec3> s1, std::span<const Vec3> s2, Mode mode) {
    if (s1.empty() || s2.empty()) throw std::invalid_argument("chamfer: point sets must be non-empty");
    ChamferResult r;
    r.sum = directed_sum(s1, s2, mode) + directed_sum(s2, s1, mode);
    r.mean = r.sum / static_cast<double>(s1.size() + s2.size());
    return r;
}

std::vector<Segment> collect_segments(const traj::TrajectorySet& t) {
    std::vector<Segment> segs;
    for (const auto& stroke : t.strokes)
        for (std::size_t i = 0; i + 1 < stroke.poses.size(); ++i)
            segs.push_back({stroke.poses[i].position, stroke.poses[i + 1].position});
    return segs;
}

bool face_covered(const TriMesh& mesh, std::size_t face_index, std::span<const Segment> segments,
                  double r_spray) {
    if (r_spray <= 0.0) throw std::invalid_argument("face_covered: r_spray must be > 0");
    Vec3 c = face_centroid(mesh, face_index);
    for (const Segment& s : segments)
        if (point_segment_distance(c, s.a, s.b).distance <= r_spray) return true;
    return false;
}

std::vector<std::uint8_t> covered_faces(const TriMesh& mesh, std::span<const Segment> segments,
                                        double r_spray, Mode mode) {
    if (r_spray <= 0.0) throw std::invalid_argument("covered_faces: r_spray must be > 0");
    std::vector<std::uint8_t> covered(mesh.faces.size(), 0);
    if (segments.empty()) return covered;
    if (mode == Mode::naive) {
        for (std::size_t f = 0; f < mesh.faces.size(); ++f)
            covered[f] = face_covered(mesh, f, segments, r_spray) ? 1 : 0;
        return covered;
    }
    std::vector<Segment> segs(segments.begin(), segments.end());
    geom::SegmentGrid grid(segs, r_spray);
#pragma omp parallel for schedule(static)
    for (long long f = 0; f < static_cast<long long>(mesh.faces.size()); ++f) {
        Vec3 c = face_centroid(mesh, static_cast<std::size_t>(f));
        for (std::uint32_t s : grid.query_candidates(c, r_spray)) {
            if (point_segment_distance(c, segs[s].a, segs[s].b).distance <= r_spray) {
                covered[f] = 1;
                break;
            }
        }
    }
    return covered;
}

double overlap_coverage(const TriMesh& mesh, const traj::TrajectorySet& t, double r_spray, Mode mode) {
    if (mesh.faces.empty()) throw std::invalid_argument("overlap_coverage: mesh has no faces");
    auto segs = collect_segments(t);
    auto covered = covered_faces(mesh, segs, r_spray, mode);
    std::size_t n = 0;
    for (auto c : covered) n += c;
    return static_cast<double>(n) / static_cast<double>(mesh.faces.size());
}

double area_coverage(const TriMesh& mesh, const traj::TrajectorySet& t, double r_spray, Mode mode) {
    if (mesh.faces.empty()) throw std::invalid_argument("area_coverage: mesh has no faces");
    double total = total_area(mesh);
    if (total <= 0.0) throw std::invalid_argument("area_coverage: zero total mesh area");
    auto segs = collect_segments(t);
    auto covered = covered_faces(mesh, segs, r_spray, mode);
    double hit = 0.0;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f)
        if (covered[f]) hit += face_area(mesh, f);
    return hit / total;
}

double smoothness(const traj::TrajectorySet& t) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& stroke : t.strokes) {
        const auto& p = stroke.poses;
        if (p.size() < 4) continue;
        for (std::size_t i = 0; i + 3 < p.size(); ++i) {
            Vec3 jerk = p[i + 3].position - 3.0 * p[i + 2].position + 3.0 * p[i + 1].position -
                        p[i].position;
            sum += norm2(jerk);
            ++count;
        }
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

std::string to_json(const MetricsReport& r) {
    nlohmann::json j{{"pcd_sum", r.pcd_sum},
                     {"pcd_mean", r.pcd_mean},
                     {"coverage_overlap", r.coverage_overlap},
                     {"coverage_area", r.coverage_area},
                     {"smoothness", r.smoothness},
                     {"r_spray", r.r_spray}};
    return j.dump();
}

MetricsReport report_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    MetricsReport r;
    r.pcd_sum = j.at("pcd_sum").get<double>();
    r.pcd_mean = j.at("pcd_mean").get<double>();
    r.coverage_overlap = j.at("coverage_overlap").get<double>();
    r.coverage_area = j.at("coverage_area").get<double>();
    r.smoothness = j.at("smoothness").get<double>();
    r.r_spray = j.at("r_spray").get<double>();
    return r;
}

}  // namespace covdiff::metrics
