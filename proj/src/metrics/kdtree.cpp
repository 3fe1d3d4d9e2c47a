#include "covdiff/metrics/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace covdiff::metrics {

using geom::Vec3;

namespace {

double axis_val(Vec3 p, int axis) { return axis == 0 ? p.x : (axis == 1 ? p.y : p.z); }

}  // namespace

KdTree3::KdTree3(std::span<const Vec3> points) {
    if (points.empty()) throw std::invalid_argument("KdTree3: empty point set");
    std::vector<Vec3> pts(points.begin(), points.end());
    nodes_.reserve(pts.size());
    root_ = build(pts, 0, static_cast<std::int32_t>(pts.size()));
}

std::int32_t KdTree3::build(std::vector<Vec3>& pts, std::int32_t lo, std::int32_t hi) {
    if (lo >= hi) return -1;
    Vec3 mn = pts[lo], mx = pts[lo];
    for (std::int32_t i = lo; i < hi; ++i) {
        mn.x = std::min(mn.x, pts[i].x); mx.x = std::max(mx.x, pts[i].x);
        mn.y = std::min(mn.y, pts[i].y); mx.y = std::max(mx.y, pts[i].y);
        mn.z = std::min(mn.z, pts[i].z); mx.z = std::max(mx.z, pts[i].z);
    }
    Vec3 ext = mx - mn;
    int axis = 0;
    if (ext.y > ext.x) axis = 1;
    if (ext.z > axis_val(ext, axis)) axis = 2;
    std::int32_t mid = lo + (hi - lo) / 2;
    std::nth_element(pts.begin() + lo, pts.begin() + mid, pts.begin() + hi,
                     [axis](Vec3 a, Vec3 b) { return axis_val(a, axis) < axis_val(b, axis); });
    std::int32_t id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({pts[mid], axis, -1, -1});
    nodes_[id].left = build(pts, lo, mid);
    nodes_[id].right = build(pts, mid + 1, hi);
    return id;
}

double KdTree3::nearest_dist2(Vec3 q) const {
    double best = std::numeric_limits<double>::infinity();
    search(root_, q, best);
    return best;
}

void KdTree3::search(std::int32_t node, Vec3 q, double& best) const {
    if (node < 0) return;
    const Node& n = nodes_[node];
    double d2 = norm2(q - n.point);
    if (d2 < best) best = d2;
    double diff = axis_val(q, n.axis) - axis_val(n.point, n.axis);
    std::int32_t near = diff < 0.0 ? n.left : n.right;
    std::int32_t far = diff < 0.0 ? n.right : n.left;
    search(near, q, best);
    if (diff * diff < best) search(far, q, best);
}

}  // namespace covdiff::metrics
