#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "covdiff/geom/vec3.hpp"

namespace covdiff::metrics {

// Static 3-d tree over points; median split on the widest axis.
class KdTree3 {
public:
    explicit KdTree3(std::span<const geom::Vec3> points);

    // Squared distance from q to the nearest stored point. Thread-safe.
    double nearest_dist2(geom::Vec3 q) const;

private:
    struct Node {
        geom::Vec3 point;
        int axis;
        std::int32_t left = -1;
        std::int32_t right = -1;
    };

    std::int32_t build(std::vector<geom::Vec3>& pts, std::int32_t lo, std::int32_t hi);
    void search(std::int32_t node, geom::Vec3 q, double& best) const;

    std::vector<Node> nodes_;
    std::int32_t root_ = -1;
};

}  // namespace covdiff::metrics
