#pragma once

#include <algorithm>

#include "covdiff/geom/vec3.hpp"

namespace covdiff::geom {

struct Segment {
    Vec3 a;
    Vec3 b;
};

struct PointSegmentResult {
    double distance;
    double t;  // clipped projection parameter in [0, 1]
};

// Distance from c to the segment ps->pe with the projection parameter
// clipped to [0, 1]. A zero-length segment yields t = 0 and |c - ps|.
inline PointSegmentResult point_segment_distance(Vec3 c, Vec3 ps, Vec3 pe) {
    Vec3 d = pe - ps;
    double len2 = norm2(d);
    if (len2 == 0.0) return {norm(c - ps), 0.0};
    double t = std::clamp(dot(c - ps, d) / len2, 0.0, 1.0);
    return {norm(c - (ps + t * d)), t};
}

}  // namespace covdiff::geom
