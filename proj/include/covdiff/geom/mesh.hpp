#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "covdiff/geom/vec3.hpp"

namespace covdiff::geom {

struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> faces;  // indices into vertices
};

// Throws if any face index is out of range.
void validate(const TriMesh& mesh);

Vec3 face_centroid(const TriMesh& mesh, std::size_t face_index);
// Degenerate faces return 0.
double face_area(const TriMesh& mesh, std::size_t face_index);
double total_area(const TriMesh& mesh);

// Axis-aligned box centered at the origin with extents w, h, d along x, y, z.
// Watertight, 8 vertices, 12 faces, outward winding.
TriMesh make_cuboid(double w, double h, double d);

// Window-like rectangular frame: outer square side `outer`, square hole side
// `inner`, depth `thickness` along z, centered at the origin. Front and back
// rings are each four bars; outer and inner walls close the solid.
TriMesh make_frame(double outer, double inner, double thickness);

struct NormalizeTransform {
    double scale = 1.0;  // max bounding-box extent of the input
    Vec3 offset;         // bounding-box center of the input
};

// Output is centered at the origin with max extent 1: p' = (p - offset)/scale.
// Throws on a zero-extent input.
NormalizeTransform normalize_to_unit(std::vector<Vec3>& points);
TriMesh normalize_to_unit(const TriMesh& mesh, NormalizeTransform& out_transform);

inline Vec3 denormalize(Vec3 p, const NormalizeTransform& t) { return t.scale * p + t.offset; }
inline Vec3 normalize(Vec3 p, const NormalizeTransform& t) { return (p - t.offset) / t.scale; }

struct PointCloud {
    std::vector<Vec3> points;
};

inline constexpr std::size_t kDefaultCloudSize = 5120;

}  // namespace covdiff::geom
