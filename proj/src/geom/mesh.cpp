#include "covdiff/geom/mesh.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace covdiff::geom {

void validate(const TriMesh& mesh) {
    for (std::size_t f = 0; f < mesh.faces.size(); ++f)
        for (std::uint32_t idx : mesh.faces[f])
            if (idx >= mesh.vertices.size())
                throw std::invalid_argument("mesh: face " + std::to_string(f) + " index " + std::to_string(idx) + " out of range");
}

Vec3 face_centroid(const TriMesh& mesh, std::size_t face_index) {
    const auto& f = mesh.faces.at(face_index);
    return (mesh.vertices[f[0]] + mesh.vertices[f[1]] + mesh.vertices[f[2]]) / 3.0;
}

double face_area(const TriMesh& mesh, std::size_t face_index) {
    const auto& f = mesh.faces.at(face_index);
    Vec3 a = mesh.vertices[f[1]] - mesh.vertices[f[0]];
    Vec3 b = mesh.vertices[f[2]] - mesh.vertices[f[0]];
    return 0.5 * norm(cross(a, b));
}

double total_area(const TriMesh& mesh) {
    double sum = 0.0;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) sum += face_area(mesh, f);
    return sum;
}

TriMesh make_cuboid(double w, double h, double d) {
    if (w <= 0.0 || h <= 0.0 || d <= 0.0)
        throw std::invalid_argument("make_cuboid: dimensions must be positive");
    const double x = w / 2.0, y = h / 2.0, z = d / 2.0;
    TriMesh m;
    m.vertices = {{-x, -y, -z}, {x, -y, -z}, {x, y, -z}, {-x, y, -z},
                  {-x, -y, z},  {x, -y, z},  {x, y, z},  {-x, y, z}};
    m.faces = {{0, 2, 1}, {0, 3, 2},   // bottom (-z)
               {4, 5, 6}, {4, 6, 7},   // top (+z)
               {0, 1, 5}, {0, 5, 4},   // front (-y)
               {3, 7, 6}, {3, 6, 2},   // back (+y)
               {0, 4, 7}, {0, 7, 3},   // left (-x)
               {1, 2, 6}, {1, 6, 5}};  // right (+x)
    return m;
}

namespace {

// Appends an oriented quad as two triangles; corners in order around the rim.
void add_quad(TriMesh& m, Vec3 a, Vec3 b, Vec3 c, Vec3 d) {
    std::uint32_t base = static_cast<std::uint32_t>(m.vertices.size());
    m.vertices.insert(m.vertices.end(), {a, b, c, d});
    m.faces.push_back({base, base + 1, base + 2});
    m.faces.push_back({base, base + 2, base + 3});
}

}  // namespace

TriMesh make_frame(double outer, double inner, double thickness) {
    if (outer <= 0.0 || inner <= 0.0 || thickness <= 0.0)
        throw std::invalid_argument("make_frame: dimensions must be positive");
    if (inner >= outer) throw std::invalid_argument("make_frame: inner must be < outer");
    const double o = outer / 2.0, i = inner / 2.0, z = thickness / 2.0;
    TriMesh m;
    for (double zz : {z, -z}) {
        // Ring as four bars: full-width top/bottom, short left/right.
        add_quad(m, {-o, i, zz}, {o, i, zz}, {o, o, zz}, {-o, o, zz});      // top bar
        add_quad(m, {-o, -o, zz}, {o, -o, zz}, {o, -i, zz}, {-o, -i, zz});  // bottom bar
        add_quad(m, {-o, -i, zz}, {-i, -i, zz}, {-i, i, zz}, {-o, i, zz});  // left bar
        add_quad(m, {i, -i, zz}, {o, -i, zz}, {o, i, zz}, {i, i, zz});      // right bar
    }
    // Outer walls.
    add_quad(m, {-o, -o, -z}, {o, -o, -z}, {o, -o, z}, {-o, -o, z});
    add_quad(m, {-o, o, -z}, {o, o, -z}, {o, o, z}, {-o, o, z});
    add_quad(m, {-o, -o, -z}, {-o, o, -z}, {-o, o, z}, {-o, -o, z});
    add_quad(m, {o, -o, -z}, {o, o, -z}, {o, o, z}, {o, -o, z});
    // Inner hole walls.
    add_quad(m, {-i, -i, -z}, {i, -i, -z}, {i, -i, z}, {-i, -i, z});
    add_quad(m, {-i, i, -z}, {i, i, -z}, {i, i, z}, {-i, i, z});
    add_quad(m, {-i, -i, -z}, {-i, i, -z}, {-i, i, z}, {-i, -i, z});
    add_quad(m, {i, -i, -z}, {i, i, -z}, {i, i, z}, {i, -i, z});
    return m;
}

namespace {

NormalizeTransform bbox_transform(const std::vector<Vec3>& pts) {
    if (pts.empty()) throw std::invalid_argument("normalize_to_unit: empty input");
    Vec3 lo = pts[0], hi = pts[0];
    for (const Vec3& p : pts) {
        lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y); lo.z = std::min(lo.z, p.z);
        hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y); hi.z = std::max(hi.z, p.z);
    }
    Vec3 extent = hi - lo;
    double scale = std::max({extent.x, extent.y, extent.z});
    if (scale <= 0.0) throw std::invalid_argument("normalize_to_unit: zero-extent input");
    return {scale, 0.5 * (lo + hi)};
}

}  // namespace

NormalizeTransform normalize_to_unit(std::vector<Vec3>& points) {
    NormalizeTransform t = bbox_transform(points);
    for (Vec3& p : points) p = normalize(p, t);
    return t;
}

TriMesh normalize_to_unit(const TriMesh& mesh, NormalizeTransform& out_transform) {
    TriMesh out = mesh;
    out_transform = bbox_transform(out.vertices);
    for (Vec3& v : out.vertices) v = normalize(v, out_transform);
    return out;
}

}  // namespace covdiff::geom
