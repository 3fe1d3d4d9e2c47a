#include "covdiff/geom/sample.hpp"

#include <algorithm>
#include <stdexcept>

namespace covdiff::geom {

PointCloud sample_surface(const TriMesh& mesh, std::size_t n, std::uint64_t seed) {
    if (mesh.faces.empty()) throw std::invalid_argument("sample_surface: mesh has no faces");
    std::vector<double> cum(mesh.faces.size());
    double acc = 0.0;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        acc += face_area(mesh, f);
        cum[f] = acc;
    }
    if (acc <= 0.0) throw std::invalid_argument("sample_surface: mesh has zero total area");

    num::Rng rng(seed);
    PointCloud cloud;
    cloud.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double r = rng.uniform() * acc;
        std::size_t f = std::lower_bound(cum.begin(), cum.end(), r) - cum.begin();
        if (f >= mesh.faces.size()) f = mesh.faces.size() - 1;
        double u = rng.uniform();
        double v = rng.uniform();
        if (u + v > 1.0) {  // reflect into the triangle
            u = 1.0 - u;
            v = 1.0 - v;
        }
        const auto& face = mesh.faces[f];
        Vec3 a = mesh.vertices[face[0]], b = mesh.vertices[face[1]], c = mesh.vertices[face[2]];
        cloud.points.push_back(a + u * (b - a) + v * (c - a));
    }
    return cloud;
}

}  // namespace covdiff::geom
