#pragma once

#include "covdiff/geom/mesh.hpp"
#include "covdiff/num/rng.hpp"

namespace covdiff::geom {

// n points drawn by area-weighted face choice, then uniform barycentric
// coordinates. Deterministic per seed. Throws if the mesh has no area.
PointCloud sample_surface(const TriMesh& mesh, std::size_t n, std::uint64_t seed);

}  // namespace covdiff::geom
