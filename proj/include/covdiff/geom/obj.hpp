// Line-oriented OBJ subset: `v x y z`, `f i j k` (1-based, triangles only),
// `#` comments and blank lines. Anything else is a parse error with its
// line number.
#pragma once

#include <string>

#include "covdiff/geom/mesh.hpp"

namespace covdiff::geom {

TriMesh parse_obj(const std::string& text);
std::string write_obj(const TriMesh& mesh);

TriMesh read_obj_file(const std::string& path);
void write_obj_file(const TriMesh& mesh, const std::string& path);

}  // namespace covdiff::geom
