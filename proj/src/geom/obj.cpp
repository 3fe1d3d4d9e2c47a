#include "covdiff/geom/obj.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace covdiff::geom {

namespace {

[[noreturn]] void fail(std::size_t line_no, const std::string& why) {
    throw std::runtime_error("obj parse error at line " + std::to_string(line_no) + ": " + why);
}

}  // namespace

TriMesh parse_obj(const std::string& text) {
    TriMesh mesh;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;  // blank
        if (tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 p;
            if (!(ls >> p.x >> p.y >> p.z)) fail(line_no, "malformed vertex");
            std::string extra;
            if (ls >> extra) fail(line_no, "trailing tokens after vertex");
            if (!finite(p)) fail(line_no, "non-finite vertex");
            mesh.vertices.push_back(p);
        } else if (tag == "f") {
            long long a, b, c;
            if (!(ls >> a >> b >> c)) fail(line_no, "malformed face (triangles with plain indices only)");
            std::string extra;
            if (ls >> extra) fail(line_no, "non-triangle face");
            for (long long idx : {a, b, c})
                if (idx < 1 || static_cast<std::size_t>(idx) > mesh.vertices.size())
                    fail(line_no, "face index " + std::to_string(idx) + " out of range");
            mesh.faces.push_back({static_cast<std::uint32_t>(a - 1), static_cast<std::uint32_t>(b - 1),
                                  static_cast<std::uint32_t>(c - 1)});
        } else {
            fail(line_no, "unsupported directive '" + tag + "'");
        }
    }
    return mesh;
}

std::string write_obj(const TriMesh& mesh) {
    std::string out;
    char buf[128];
    for (const Vec3& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v.x, v.y, v.z);
        out += buf;
    }
    for (const auto& f : mesh.faces) {
        std::snprintf(buf, sizeof buf, "f %u %u %u\n", f[0] + 1, f[1] + 1, f[2] + 1);
        out += buf;
    }
    return out;
}

TriMesh read_obj_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open obj file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_obj(ss.str());
}

void write_obj_file(const TriMesh& mesh, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write obj file: " + path);
    out << write_obj(mesh);
}

}  // namespace covdiff::geom
