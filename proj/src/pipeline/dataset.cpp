#include "covdiff/pipeline/dataset.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "covdiff/geom/obj.hpp"
#include "covdiff/num/rng.hpp"
#include "covdiff/traj/csv.hpp"

namespace fs = std::filesystem;

namespace covdiff::pipeline {

using geom::TriMesh;
using geom::Vec3;

std::vector<const Sample*> DatasetManifest::split_samples(const std::string& split) const {
    std::vector<const Sample*> out;
    for (const auto& s : samples)
        if (split == "all" || s.split == split) out.push_back(&s);
    return out;
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path);
    fs::path base = fs::path(path).parent_path();
    DatasetManifest m;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() != 8)
            throw std::runtime_error("manifest line " + std::to_string(line_no) + ": expected 8 fields");
        Sample s;
        s.mesh_path = (base / fields[0]).string();
        s.traj_path = (base / fields[1]).string();
        s.category = fields[2];
        s.scale = std::stod(fields[3]);
        s.offset = {std::stod(fields[4]), std::stod(fields[5]), std::stod(fields[6])};
        s.split = fields[7];
        if (s.split != "train" && s.split != "test")
            throw std::runtime_error("manifest line " + std::to_string(line_no) + ": bad split '" + s.split + "'");
        s.id = fs::path(fields[1]).stem().string();
        m.samples.push_back(std::move(s));
    }
    return m;
}

void save_manifest(const DatasetManifest& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    fs::path base = fs::path(path).parent_path();
    char buf[512];
    for (const auto& s : m.samples) {
        std::string mesh_rel = fs::relative(s.mesh_path, base).string();
        std::string traj_rel = fs::relative(s.traj_path, base).string();
        std::snprintf(buf, sizeof buf, "%s,%s,%s,%.17g,%.17g,%.17g,%.17g,%s\n", mesh_rel.c_str(),
                      traj_rel.c_str(), s.category.c_str(), s.scale, s.offset.x, s.offset.y,
                      s.offset.z, s.split.c_str());
        out << buf;
    }
}

namespace {

struct Panel {
    Vec3 origin;  // one corner
    Vec3 u_dir;   // unit, leg direction
    Vec3 v_dir;   // unit, pitch direction
    double u_len;
    double v_len;
    Vec3 inward;  // spray orientation
};

std::vector<Panel> cuboid_panels(double w, double h, double d, Vec3 c) {
    const double x = w / 2, y = h / 2, z = d / 2;
    std::vector<Panel> p;
    p.push_back({c + Vec3{-x, -y, -z}, {1, 0, 0}, {0, 1, 0}, w, h, {0, 0, 1}});    // bottom
    p.push_back({c + Vec3{-x, -y, z}, {1, 0, 0}, {0, 1, 0}, w, h, {0, 0, -1}});    // top
    p.push_back({c + Vec3{-x, -y, -z}, {1, 0, 0}, {0, 0, 1}, w, d, {0, 1, 0}});    // front
    p.push_back({c + Vec3{-x, y, -z}, {1, 0, 0}, {0, 0, 1}, w, d, {0, -1, 0}});    // back
    p.push_back({c + Vec3{-x, -y, -z}, {0, 1, 0}, {0, 0, 1}, h, d, {1, 0, 0}});    // left
    p.push_back({c + Vec3{x, -y, -z}, {0, 1, 0}, {0, 0, 1}, h, d, {-1, 0, 0}});    // right
    return p;
}

std::vector<Panel> frame_panels(double outer, double inner, double thickness, Vec3 c) {
    const double o = outer / 2, i = inner / 2, z = thickness / 2;
    const double bar = o - i;
    std::vector<Panel> p;
    for (double zz : {z, -z}) {
        Vec3 inw{0, 0, zz > 0 ? -1.0 : 1.0};
        p.push_back({c + Vec3{-o, i, zz}, {1, 0, 0}, {0, 1, 0}, outer, bar, inw});    // top bar
        p.push_back({c + Vec3{-o, -o, zz}, {1, 0, 0}, {0, 1, 0}, outer, bar, inw});   // bottom bar
        p.push_back({c + Vec3{-o, -i, zz}, {0, 1, 0}, {1, 0, 0}, inner, bar, inw});   // left bar
        p.push_back({c + Vec3{i, -i, zz}, {0, 1, 0}, {1, 0, 0}, inner, bar, inw});    // right bar
    }
    // Outer walls.
    p.push_back({c + Vec3{-o, -o, -z}, {1, 0, 0}, {0, 0, 1}, outer, thickness, {0, 1, 0}});
    p.push_back({c + Vec3{-o, o, -z}, {1, 0, 0}, {0, 0, 1}, outer, thickness, {0, -1, 0}});
    p.push_back({c + Vec3{-o, -o, -z}, {0, 1, 0}, {0, 0, 1}, outer, thickness, {1, 0, 0}});
    p.push_back({c + Vec3{o, -o, -z}, {0, 1, 0}, {0, 0, 1}, outer, thickness, {-1, 0, 0}});
    // Hole walls; spray from inside the opening.
    p.push_back({c + Vec3{-i, -i, -z}, {1, 0, 0}, {0, 0, 1}, inner, thickness, {0, -1, 0}});
    p.push_back({c + Vec3{-i, i, -z}, {1, 0, 0}, {0, 0, 1}, inner, thickness, {0, 1, 0}});
    p.push_back({c + Vec3{-i, -i, -z}, {0, 1, 0}, {0, 0, 1}, inner, thickness, {-1, 0, 0}});
    p.push_back({c + Vec3{i, -i, -z}, {0, 1, 0}, {0, 0, 1}, inner, thickness, {1, 0, 0}});
    return p;
}

// Back-and-forth legs along u, spaced along v so no panel point is farther
// than half the effective pitch from a leg.
traj::Stroke raster_panel(const Panel& p, double pitch, double step) {
    traj::Stroke s;
    const std::size_t legs = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(p.v_len / pitch)));
    const double spacing = p.v_len / static_cast<double>(legs);
    const std::size_t per_leg = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(p.u_len / step)) + 1);
    for (std::size_t j = 0; j < legs; ++j) {
        const double v_off = spacing * (static_cast<double>(j) + 0.5);
        const Vec3 leg_start = p.origin + v_off * p.v_dir;
        for (std::size_t t = 0; t < per_leg; ++t) {
            double frac = static_cast<double>(t) / static_cast<double>(per_leg - 1);
            if (j % 2 == 1) frac = 1.0 - frac;  // boustrophedon turn
            s.poses.push_back({leg_start + frac * p.u_len * p.u_dir, p.inward});
        }
    }
    return s;
}

}  // namespace

DatasetManifest generate_synthetic_dataset(std::size_t n, std::uint64_t seed,
                                           const std::string& out_dir, const GeneratorOptions& opts) {
    if (n < 5) throw std::invalid_argument("generate_synthetic_dataset: n must be >= 5");
    std::error_code ec;
    fs::create_directories(fs::path(out_dir) / "meshes", ec);
    fs::create_directories(fs::path(out_dir) / "gt", ec);
    if (!fs::is_directory(fs::path(out_dir) / "meshes") || !fs::is_directory(fs::path(out_dir) / "gt"))
        throw std::runtime_error("generate_synthetic_dataset: cannot create output directory " + out_dir);

    num::Rng rng(seed);
    const double pitch = opts.pitch_factor * 2.0 * opts.r_spray;
    const std::size_t n_test = n / 5;

    DatasetManifest manifest;
    for (std::size_t idx = 0; idx < n; ++idx) {
        Vec3 center{rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)};
        TriMesh mesh;
        std::vector<Panel> panels;
        std::string category;
        if (idx % 2 == 0) {
            category = "cuboid";
            double w = rng.uniform(0.25, 0.5), h = rng.uniform(0.25, 0.5), d = rng.uniform(0.25, 0.5);
            mesh = geom::make_cuboid(w, h, d);
            panels = cuboid_panels(w, h, d, center);
        } else {
            category = "frame";
            double outer = rng.uniform(0.3, 0.5);
            double inner = outer * rng.uniform(0.4, 0.6);
            double thickness = rng.uniform(0.06, 0.12);
            mesh = geom::make_frame(outer, inner, thickness);
            panels = frame_panels(outer, inner, thickness, center);
        }
        for (auto& v : mesh.vertices) v = v + center;

        traj::TrajectorySet gt;
        for (const Panel& p : panels)
            gt.strokes.push_back(raster_panel(p, pitch, pitch * opts.leg_step_factor));
        if (opts.pose_count_multiple > 1) {
            std::size_t total = traj::total_pose_count(gt);
            std::size_t rem = total % opts.pose_count_multiple;
            if (rem != 0) {
                auto& last = gt.strokes.back().poses;
                for (std::size_t k = rem; k < opts.pose_count_multiple; ++k) last.push_back(last.back());
            }
        }

        geom::NormalizeTransform tf;
        (void)geom::normalize_to_unit(mesh, tf);

        char name[32];
        std::snprintf(name, sizeof name, "obj_%03zu", idx);
        Sample s;
        s.id = name;
        s.mesh_path = (fs::path(out_dir) / "meshes" / (std::string(name) + ".obj")).string();
        s.traj_path = (fs::path(out_dir) / "gt" / (std::string(name) + ".csv")).string();
        s.category = category;
        s.scale = tf.scale;
        s.offset = tf.offset;
        s.split = (idx >= n - n_test) ? "test" : "train";

        geom::write_obj_file(mesh, s.mesh_path);
        gt.object_id = s.id;
        gt.transform = tf;
        traj::write_traj_csv_file(gt, s.traj_path);
        manifest.samples.push_back(std::move(s));
    }
    save_manifest(manifest, (fs::path(out_dir) / "manifest.txt").string());
    return manifest;
}

}  // namespace covdiff::pipeline
