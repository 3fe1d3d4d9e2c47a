// Synthetic dataset generation and the line-oriented manifest format:
//   mesh_path,traj_path,category,scale,ox,oy,oz,split
// Paths are stored relative to the manifest file and resolved on load.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "covdiff/geom/mesh.hpp"
#include "covdiff/traj/trajectory.hpp"

namespace covdiff::pipeline {

struct Sample {
    std::string id;  // trajectory file stem
    std::string mesh_path;
    std::string traj_path;
    std::string category;
    double scale = 1.0;
    geom::Vec3 offset;
    std::string split;  // "train" | "test"
};

struct DatasetManifest {
    std::vector<Sample> samples;

    std::vector<const Sample*> split_samples(const std::string& split) const;  // "all" accepted
};

DatasetManifest load_manifest(const std::string& path);
void save_manifest(const DatasetManifest& m, const std::string& path);

struct GeneratorOptions {
    double r_spray = 0.05;
    // Raster pitch 0.8 * 2 * r_spray keeps every face centroid within reach.
    double pitch_factor = 0.8;
    // Pose spacing along a leg, as a fraction of the pitch. Coverage only
    // depends on the leg lines; the spacing sets how many supervision
    // windows each object yields.
    double leg_step_factor = 0.25;
    // Trailing dwell poses round each trajectory up to a multiple of the
    // default segment horizon so training windows tile it exactly.
    std::size_t pose_count_multiple = 16;
};

// n >= 5 objects alternating cuboids and window frames, each with a
// boustrophedon ground-truth trajectory per planar panel (standoff 0,
// orientation = inward panel normal). Writes OBJ + CSV + manifest under
// out_dir; the last floor(n/5) samples are tagged "test".
DatasetManifest generate_synthetic_dataset(std::size_t n, std::uint64_t seed,
                                           const std::string& out_dir,
                                           const GeneratorOptions& opts = {});

}  // namespace covdiff::pipeline
