#include "covdiff/pipeline/evaluate.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include <json.hpp>

#include "covdiff/geom/obj.hpp"
#include "covdiff/traj/csv.hpp"

namespace fs = std::filesystem;

namespace covdiff::pipeline {

using metrics::MetricsReport;

namespace {

double field(const MetricsReport& r, std::size_t i) {
    switch (i) {
        case 0: return r.pcd_sum;
        case 1: return r.pcd_mean;
        case 2: return r.coverage_overlap;
        case 3: return r.coverage_area;
        case 4: return r.smoothness;
        default: return r.r_spray;
    }
}

void set_field(MetricsReport& r, std::size_t i, double v) {
    switch (i) {
        case 0: r.pcd_sum = v; break;
        case 1: r.pcd_mean = v; break;
        case 2: r.coverage_overlap = v; break;
        case 3: r.coverage_area = v; break;
        case 4: r.smoothness = v; break;
        default: r.r_spray = v; break;
    }
}

constexpr const char* kFieldNames[6] = {"pcd_sum",       "pcd_mean",   "coverage_overlap",
                                        "coverage_area", "smoothness", "r_spray"};

nlohmann::json report_to_json_obj(const MetricsReport& r) {
    nlohmann::json j;
    for (std::size_t i = 0; i < 6; ++i) j[kFieldNames[i]] = field(r, i);
    return j;
}

MetricsReport report_from_json_obj(const nlohmann::json& j) {
    MetricsReport r;
    for (std::size_t i = 0; i < 6; ++i) set_field(r, i, j.at(kFieldNames[i]).get<double>());
    return r;
}

}  // namespace

void recompute_aggregate(RunReport& r) {
    const std::size_t n = r.samples.size();
    if (n == 0) return;
    for (std::size_t i = 0; i < 6; ++i) {
        double mean = 0.0;
        for (const auto& s : r.samples) mean += field(s.report, i);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (const auto& s : r.samples) {
            double d = field(s.report, i) - mean;
            var += d * d;
        }
        var /= static_cast<double>(n);
        set_field(r.mean, i, mean);
        set_field(r.stddev, i, std::sqrt(var));
    }
}

RunReport evaluate(const DatasetManifest& manifest, const std::string& traj_dir, double r_spray,
                   const std::string& split) {
    auto samples = manifest.split_samples(split);
    if (samples.empty()) throw std::runtime_error("evaluate: no samples in split '" + split + "'");
    RunReport run;
    run.r_spray = r_spray;
    for (const Sample* s : samples) {
        fs::path traj_path = fs::path(traj_dir) / (s->id + ".csv");
        if (!fs::exists(traj_path))
            throw std::runtime_error("evaluate: missing trajectory for sample " + s->id + ": " +
                                     traj_path.string());
        geom::TriMesh mesh = geom::read_obj_file(s->mesh_path);
        traj::TrajectorySet gt = traj::read_traj_csv_file(s->traj_path);
        traj::TrajectorySet gen = traj::read_traj_csv_file(traj_path.string());

        auto gen_pts = traj::all_positions(gen);
        auto gt_pts = traj::all_positions(gt);
        if (gen_pts.empty())
            throw std::runtime_error("evaluate: sample " + s->id + ": chamfer: point sets must be non-empty");

        SampleEval ev;
        ev.id = s->id;
        auto cd = metrics::chamfer(gen_pts, gt_pts);
        ev.report.pcd_sum = cd.sum;
        ev.report.pcd_mean = cd.mean;
        ev.report.coverage_overlap = metrics::overlap_coverage(mesh, gen, r_spray);
        ev.report.coverage_area = metrics::area_coverage(mesh, gen, r_spray);
        ev.report.smoothness = metrics::smoothness(gen);
        ev.report.r_spray = r_spray;
        run.samples.push_back(std::move(ev));
    }
    recompute_aggregate(run);
    return run;
}

std::string to_json(const RunReport& r) {
    nlohmann::json j;
    j["r_spray"] = r.r_spray;
    j["seeds"] = r.seeds;
    j["samples"] = nlohmann::json::array();
    for (const auto& s : r.samples) {
        nlohmann::json row = report_to_json_obj(s.report);
        row["id"] = s.id;
        j["samples"].push_back(row);
    }
    j["aggregate"] = {{"mean", report_to_json_obj(r.mean)}, {"std", report_to_json_obj(r.stddev)}};
    return j.dump(2) + "\n";
}

RunReport run_report_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    RunReport r;
    r.r_spray = j.at("r_spray").get<double>();
    for (const auto& s : j.at("seeds")) r.seeds.push_back(s.get<std::uint64_t>());
    for (const auto& row : j.at("samples")) {
        SampleEval ev;
        ev.id = row.at("id").get<std::string>();
        ev.report = report_from_json_obj(row);
        r.samples.push_back(std::move(ev));
    }
    r.mean = report_from_json_obj(j.at("aggregate").at("mean"));
    r.stddev = report_from_json_obj(j.at("aggregate").at("std"));
    return r;
}

std::string report_csv(const RunReport& r) {
    std::string out = "id,pcd_sum,pcd_mean,coverage_overlap,coverage_area,smoothness,r_spray\n";
    char buf[320];
    auto row = [&](const std::string& id, const MetricsReport& m) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", id.c_str(),
                      m.pcd_sum, m.pcd_mean, m.coverage_overlap, m.coverage_area, m.smoothness,
                      m.r_spray);
        out += buf;
    };
    for (const auto& s : r.samples) row(s.id, s.report);
    row("mean", r.mean);
    row("std", r.stddev);
    return out;
}

std::string report_table(const RunReport& r) {
    std::string out;
    char buf[320];
    std::snprintf(buf, sizeof buf, "%-12s %12s %12s %10s %10s %12s\n", "sample", "pcd_sum",
                  "pcd_mean", "cov_olap", "cov_area", "smoothness");
    out += buf;
    auto row = [&](const std::string& id, const MetricsReport& m) {
        std::snprintf(buf, sizeof buf, "%-12s %12.6g %12.6g %10.4f %10.4f %12.6g\n", id.c_str(),
                      m.pcd_sum, m.pcd_mean, m.coverage_overlap, m.coverage_area, m.smoothness);
        out += buf;
    };
    for (const auto& s : r.samples) row(s.id, s.report);
    row("mean", r.mean);
    row("std", r.stddev);
    return out;
}

}  // namespace covdiff::pipeline
