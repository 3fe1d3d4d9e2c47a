#pragma once

#include <string>
#include <vector>

#include "covdiff/metrics/metrics.hpp"
#include "covdiff/pipeline/dataset.hpp"

namespace covdiff::pipeline {

struct SampleEval {
    std::string id;
    metrics::MetricsReport report;
};

struct RunReport {
    double r_spray = metrics::kDefaultSprayRadius;
    std::vector<std::uint64_t> seeds;  // filled by callers that know them
    std::vector<SampleEval> samples;   // manifest order
    metrics::MetricsReport mean;
    metrics::MetricsReport stddev;  // population standard deviation
};

// Per sample: Chamfer between generated and ground-truth positions (poses
// reduced to 3-d points), mesh coverage by the generated trajectory, and its
// smoothness. Trajectories are read from <traj_dir>/<id>.csv.
RunReport evaluate(const DatasetManifest& manifest, const std::string& traj_dir, double r_spray,
                   const std::string& split = "all");

void recompute_aggregate(RunReport& r);

std::string to_json(const RunReport& r);
RunReport run_report_from_json(const std::string& text);

// Plottable per-sample rows plus mean/std rows.
std::string report_csv(const RunReport& r);
// Fixed-width console table.
std::string report_table(const RunReport& r);

}  // namespace covdiff::pipeline
