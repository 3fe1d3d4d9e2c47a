#include "covdiff/traj/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace covdiff::traj {

namespace {

constexpr const char* kHeader = "stroke,step,px,py,pz,ox,oy,oz";

[[noreturn]] void fail(std::size_t row_no, const std::string& why) {
    throw std::runtime_error("trajectory csv error at row " + std::to_string(row_no) + ": " + why);
}

}  // namespace

TrajectorySet read_traj_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t row_no = 0;
    if (!std::getline(in, line)) throw std::runtime_error("trajectory csv error: empty input");
    ++row_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) fail(row_no, "expected header '" + std::string(kHeader) + "'");

    TrajectorySet out;
    long long cur_stroke = -1;
    long long cur_step = -1;
    while (std::getline(in, line)) {
        ++row_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        long long stroke_id, step;
        double px, py, pz, ox, oy, oz;
        char tail;
        int got = std::sscanf(line.c_str(), "%lld,%lld,%lf,%lf,%lf,%lf,%lf,%lf%c", &stroke_id, &step,
                              &px, &py, &pz, &ox, &oy, &oz, &tail);
        if (got != 8) fail(row_no, "malformed row");
        if (stroke_id != cur_stroke) {
            if (stroke_id < cur_stroke) fail(row_no, "stroke ids must be non-decreasing");
            out.strokes.emplace_back();
            cur_stroke = stroke_id;
            cur_step = -1;
        }
        if (step <= cur_step) fail(row_no, "steps must be strictly increasing within a stroke");
        cur_step = step;
        geom::Vec3 o{ox, oy, oz};
        double n = norm(o);
        if (std::fabs(n - 1.0) > 1e-3) fail(row_no, "orientation norm " + std::to_string(n) + " not within 1e-3 of unit");
        o = o / n;
        out.strokes.back().poses.push_back({{px, py, pz}, o});
    }
    return out;
}

std::string write_traj_csv(const TrajectorySet& t) {
    std::string out = kHeader;
    out += '\n';
    char buf[256];
    for (std::size_t s = 0; s < t.strokes.size(); ++s) {
        const auto& poses = t.strokes[s].poses;
        for (std::size_t i = 0; i < poses.size(); ++i) {
            const Pose6& p = poses[i];
            std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s, i,
                          p.position.x, p.position.y, p.position.z, p.orientation.x, p.orientation.y,
                          p.orientation.z);
            out += buf;
        }
    }
    return out;
}

TrajectorySet read_traj_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open trajectory csv: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return read_traj_csv(ss.str());
}

void write_traj_csv_file(const TrajectorySet& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write trajectory csv: " + path);
    out << write_traj_csv(t);
}

}  // namespace covdiff::traj
