#include "covdiff/pipeline/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace covdiff::pipeline {

void apply_preset(TrainConfig& cfg, const std::string& name) {
    if (name == "paper") {
        cfg.batch = 128;
        cfg.epochs = 200;
    } else if (name == "desk") {
        cfg.batch = 16;
        cfg.epochs = 50;
    } else {
        throw std::invalid_argument("unknown preset '" + name + "' (paper|desk)");
    }
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

TrainConfig parse_train_config(const std::string& text, const TrainConfig& base) {
    TrainConfig cfg = base;
    std::vector<std::pair<std::string, std::string>> kv;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) + ": expected key = value");
        kv.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    for (const auto& [k, v] : kv)
        if (k == "preset") apply_preset(cfg, v);
    for (const auto& [k, v] : kv) {
        try {
            if (k == "preset") continue;
            else if (k == "lr") cfg.lr = std::stod(v);
            else if (k == "batch") cfg.batch = std::stoull(v);
            else if (k == "epochs") cfg.epochs = std::stoull(v);
            else if (k == "steps") cfg.diffusion_steps = std::stoull(v);
            else if (k == "history") cfg.history_len = std::stoull(v);
            else if (k == "horizon") cfg.horizon = std::stoull(v);
            else if (k == "seed") cfg.seed = std::stoull(v);
            else if (k == "cond_dropout") cfg.cond_dropout = std::stod(v);
            else if (k == "conditioning") cfg.conditioning = policy::conditioning_from_string(v);
            else if (k == "cloud_points") cfg.cloud_points = std::stoull(v);
            else throw std::runtime_error("unknown config key '" + k + "'");
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error("config key '" + k + "': " + e.what());
        }
    }
    if (cfg.lr <= 0 || cfg.batch == 0 || cfg.epochs == 0 || cfg.diffusion_steps == 0 ||
        cfg.history_len == 0 || cfg.horizon == 0 || cfg.cloud_points == 0)
        throw std::runtime_error("config: all numeric fields must be positive");
    return cfg;
}

TrainConfig load_train_config_file(const std::string& path, const TrainConfig& base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_train_config(ss.str(), base);
}

policy::PolicyConfig policy_config_from(const TrainConfig& cfg) {
    policy::PolicyConfig pc;
    pc.den.horizon = cfg.horizon;
    pc.state.in_dim = 6 * cfg.history_len;
    pc.conditioning = cfg.conditioning;
    pc.diffusion_steps = cfg.diffusion_steps;
    return pc;
}

}  // namespace covdiff::pipeline
