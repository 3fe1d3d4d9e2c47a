#include "covdiff/policy/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>

namespace covdiff::policy {

namespace {

struct Entry {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
};

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
public:
    explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return v;
    }
    double f64_at(std::size_t abs) const {
        if (abs + 8 > bytes_.size()) throw std::runtime_error("checkpoint: payload out of range");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[abs + i])) << (8 * i);
        return std::bit_cast<double>(v);
    }
    std::string str(std::size_t n) {
        need(n);
        std::string s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::uint8_t byte() {
        need(1);
        return static_cast<std::uint8_t>(bytes_[pos_++]);
    }
    std::size_t pos() const { return pos_; }

private:
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size()) throw std::runtime_error("checkpoint: truncated file");
    }
    std::string bytes_;
    std::size_t pos_ = 0;
};

Entry meta_scalar(const std::string& name, double v) { return {name, 1, 1, {v}}; }

}  // namespace

void save_checkpoint(const Policy& policy, const std::string& path) {
    const auto& cfg = policy.config();
    std::vector<Entry> entries;
    entries.push_back(meta_scalar("meta.horizon", static_cast<double>(cfg.den.horizon)));
    entries.push_back(meta_scalar("meta.steps", static_cast<double>(cfg.diffusion_steps)));
    entries.push_back(meta_scalar("meta.conditioning", static_cast<double>(static_cast<int>(cfg.conditioning))));
    entries.push_back(meta_scalar("meta.hidden", static_cast<double>(cfg.den.hidden)));
    entries.push_back(meta_scalar("meta.blocks", static_cast<double>(cfg.den.blocks)));
    entries.push_back(meta_scalar("meta.time_dim", static_cast<double>(cfg.den.time_dim)));
    entries.push_back(meta_scalar("meta.cond_dim", static_cast<double>(cfg.den.cond_dim)));
    entries.push_back(meta_scalar("meta.geo_in", static_cast<double>(cfg.geo.in_dim)));
    entries.push_back(meta_scalar("meta.geo_out", static_cast<double>(cfg.geo.out_dim)));
    Entry widths{"meta.geo_widths", 1, cfg.geo.block_widths.size(), {}};
    for (auto w : cfg.geo.block_widths) widths.values.push_back(static_cast<double>(w));
    entries.push_back(widths);
    entries.push_back(meta_scalar("meta.state_in", static_cast<double>(cfg.state.in_dim)));
    entries.push_back(meta_scalar("meta.state_hidden", static_cast<double>(cfg.state.hidden)));
    entries.push_back(meta_scalar("meta.state_out", static_cast<double>(cfg.state.out_dim)));

    const auto& store = policy.params();
    for (std::size_t i = 0; i < store.count(); ++i) {
        const auto& t = store[i];
        entries.push_back({t.name, t.value.rows, t.value.cols, t.value.data});
    }

    std::string manifest;
    std::string payload;
    put_u32(manifest, static_cast<std::uint32_t>(entries.size()));
    for (const auto& e : entries) {
        put_u32(manifest, static_cast<std::uint32_t>(e.name.size()));
        manifest += e.name;
        put_u32(manifest, static_cast<std::uint32_t>(e.rows));
        put_u32(manifest, static_cast<std::uint32_t>(e.cols));
        put_u64(manifest, payload.size());  // byte offset into the payload section
        for (double v : e.values) put_f64(payload, v);
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out.write(kCheckpointMagic, 4);
    char version = static_cast<char>(kCheckpointVersion);
    out.write(&version, 1);
    out.write(manifest.data(), static_cast<std::streamsize>(manifest.size()));
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

Policy load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Reader r(std::move(bytes));
    if (r.str(4) != std::string(kCheckpointMagic, 4))
        throw std::runtime_error("checkpoint: bad magic in " + path);
    if (r.byte() != kCheckpointVersion) throw std::runtime_error("checkpoint: unsupported version");

    struct RawEntry {
        std::size_t rows, cols;
        std::uint64_t offset;
    };
    std::map<std::string, RawEntry> raw;
    std::uint32_t n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
        std::uint32_t len = r.u32();
        std::string name = r.str(len);
        std::uint32_t rows = r.u32();
        std::uint32_t cols = r.u32();
        std::uint64_t off = r.u64();
        raw[name] = {rows, cols, off};
    }
    const std::size_t payload_start = r.pos();

    auto fetch = [&](const std::string& name) -> std::vector<double> {
        auto it = raw.find(name);
        if (it == raw.end()) throw std::runtime_error("checkpoint: missing entry " + name);
        std::vector<double> v(it->second.rows * it->second.cols);
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = r.f64_at(payload_start + it->second.offset + 8 * i);
        return v;
    };
    auto scalar = [&](const std::string& name) -> std::size_t {
        return static_cast<std::size_t>(fetch(name)[0]);
    };

    PolicyConfig cfg;
    cfg.den.horizon = scalar("meta.horizon");
    cfg.diffusion_steps = scalar("meta.steps");
    cfg.conditioning = static_cast<Conditioning>(scalar("meta.conditioning"));
    cfg.den.hidden = scalar("meta.hidden");
    cfg.den.blocks = scalar("meta.blocks");
    cfg.den.time_dim = scalar("meta.time_dim");
    cfg.den.cond_dim = scalar("meta.cond_dim");
    cfg.geo.in_dim = scalar("meta.geo_in");
    cfg.geo.out_dim = scalar("meta.geo_out");
    cfg.geo.block_widths.clear();
    for (double w : fetch("meta.geo_widths")) cfg.geo.block_widths.push_back(static_cast<std::size_t>(w));
    cfg.state.in_dim = scalar("meta.state_in");
    cfg.state.hidden = scalar("meta.state_hidden");
    cfg.state.out_dim = scalar("meta.state_out");

    Policy policy(cfg, /*init_seed=*/0);
    auto& store = policy.params();
    for (std::size_t i = 0; i < store.count(); ++i) {
        auto& t = store[i];
        auto it = raw.find(t.name);
        if (it == raw.end()) throw std::runtime_error("checkpoint: missing tensor " + t.name);
        if (it->second.rows != t.value.rows || it->second.cols != t.value.cols)
            throw std::runtime_error("checkpoint: shape mismatch for " + t.name);
        t.value.data = fetch(t.name);
    }
    return policy;
}

}  // namespace covdiff::policy
