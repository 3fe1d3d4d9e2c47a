// Seeded PCG32 (XSH-RR 64/32, fixed stream constant) with Box-Muller
// Gaussians. Integer state only, so the stream for a given seed is
// bitwise identical on every platform.
#pragma once

#include <cstdint>
#include <vector>

namespace covdiff::num {

class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    // Uniform in [0, 1), 53 random bits.
    double uniform();
    // Uniform in [lo, hi).
    double uniform(double lo, double hi);
    // Uniform integer in [0, n), n >= 1.
    std::uint64_t below(std::uint64_t n);

    // Standard normal via Box-Muller; second sample of each pair is cached.
    double gaussian();

    std::vector<double> gaussian_vec(std::size_t n);

private:
    static constexpr std::uint64_t kMul = 6364136223846793005ULL;
    static constexpr std::uint64_t kInc = 1442695040888963407ULL;

    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace covdiff::num
