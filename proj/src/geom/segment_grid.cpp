#include "covdiff/geom/segment_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace covdiff::geom {

namespace {

long long cell_of(double x, double cell) { return static_cast<long long>(std::floor(x / cell)); }

}  // namespace

SegmentGrid::Key SegmentGrid::key(long long ix, long long iy, long long iz) {
    constexpr long long kBias = 1ll << 20;  // 21 bits per axis
    return (static_cast<Key>(ix + kBias) << 42) | (static_cast<Key>(iy + kBias) << 21) |
           static_cast<Key>(iz + kBias);
}

SegmentGrid::SegmentGrid(const std::vector<Segment>& segments, double cell_size)
    : cell_(cell_size), n_segments_(segments.size()) {
    if (cell_size <= 0.0) throw std::invalid_argument("SegmentGrid: cell_size must be > 0");
    for (std::uint32_t s = 0; s < segments.size(); ++s) {
        const Segment& seg = segments[s];
        long long x0 = cell_of(std::min(seg.a.x, seg.b.x), cell_);
        long long x1 = cell_of(std::max(seg.a.x, seg.b.x), cell_);
        long long y0 = cell_of(std::min(seg.a.y, seg.b.y), cell_);
        long long y1 = cell_of(std::max(seg.a.y, seg.b.y), cell_);
        long long z0 = cell_of(std::min(seg.a.z, seg.b.z), cell_);
        long long z1 = cell_of(std::max(seg.a.z, seg.b.z), cell_);
        for (long long ix = x0; ix <= x1; ++ix)
            for (long long iy = y0; iy <= y1; ++iy)
                for (long long iz = z0; iz <= z1; ++iz) cells_[key(ix, iy, iz)].push_back(s);
    }
}

std::vector<std::uint32_t> SegmentGrid::query_candidates(Vec3 point, double radius) const {
    long long x0 = cell_of(point.x - radius, cell_), x1 = cell_of(point.x + radius, cell_);
    long long y0 = cell_of(point.y - radius, cell_), y1 = cell_of(point.y + radius, cell_);
    long long z0 = cell_of(point.z - radius, cell_), z1 = cell_of(point.z + radius, cell_);
    std::vector<std::uint32_t> out;
    for (long long ix = x0; ix <= x1; ++ix)
        for (long long iy = y0; iy <= y1; ++iy)
            for (long long iz = z0; iz <= z1; ++iz) {
                auto it = cells_.find(key(ix, iy, iz));
                if (it == cells_.end()) continue;
                out.insert(out.end(), it->second.begin(), it->second.end());
            }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace covdiff::geom
