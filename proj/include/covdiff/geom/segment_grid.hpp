// Uniform spatial hash over line segments, used as a conservative broad
// phase: a query returns a superset of every segment within `radius` of the
// point. Segments are registered in every cell their AABB overlaps and a
// query scans all cells overlapping the inflated query box, so no segment
// in range can be missed for any radius.
#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "covdiff/geom/segment.hpp"

namespace covdiff::geom {

class SegmentGrid {
public:
    // cell_size > 0; pick the typical query radius so a query touches a
    // 3x3x3 neighborhood.
    SegmentGrid(const std::vector<Segment>& segments, double cell_size);

    // Superset of all segments with distance <= radius from point, as
    // ascending segment indices. Thread-safe.
    std::vector<std::uint32_t> query_candidates(Vec3 point, double radius) const;

    std::size_t segment_count() const { return n_segments_; }

private:
    using Key = std::uint64_t;
    static Key key(long long ix, long long iy, long long iz);

    double cell_;
    std::size_t n_segments_;
    std::unordered_map<Key, std::vector<std::uint32_t>> cells_;
};

}  // namespace covdiff::geom
