#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "covdiff/geom/mesh.hpp"
#include "covdiff/geom/obj.hpp"
#include "covdiff/geom/sample.hpp"
#include "covdiff/geom/segment.hpp"
#include "covdiff/geom/segment_grid.hpp"
#include "covdiff/num/rng.hpp"

using namespace covdiff;
using geom::TriMesh;
using geom::Vec3;

namespace {

bool mesh_equal(const TriMesh& a, const TriMesh& b, double tol) {
    if (a.vertices.size() != b.vertices.size() || a.faces.size() != b.faces.size()) return false;
    for (std::size_t i = 0; i < a.vertices.size(); ++i)
        if (norm(a.vertices[i] - b.vertices[i]) > tol) return false;
    for (std::size_t i = 0; i < a.faces.size(); ++i)
        if (a.faces[i] != b.faces[i]) return false;
    return true;
}

TriMesh random_mesh(std::size_t n_faces, num::Rng& rng) {
    TriMesh m;
    for (std::size_t f = 0; f < n_faces; ++f) {
        auto base = static_cast<std::uint32_t>(m.vertices.size());
        for (int k = 0; k < 3; ++k)
            m.vertices.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
        m.faces.push_back({base, base + 1, base + 2});
    }
    return m;
}

}  // namespace

TEST_CASE("obj parse basics") {
    TriMesh m = geom::parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
    CHECK(m.vertices.size() == 3);
    CHECK(m.faces.size() == 1);

    CHECK_THROWS_WITH_AS(geom::parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 3 4\n"),
                         doctest::Contains("line 5"), std::runtime_error);
    CHECK_THROWS_WITH_AS(geom::parse_obj("v 0 0 0\nf 1 2 3\n"), doctest::Contains("line 2"),
                         std::runtime_error);
    CHECK_THROWS_AS(geom::parse_obj("vt 0 0\n"), std::runtime_error);
}

TEST_CASE("obj round trip preserves structure") {
    num::Rng rng(3);
    TriMesh m = random_mesh(100, rng);
    TriMesh back = geom::parse_obj(geom::write_obj(m));
    CHECK(mesh_equal(m, back, 1e-8));
}

TEST_CASE("face centroid and area") {
    TriMesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    m.faces = {{0, 1, 2}};
    Vec3 c = geom::face_centroid(m, 0);
    CHECK(c.x == doctest::Approx(1.0 / 3));
    CHECK(c.y == doctest::Approx(1.0 / 3));
    CHECK(geom::face_area(m, 0) == doctest::Approx(0.5));

    TriMesh deg;
    deg.vertices = {{0, 0, 0}, {1, 1, 1}, {2, 2, 2}};
    deg.faces = {{0, 1, 2}};
    CHECK(geom::face_area(deg, 0) == 0.0);
}

TEST_CASE("random triangle area matches Heron's formula") {
    num::Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        TriMesh m = random_mesh(1, rng);
        double a = norm(m.vertices[1] - m.vertices[0]);
        double b = norm(m.vertices[2] - m.vertices[1]);
        double c = norm(m.vertices[0] - m.vertices[2]);
        double s = 0.5 * (a + b + c);
        double heron = std::sqrt(std::max(0.0, s * (s - a) * (s - b) * (s - c)));
        CHECK(geom::face_area(m, 0) == doctest::Approx(heron).epsilon(1e-9));
    }
}

TEST_CASE("point_segment_distance clipping") {
    Vec3 s{0, 0, 0}, e{2, 0, 0};
    auto r1 = geom::point_segment_distance({0, 1, 0}, s, e);
    CHECK(r1.t == 0.0);
    CHECK(r1.distance == doctest::Approx(1.0));

    auto r2 = geom::point_segment_distance({3, 0, 0}, s, e);  // t clips from 1.5
    CHECK(r2.t == 1.0);
    CHECK(r2.distance == doctest::Approx(1.0));

    auto r3 = geom::point_segment_distance({1, 1, 0}, s, e);
    CHECK(r3.t == doctest::Approx(0.5));
    CHECK(r3.distance == doctest::Approx(1.0));
}

TEST_CASE("point_segment_distance degenerate and symmetry") {
    Vec3 p{1, 2, 3};
    auto r = geom::point_segment_distance({4, 6, 3}, p, p);
    CHECK(r.t == 0.0);
    CHECK(r.distance == 5.0);  // exact

    num::Rng rng(23);
    for (int i = 0; i < 200; ++i) {
        Vec3 c{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        Vec3 a{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        Vec3 b{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        double d1 = geom::point_segment_distance(c, a, b).distance;
        double d2 = geom::point_segment_distance(c, b, a).distance;
        CHECK(std::fabs(d1 - d2) <= 1e-12);
    }
}

TEST_CASE("sample_surface stays on the face plane and is seeded") {
    TriMesh m;
    m.vertices = {{0, 0, 1}, {2, 0, 1}, {0, 2, 1}};
    m.faces = {{0, 1, 2}};
    auto cloud = geom::sample_surface(m, 500, 7);
    for (const Vec3& p : cloud.points) CHECK(std::fabs(p.z - 1.0) <= 1e-9);

    auto again = geom::sample_surface(m, 500, 7);
    for (std::size_t i = 0; i < cloud.points.size(); ++i)
        CHECK(norm(cloud.points[i] - again.points[i]) == 0.0);
}

TEST_CASE("sample_surface splits by area") {
    // Two faces with areas 1 and 3 in distinguishable planes.
    TriMesh m;
    m.vertices = {{0, 0, 0}, {2, 0, 0}, {0, 1, 0},   // area 1, z = 0
                  {0, 0, 5}, {3, 0, 5}, {0, 2, 5}};  // area 3, z = 5
    m.faces = {{0, 1, 2}, {3, 4, 5}};
    const std::size_t n = 40000;
    auto cloud = geom::sample_surface(m, n, 99);
    std::size_t big = 0;
    for (const Vec3& p : cloud.points) big += p.z > 2.5 ? 1 : 0;
    // Binomial(n, 3/4): 3 sigma around 30000.
    double sigma = std::sqrt(n * 0.75 * 0.25);
    CHECK(std::fabs(static_cast<double>(big) - 30000.0) <= 3.0 * sigma);
}

TEST_CASE("sample_surface rejects zero-area meshes") {
    TriMesh deg;
    deg.vertices = {{0, 0, 0}, {1, 1, 1}, {2, 2, 2}};
    deg.faces = {{0, 1, 2}};
    CHECK_THROWS_AS(geom::sample_surface(deg, 10, 1), std::invalid_argument);
}

TEST_CASE("make_cuboid") {
    TriMesh m = geom::make_cuboid(1, 1, 1);
    CHECK(m.vertices.size() == 8);
    CHECK(m.faces.size() == 12);
    CHECK(geom::total_area(m) == doctest::Approx(6.0));
    CHECK(geom::total_area(geom::make_cuboid(2, 1, 1)) == doctest::Approx(10.0));
    CHECK_THROWS_AS(geom::make_cuboid(0, 1, 1), std::invalid_argument);
}

TEST_CASE("make_frame area matches its panel decomposition") {
    double o = 0.8, i = 0.4, t = 0.1;
    TriMesh m = geom::make_frame(o, i, t);
    double expected = 2.0 * (o * o - i * i) + 4.0 * o * t + 4.0 * i * t;
    CHECK(geom::total_area(m) == doctest::Approx(expected).epsilon(1e-12));
    CHECK_THROWS_AS(geom::make_frame(0.4, 0.5, 0.1), std::invalid_argument);
}

TEST_CASE("total area is rotation invariant") {
    num::Rng rng(31);
    TriMesh m = geom::make_frame(0.9, 0.5, 0.2);
    double base = geom::total_area(m);
    double ang = rng.uniform(0, 6.28);
    double ca = std::cos(ang), sa = std::sin(ang);
    TriMesh rot = m;
    for (Vec3& v : rot.vertices) v = {ca * v.x - sa * v.y, sa * v.x + ca * v.y, v.z};
    CHECK(std::fabs(geom::total_area(rot) - base) / base <= 1e-9);
}

TEST_CASE("normalize_to_unit and round trip") {
    TriMesh m = geom::make_cuboid(2, 2, 2);
    for (Vec3& v : m.vertices) v = v + Vec3{5, 0, 0};
    geom::NormalizeTransform tf;
    TriMesh unit = geom::normalize_to_unit(m, tf);
    CHECK(tf.scale == doctest::Approx(2.0));
    CHECK(tf.offset.x == doctest::Approx(5.0));
    CHECK(tf.offset.y == doctest::Approx(0.0));

    geom::NormalizeTransform tf2;
    (void)geom::normalize_to_unit(unit, tf2);
    CHECK(tf2.scale == doctest::Approx(1.0));
    CHECK(norm(tf2.offset) == doctest::Approx(0.0));

    num::Rng rng(8);
    std::vector<Vec3> pts;
    for (int i = 0; i < 200; ++i)
        pts.push_back({rng.uniform(-4, 9), rng.uniform(2, 3), rng.uniform(-1, 1)});
    std::vector<Vec3> copy = pts;
    auto t = geom::normalize_to_unit(copy);
    for (std::size_t i = 0; i < pts.size(); ++i)
        CHECK(norm(geom::denormalize(copy[i], t) - pts[i]) <= 1e-9);

    std::vector<Vec3> degenerate(3, Vec3{1, 1, 1});
    CHECK_THROWS_AS(geom::normalize_to_unit(degenerate), std::invalid_argument);
}

TEST_CASE("segment grid basics") {
    std::vector<geom::Segment> segs{{{0, 0, 0}, {1, 0, 0}}};
    geom::SegmentGrid grid(segs, 0.05);
    auto hit = grid.query_candidates({0.5, 0, 0}, 0.01);
    REQUIRE(hit.size() == 1);
    CHECK(hit[0] == 0);
    CHECK(grid.query_candidates({50, 50, 50}, 0.5).empty());
}

TEST_CASE("segment grid candidates are a superset of the brute-force set") {
    num::Rng rng(12);
    std::vector<geom::Segment> segs;
    for (int i = 0; i < 1000; ++i) {
        Vec3 a{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        Vec3 d{rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)};
        segs.push_back({a, a + d});
    }
    geom::SegmentGrid grid(segs, 0.05);
    for (int q = 0; q < 1000; ++q) {
        Vec3 p{rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2)};
        double radius = rng.uniform(0.01, 0.15);
        auto candidates = grid.query_candidates(p, radius);
        for (std::uint32_t s = 0; s < segs.size(); ++s) {
            if (geom::point_segment_distance(p, segs[s].a, segs[s].b).distance > radius) continue;
            bool found = std::find(candidates.begin(), candidates.end(), s) != candidates.end();
            CHECK(found);
        }
    }
}
