#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "conalloc/errors.hpp"
#include "conalloc/msf.hpp"
#include "conalloc/pointproc.hpp"
#include "oracles.hpp"

using namespace conalloc;

namespace {

std::vector<std::pair<std::size_t, std::size_t>> edge_pairs(const Forest& f) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const Edge& e : f.edges) out.emplace_back(e.a, e.b);
    return out;
}

constexpr double kPi = std::numbers::pi;

} // namespace

TEST_SUITE("msf") {

TEST_CASE("small trees") {
    const std::vector<Point> tri{{0, 0}, {1, 0}, {0, 1.1}};
    CHECK(edge_pairs(build_mst(tri)) == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {0, 2}});
    const std::vector<Point> chain{{0, 0}, {2, 0}, {3, 0}};
    CHECK(edge_pairs(build_mst(chain)) == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}});
}

TEST_CASE("degenerate input") {
    CHECK_THROWS_AS(build_mst(std::vector<Point>{{0, 0}}), ParameterError);
    CHECK_THROWS_AS(build_mst(std::vector<Point>{{0, 0}, {1, 1}, {0, 0}}), DegeneracyError);
}

TEST_CASE("seven points against all spanning trees") {
    const auto s = sample_uniform_count(Domain::disk({0, 0}, 1), 7, 42);
    CHECK(edge_pairs(build_mst(s.points)) == oracle::cayley_minimum_tree(s.points));
}

TEST_CASE("minimax criterion") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto s = sample_uniform_count(Domain::disk({0, 0}, 1), 4 + seed % 20, seed);
        const Forest f = build_mst(s.points);
        CHECK(f.edges.size() == s.points.size() - 1);
        CHECK(verify_minimax(s.points, f).ok);
        CHECK(edge_pairs(f) == oracle::minimax_edges(s.points));
    }
    const std::vector<Point> two{{0, 0}, {1, 0}};
    CHECK(verify_minimax(two, build_mst(two)).ok);
}

TEST_CASE("a path through the long diagonal is not minimal") {
    const std::vector<Point> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const Forest f = make_forest(sq, {{0, 1, 1.0}, {0, 2, std::sqrt(2.0)}, {2, 3, 1.0}});
    const auto rep = verify_minimax(sq, f);
    CHECK_FALSE(rep.ok);
    REQUIRE(rep.violation.has_value());
    CHECK(rep.violation->a == 0);
    CHECK(rep.violation->b == 2);
}

TEST_CASE("rotation lists are the incident edges in counterclockwise order") {
    const auto s = sample_uniform_count(Domain::disk({0, 0}, 1), 60, 3);
    const Forest f = build_mst(s.points);
    for (std::size_t v = 0; v < s.points.size(); ++v) {
        const auto& rot = f.rotation[v];
        std::size_t degree = 0;
        for (const Edge& e : f.edges) degree += e.a == v || e.b == v;
        REQUIRE(rot.size() == degree);
        double turned = 0.0;
        for (std::size_t k = 0; k < rot.size(); ++k) {
            const Edge& e = f.edges[rot[k]];
            CHECK((e.a == v || e.b == v));
            const Edge& n = f.edges[rot[(k + 1) % rot.size()]];
            if (rot.size() > 1)
                turned += ccw_angle(s.points[e.other(v)] - s.points[v], s.points[n.other(v)] - s.points[v]);
        }
        if (rot.size() > 1) CHECK(turned == doctest::Approx(2 * kPi));
    }
}

TEST_CASE("triangle has one face and no slit") {
    const std::vector<Point> tri{{0, 0}, {1, 0}, {0.2, 1.1}};
    const auto faces = extract_faces(tri, build_mst(tri));
    REQUIRE(faces.size() == 1);
    CHECK(faces[0].walk.size() == 3);
    CHECK(faces[0].area == doctest::Approx(0.55));
    for (const auto& s : faces[0].walk) CHECK_FALSE(s.doubled);
}

TEST_CASE("unit square") {
    const std::vector<Point> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    // equal sides: any three of them form a minimum tree
    const Forest f = build_mst(sq);
    CHECK(f.edges.size() == 3);
    for (const Edge& e : f.edges) CHECK(e.length == doctest::Approx(1.0));
    const auto faces = extract_faces(sq, f);
    REQUIRE(faces.size() == 1);
    CHECK(faces[0].area == doctest::Approx(1.0));
    for (double a : faces[0].corner_angles) CHECK(a == doctest::Approx(kPi / 2));
}

TEST_CASE("interior star of degree three") {
    const std::vector<Point> pts{{0, 0}, {4, 0}, {2.2, 3}, {1.8, 0.8}};
    const Forest f = build_mst(pts);
    CHECK(f.rotation[3].size() == 3);
    const auto faces = extract_faces(pts, f);
    CHECK(faces.size() == 3);
    const auto sectors = sector_angles(faces, pts.size());
    REQUIRE(sectors[3].size() == 3);
    double sum = 0.0;
    for (const auto& s : sectors[3]) sum += s.angle;
    CHECK(sum == doctest::Approx(2 * kPi));
    // the three parts are unequal
    CHECK(sectors[3][0].angle != doctest::Approx(sectors[3][1].angle));
}

TEST_CASE("face properties on random samples") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto s = sample_uniform_count(Domain::disk({0, 0}, 1), 10 + seed, seed);
        const Forest f = build_mst(s.points);
        const auto faces = extract_faces(s.points, f);
        const auto hull = convex_hull(s.points);
        std::vector<Point> hp;
        for (auto i : hull) hp.push_back(s.points[i]);
        std::vector<bool> on_hull(s.points.size(), false);
        for (auto i : hull) on_hull[i] = true;

        double area = 0.0;
        std::size_t steps = 0;
        for (const Face& face : faces) {
            area += face.area;
            steps += face.walk.size();
            CHECK(face.area == doctest::Approx(signed_area(face.polygon)));
            for (std::size_t k = 0; k < face.walk.size(); ++k) {
                const auto v = face.walk[k].vertex;
                if (!on_hull[v] && f.rotation[v].size() == 1) CHECK(face.corner_angles[k] == doctest::Approx(2 * kPi));
                CHECK(face.corner_angles[k] > 0.0);
                CHECK(face.corner_angles[k] <= 2 * kPi + 1e-12);
            }
        }
        CHECK(area == doctest::Approx(signed_area(hp)));
        // Tree edges off the hull are walked twice, hull edges once.
        std::size_t tree_on_hull = 0;
        for (const Edge& e : f.edges)
            for (std::size_t i = 0; i < hull.size(); ++i) {
                const auto a = hull[i], b = hull[(i + 1) % hull.size()];
                tree_on_hull += (e.a == a && e.b == b) || (e.a == b && e.b == a);
            }
        CHECK(steps == 2 * (f.edges.size() - tree_on_hull) + hull.size());
        const auto sectors = sector_angles(faces, s.points.size());
        for (std::size_t v = 0; v < s.points.size(); ++v) {
            double sum = 0.0;
            for (const auto& x : sectors[v]) sum += x.angle;
            if (!on_hull[v]) CHECK(sum == doctest::Approx(2 * kPi));
            else CHECK(sum < 2 * kPi);
        }
    }
}

TEST_CASE("faces are invariant under rigid motions") {
    const auto s = sample_uniform_count(Domain::disk({0, 0}, 1), 40, 8);
    const auto f0 = extract_faces(s.points, build_mst(s.points));
    std::vector<Point> moved;
    const Point rot = std::polar(1.0, 0.7);
    for (auto p : s.points) moved.push_back(rot * p + Point(3.0, -2.0));
    const auto f1 = extract_faces(moved, build_mst(moved));
    REQUIRE(f0.size() == f1.size());
    for (std::size_t i = 0; i < f0.size(); ++i) {
        CHECK(f0[i].area == doctest::Approx(f1[i].area));
        CHECK(f0[i].walk.size() == f1[i].walk.size());
    }
}

}
