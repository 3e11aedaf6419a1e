#include <doctest.h>

#include <cmath>
#include <numbers>

#include "conalloc/errors.hpp"
#include "conalloc/kernels.hpp"
#include "conalloc/pipeline.hpp"
#include "conalloc/pointproc.hpp"

using namespace conalloc;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Point> disk_points(std::size_t n, std::uint64_t seed) {
    return sample_uniform_count(Domain::disk({0, 0}, 1), n, seed).points;
}

const std::vector<Point> kStar{{0, 0}, {4, 0}, {2.2, 3}, {1.8, 0.8}};

} // namespace

TEST_SUITE("pipeline") {

TEST_CASE("appetites of the unit square") {
    const std::vector<Point> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const auto faces = extract_faces(sq, build_mst(sq));
    const auto app = compute_appetites(faces, sq.size(), AppetiteMode::figure);
    REQUIRE(app.size() == 1);
    for (double a : app[0]) CHECK(a == doctest::Approx(0.25));
}

TEST_CASE("ideal appetites split by sector angle") {
    const auto faces = extract_faces(kStar, build_mst(kStar));
    const auto app = compute_appetites(faces, kStar.size(), AppetiteMode::ideal);
    double sum = 0.0;
    std::size_t parts = 0;
    for (std::size_t f = 0; f < faces.size(); ++f)
        for (std::size_t k = 0; k < faces[f].walk.size(); ++k)
            if (faces[f].walk[k].vertex == 3) {
                CHECK(app[f][k] == doctest::Approx(faces[f].corner_angles[k] / (2 * kPi)));
                sum += app[f][k];
                ++parts;
            }
    CHECK(parts == 3);
    CHECK(sum == doctest::Approx(1.0));

    // an interior leaf has one sector of 2 pi and takes its whole appetite there
    bool seen = false;
    for (std::uint64_t seed = 0; seed < 20 && !seen; ++seed) {
        const auto pts = disk_points(30, seed);
        const Forest f = build_mst(pts);
        const auto fs = extract_faces(pts, f);
        const auto a = compute_appetites(fs, pts.size(), AppetiteMode::ideal);
        const auto hull = convex_hull(pts);
        for (std::size_t i = 0; i < fs.size(); ++i)
            for (std::size_t k = 0; k < fs[i].walk.size(); ++k) {
                const auto v = fs[i].walk[k].vertex;
                if (f.rotation[v].size() == 1 && std::find(hull.begin(), hull.end(), v) == hull.end()) {
                    CHECK(a[i][k] == doctest::Approx(1.0));
                    seen = true;
                }
            }
    }
    CHECK(seen);
}

TEST_CASE("closure of angles and appetites") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto pts = disk_points(25, seed);
        const auto faces = extract_faces(pts, build_mst(pts));
        for (auto mode : {AppetiteMode::figure, AppetiteMode::ideal}) {
            const auto rep = check_closure(pts, faces, compute_appetites(faces, pts.size(), mode), mode);
            CHECK_MESSAGE(rep.ok, rep.detail);
        }
    }
}

TEST_CASE("discretization") {
    const std::vector<Point> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const auto faces = extract_faces(sq, build_mst(sq));
    const CellGrid g = discretize_face(faces[0], 0.5);
    CHECK(g.cells.size() == 4);
    CHECK(g.measure() == doctest::Approx(1.0));
    CHECK_THROWS_AS(discretize_face(faces[0], 0.0), ParameterError);
    CHECK_THROWS_AS(discretize_face(faces[0], 5.0), ResolutionError);

    // Per face the error fluctuates; summed over faces it shrinks with h.
    const auto pts = disk_points(12, 4);
    const auto fs = extract_faces(pts, build_mst(pts));
    double last = INFINITY;
    for (double h : {0.04, 0.02, 0.01, 0.005}) {
        double total = 0.0;
        for (const Face& face : fs) {
            const double err = std::abs(CellGrid{face.id, h, classify_cells(face.polygon, h)}.measure() - face.area);
            CHECK(err <= static_cast<double>(boundary_cell_count(face, h)) * h * h);
            total += err;
        }
        CHECK(total < last);
        last = total;
    }
}

TEST_CASE("cells centered on a slit are jittered") {
    // The tree edge from (0.05, 0.25) to (1.95, 0.25) runs through cell centers at h = 0.5.
    const std::vector<Point> pts{{-3, -3.2}, {5, -3}, {1.1, 5}, {0.05, 0.25}, {1.95, 0.25}};
    const Forest f = build_mst(pts);
    const auto faces = extract_faces(pts, f);
    std::size_t jittered = 0;
    for (const Face& face : faces) jittered += CellGrid{face.id, 0.5, classify_cells(face.polygon, 0.5)}.jittered();
    CHECK(jittered > 0);
    for (const Face& face : faces)
        for (const Cell& c : classify_cells(face.polygon, 0.5))
            if (c.jittered) CHECK(c.center == cell_center(c.ix, c.iy, 0.5) + cell_jitter(0.5));
}

TEST_CASE("parallel kernels match the serial references") {
    const auto pts = disk_points(30, 6);
    const Forest f = build_mst(pts);
    const auto faces = extract_faces(pts, f);
    for (const Face& face : faces) {
        const auto a = classify_cells(face.polygon, 0.01);
        const auto b = classify_cells_serial(face.polygon, 0.01);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].ix == b[i].ix);
            CHECK(a[i].iy == b[i].iy);
            CHECK(a[i].center == b[i].center);
        }
        PipelineConfig config;
        const FaceMap map = build_face_map(pts, face, default_spacing(pts, f), config);
        if (!map.built) continue;
        std::vector<Point> z;
        for (const Cell& c : a) z.push_back(c.center);
        const auto wa = map_points_forward(map.chain, z);
        const auto wb = map_points_forward_serial(map.chain, z);
        REQUIRE(wa.size() == wb.size());
        for (std::size_t i = 0; i < wa.size(); ++i) {
            CHECK(wa[i].w == wb[i].w);
            CHECK(wa[i].on_slit == wb[i].on_slit);
        }
    }
}

TEST_CASE("small figure-mode run") {
    const auto pts = disk_points(12, 2);
    PipelineConfig config;
    config.h = 0.01;
    const PipelineResult r = run_pipeline(pts, config);
    CHECK(r.failed_faces() == 0);
    for (const FaceResult& x : r.results) {
        CHECK(check_stability(x.sites, x.centers, x.assignment).ok);
        CHECK(reach_check(x.sites, x.centers, x.assignment).ok);
        CHECK(x.boundary_residual <= 1e-6);
    }
    const SatednessReport sat = satedness_report(r.faces, r.results, config.h);
    CHECK(sat.dichotomy_violations.empty());
    CHECK(sat.outside_tolerance == 0);

    // claimed + unclaimed + undefined partition the cells, which cover the hull
    double claimed = 0.0;
    for (double c : r.global.claimed) claimed += c;
    const double cell = config.h * config.h;
    const double total = claimed + cell * static_cast<double>(r.global.unclaimed + r.global.undefined);
    CHECK(total == doctest::Approx(cell * static_cast<double>(r.global.cells.size())));
    std::vector<Point> hp;
    for (auto i : convex_hull(pts)) hp.push_back(pts[i]);
    std::size_t boundary = 0;
    for (const Face& face : r.faces) boundary += boundary_cell_count(face, config.h);
    CHECK(std::abs(total - signed_area(hp)) <= static_cast<double>(boundary) * cell);
    CHECK(static_cast<double>(r.global.unclaimed) * cell <= 0.01 * signed_area(hp));

    // each vertex's claimed measure is the sum over its sectors
    std::vector<double> by_sector(pts.size(), 0.0);
    for (std::size_t f = 0; f < r.results.size(); ++f)
        for (std::size_t c = 0; c < r.results[f].centers.size(); ++c)
            by_sector[r.faces[f].walk[r.results[f].centers[c].id].vertex] += r.results[f].assignment.filled[c];
    for (std::size_t v = 0; v < pts.size(); ++v) CHECK(by_sector[v] == doctest::Approx(r.global.claimed[v]));

    // deterministic
    const PipelineResult again = run_pipeline(pts, config);
    REQUIRE(again.global.cells.size() == r.global.cells.size());
    for (std::size_t i = 0; i < r.global.cells.size(); ++i) CHECK(again.global.cells[i].owner == r.global.cells[i].owner);
}

TEST_CASE("ideal mode on a large hull leaves cells unclaimed, all corners sated") {
    std::vector<Point> pts = disk_points(8, 3);
    for (auto& p : pts) p *= 4.0;
    PipelineConfig config;
    config.h = 0.05;
    config.mode = AppetiteMode::ideal;
    const PipelineResult r = run_pipeline(pts, config);
    const SatednessReport sat = satedness_report(r.faces, r.results, config.h);
    CHECK(sat.unclaimed_cells > 0);
    CHECK(sat.unsated_centers == 0);
    CHECK(sat.dichotomy_violations.empty());
    for (const FaceResult& x : r.results) CHECK(check_stability(x.sites, x.centers, x.assignment).ok);
    for (std::size_t v = 0; v < pts.size(); ++v) CHECK(r.global.claimed[v] <= 1.0 + config.h * config.h * 8);
}

TEST_CASE("ideal mode on a small hull claims every cell, corners stay hungry") {
    std::vector<Point> pts = disk_points(8, 3);
    for (auto& p : pts) p *= 0.5;
    PipelineConfig config;
    config.h = 0.01;
    config.mode = AppetiteMode::ideal;
    const PipelineResult r = run_pipeline(pts, config);
    const SatednessReport sat = satedness_report(r.faces, r.results, config.h);
    CHECK(sat.unclaimed_cells == 0);
    CHECK(sat.unsated_centers > 0);
    CHECK(sat.dichotomy_violations.empty());
}

TEST_CASE("connectivity rules") {
    const auto faces = extract_faces(kStar, build_mst(kStar));
    const double h = 0.05;
    GlobalAllocation g;
    g.h = h;
    g.vertex_count = kStar.size();
    g.face_count = faces.size();
    // a connected block of vertex 0 in face 0
    for (std::int64_t ix = 20; ix < 24; ++ix)
        for (std::int64_t iy = 10; iy < 12; ++iy) g.cells.push_back({0, ix, iy, 0, 0, false});
    ConnectivityReport r = verify_connectivity(g, kStar, faces);
    CHECK(r.components[0] == 1);
    CHECK(r.connected_fraction() == 1.0);

    // two sectors of vertex 3 meeting only at the vertex
    const auto near = [&](double dx, double dy) {
        const Point p = kStar[3] + Point(dx, dy);
        return std::pair{static_cast<std::int64_t>(std::floor(p.real() / h)), static_cast<std::int64_t>(std::floor(p.imag() / h))};
    };
    const auto [ax, ay] = near(0.03, 0.06);
    const auto [bx, by] = near(-0.06, -0.04);
    g.cells.push_back({1, ax, ay, 3, 0, false});
    g.cells.push_back({2, bx, by, 3, 0, false});
    r = verify_connectivity(g, kStar, faces);
    CHECK(r.components[3] == 1);

    // a far cell is its own component
    g.cells.push_back({2, bx - 20, by - 20, 3, 0, false});
    r = verify_connectivity(g, kStar, faces);
    CHECK(r.components[3] == 2);
    CHECK(r.with_cells == 2);
    CHECK(r.connected == 1);
}

}
