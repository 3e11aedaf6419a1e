#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "conalloc/errors.hpp"
#include "conalloc/pointproc.hpp"

using namespace conalloc;

TEST_SUITE("pointproc") {

TEST_CASE("poisson with zero intensity is empty") {
    const auto s = sample_poisson(Domain::rectangle({0, 0}, {1, 1}), 0.0, 5);
    CHECK(s.points.empty());
    CHECK_THROWS_AS(sample_poisson(Domain::rectangle({0, 0}, {1, 1}), -1.0, 5), ParameterError);
}

TEST_CASE("poisson counts average the intensity") {
    double sum = 0.0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed)
        sum += static_cast<double>(sample_poisson(Domain::rectangle({0, 0}, {1, 1}), 100.0, seed).points.size());
    // 3 sigma of the mean of 1000 counts is 3 * 10 / sqrt(1000)
    CHECK(std::abs(sum / 1000.0 - 100.0) < 3.0 * 10.0 / std::sqrt(1000.0));
}

TEST_CASE("poisson points stay in the disk") {
    const auto s = sample_poisson(Domain::disk({0, 0}, 1), 52.2, 7);
    CHECK(!s.points.empty());
    for (auto p : s.points) CHECK(std::norm(p) < 1.0);
}

TEST_CASE("uniform count") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto s = sample_uniform_count(Domain::disk({0, 0}, 1), 164, seed);
        REQUIRE(s.points.size() == 164);
        for (auto p : s.points) CHECK(std::norm(p) < 1.0);
    }
    CHECK(sample_uniform_count(Domain::disk({0, 0}, 1), 1, 9).points.size() == 1);
    CHECK_THROWS_AS(sample_uniform_count(Domain::disk({0, 0}, 1), 0, 9), ParameterError);
}

TEST_CASE("uniform on the disk puts a quarter inside radius 1/2") {
    const auto s = sample_uniform_count(Domain::disk({0, 0}, 1), 100000, 11);
    std::size_t inner = 0;
    for (auto p : s.points) inner += std::norm(p) < 0.25;
    CHECK(std::abs(static_cast<double>(inner) / 1e5 - 0.25) < 0.01);
}

TEST_CASE("sampling is deterministic per seed") {
    const auto a = sample_uniform_count(Domain::rectangle({0, 0}, {3, 2}), 50, 4);
    const auto b = sample_uniform_count(Domain::rectangle({0, 0}, {3, 2}), 50, 4);
    const auto c = sample_uniform_count(Domain::rectangle({0, 0}, {3, 2}), 50, 5);
    CHECK(a.points == b.points);
    CHECK(a.points != c.points);
}

TEST_CASE("general position") {
    std::vector<Point> pts{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    CHECK(min_distance_gap(pts) == 0.0);
    const auto applied = enforce_general_position(pts, Domain::rectangle({-1, -1}, {2, 2}), 3);
    CHECK(applied > 0);
    CHECK(min_distance_gap(pts) > 0.0);
}

TEST_CASE("points file round trip") {
    const auto s = sample_uniform_count(Domain::disk({0, 0}, 1), 164, 1);
    std::stringstream io;
    write_points(s, io);
    const auto back = read_points(io);
    CHECK(back.points == s.points);
}

TEST_CASE("points file errors") {
    std::istringstream one("0.1 0.2\n0.5\n");
    try {
        read_points(one);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    std::istringstream bad("0.1 x\n");
    CHECK_THROWS_AS(read_points(bad), ParseError);
    std::istringstream empty("");
    std::vector<std::string> warnings;
    CHECK(read_points(empty, &warnings).points.empty());
    CHECK(warnings.size() == 1);
}

TEST_CASE("format_double round trips") {
    for (double v : {0.1, -1e-300, 1.0 / 3.0, 6.02214076e23, 5e-324}) CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
}

}
