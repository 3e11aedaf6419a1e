#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "conalloc/allocation.hpp"
#include "conalloc/errors.hpp"
#include "oracles.hpp"

using namespace conalloc;

namespace {

Site site(std::size_t id, double x, double y) { return Site{id, {x, y}, 1.0, 0, 0}; }

Center center(std::size_t id, double u, std::size_t cap) { return Center{id, {u, 0.0}, static_cast<double>(cap), cap}; }

std::vector<Site> grid_sites(std::int64_t nx, std::int64_t ny, double h, double x0) {
    std::vector<Site> out;
    for (std::int64_t iy = 0; iy < ny; ++iy)
        for (std::int64_t ix = 0; ix < nx; ++ix)
            out.push_back(Site{out.size(), {x0 + (static_cast<double>(ix) + 0.5) * h, (static_cast<double>(iy) + 0.5) * h},
                               h * h, ix, iy});
    return out;
}

bool same(const Assignment& a, const Assignment& b) {
    return a.owner == b.owner && a.count == b.count && a.tie == b.tie;
}

} // namespace

TEST_SUITE("allocation") {

TEST_CASE("capacity") {
    CHECK(capacity_cells(1.0, 0.25) == 4);
    CHECK(capacity_cells(0.0, 0.25) == 0);
    CHECK(capacity_cells(0.37, 0.1) == 4);
    CHECK_THROWS_AS(capacity_cells(-1.0, 0.25), ParameterError);
    CHECK_THROWS_AS(capacity_cells(1.0, 0.0), ParameterError);
    const Center c = make_center(3, 1.5, 0.5, 0.01);
    CHECK(c.id == 3);
    CHECK(c.position == Point(1.5, 0.0));
    CHECK(c.capacity_cells == 50);
}

TEST_CASE("one center with room for everything") {
    const std::vector<Site> sites{site(0, 0.1, 1), site(1, 3, 2), site(2, -1, 0.5)};
    const std::vector<Center> centers{center(0, 0.0, 10)};
    const auto a = stable_allocate_stages(sites, centers);
    CHECK(a.owner == std::vector<std::size_t>{0, 0, 0});
    CHECK(a.stage_count == 1);
    CHECK(same(a, stable_allocate_balls(sites, centers)));
}

TEST_CASE("uncontested sites") {
    const std::vector<Site> sites{site(0, 0, 1), site(1, 4, 1)};
    const std::vector<Center> centers{center(0, 0.0, 1), center(1, 4.0, 1)};
    const auto a = stable_allocate_stages(sites, centers);
    CHECK(a.owner == std::vector<std::size_t>{0, 1});
    CHECK(same(a, stable_allocate_balls(sites, centers)));
}

TEST_CASE("a rejected site moves on in the next stage") {
    const std::vector<Site> sites{site(0, 1.0, 0.5), site(1, 1.2, 0.5)};
    const std::vector<Center> centers{center(0, 0.0, 1), center(1, 3.0, 1)};
    const auto a = stable_allocate_stages(sites, centers);
    CHECK(a.owner == std::vector<std::size_t>{0, 1});
    CHECK(a.stage_count == 2);
    CHECK(a.rejections == 1);
    const auto all = oracle::all_stable_assignments(sites, centers);
    REQUIRE(all.size() == 1);
    CHECK(all[0] == a.owner);
    CHECK(same(a, stable_allocate_balls(sites, centers)));
}

TEST_CASE("zero appetite leaves everything unclaimed") {
    const std::vector<Site> sites{site(0, 1, 1), site(1, 2, 1)};
    const std::vector<Center> centers{center(0, 0.0, 0), center(1, 3.0, 0)};
    for (const auto& a : {stable_allocate_stages(sites, centers), stable_allocate_balls(sites, centers)}) {
        CHECK(a.owner == std::vector<std::size_t>{kUnclaimed, kUnclaimed});
        CHECK(check_stability(sites, centers, a).ok);
    }
}

TEST_CASE("equidistant site goes to the lower index and is flagged") {
    const std::vector<Site> sites{site(0, 1.0, 1.0)};
    const std::vector<Center> centers{center(0, 0.0, 1), center(1, 2.0, 1)};
    const auto a = stable_allocate_stages(sites, centers);
    CHECK(a.owner[0] == 0);
    CHECK(a.tie[0]);
    CHECK(a.tie_count() == 1);
    CHECK(same(a, stable_allocate_balls(sites, centers)));
}

TEST_CASE("nonpositive site measure is rejected") {
    std::vector<Site> sites{site(0, 1.0, 1.0)};
    sites[0].measure = 0.0;
    const std::vector<Center> centers{center(0, 0.0, 1)};
    CHECK_THROWS_AS(stable_allocate_stages(sites, centers), ParameterError);
    CHECK_THROWS_AS(stable_allocate_balls(sites, centers), ParameterError);
}

TEST_CASE("stability checker finds blocking pairs") {
    const std::vector<Site> sites{site(0, 0.2, 0.5), site(1, 2.8, 0.5)};
    const std::vector<Center> centers{center(0, 0.0, 1), center(1, 3.0, 1)};
    const auto good = stable_allocate_balls(sites, centers);
    CHECK(check_stability(sites, centers, good).ok);

    const auto swapped = assignment_from_owners(sites, centers, {1, 0});
    const auto rep = check_stability(sites, centers, swapped);
    CHECK_FALSE(rep.ok);
    CHECK(rep.site != kUnclaimed);
    CHECK(rep.center != kUnclaimed);

    const auto none = assignment_from_owners(sites, centers, {kUnclaimed, kUnclaimed});
    CHECK_FALSE(check_stability(sites, centers, none).ok);

    const auto over = assignment_from_owners(sites, centers, {0, 0});
    CHECK_FALSE(check_stability(sites, centers, over).ok);
    CHECK_THROWS_AS(assignment_from_owners(sites, centers, {0, 5}), ParameterError);
}

TEST_CASE("column prefix on simple grids") {
    const auto sites = grid_sites(20, 20, 0.1, -1.0);
    const std::vector<Center> one{center(0, 0.0, 150)};
    const auto a = stable_allocate_balls(sites, one);
    CHECK(column_prefix_check(sites, one, a).ok);
    CHECK(reach_check(sites, one, a).ok);

    // symmetric pair splits at the bisector x = 0
    const std::vector<Center> two{center(0, -0.5, 100), center(1, 0.5, 100)};
    const auto b = stable_allocate_balls(sites, two);
    CHECK(column_prefix_check(sites, two, b).ok);
    for (std::size_t s = 0; s < sites.size(); ++s) {
        if (b.owner[s] == 0) CHECK(sites[s].position.real() < 0.0);
        if (b.owner[s] == 1) CHECK(sites[s].position.real() > 0.0);
    }

    // punch a hole deep inside a column
    auto owners = a.owner;
    std::size_t hole = kUnclaimed;
    for (std::size_t s = 0; s < sites.size(); ++s)
        if (sites[s].ix == 10 && sites[s].iy == 2) hole = s;
    REQUIRE(owners[hole] == 0);
    owners[hole] = kUnclaimed;
    for (std::size_t s = 0; s < sites.size(); ++s)
        if (sites[s].ix == 10 && sites[s].iy == 4) owners[s] = kUnclaimed;
    CHECK_FALSE(column_prefix_check(sites, one, assignment_from_owners(sites, one, owners)).ok);
}

TEST_CASE("twenty centers on a 100 by 100 grid") {
    const auto sites = grid_sites(100, 100, 0.01, 0.0);
    std::mt19937_64 rng(20);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Center> centers;
    for (std::size_t i = 0; i < 20; ++i) centers.push_back(center(i, u(rng), 400 + i * 10));
    const auto a = stable_allocate_balls(sites, centers);
    CHECK(check_stability(sites, centers, a).ok);
    CHECK(column_prefix_check(sites, centers, a).ok);
    CHECK(same(a, stable_allocate_stages(sites, centers)));
}

TEST_CASE("random instances: engines agree, outputs are stable and site-optimal") {
    for (std::uint64_t seed = 0; seed < 120; ++seed) {
        const auto inst = seed % 2 ? oracle::random_grid_instance(seed, 8, 300) : oracle::random_scattered_instance(seed, 8, 300);
        const auto a = stable_allocate_stages(inst.sites, inst.centers);
        const auto b = stable_allocate_balls(inst.sites, inst.centers);
        CHECK(same(a, b));
        CHECK(check_stability(inst.sites, inst.centers, a).ok);
        CHECK(reach_check(inst.sites, inst.centers, a).ok);
        if (seed % 2) CHECK(column_prefix_check(inst.sites, inst.centers, a).ok);
        // never both an unclaimed site and an unsated center
        const bool unclaimed = std::count(a.owner.begin(), a.owner.end(), kUnclaimed) > 0;
        const bool unsated = std::count(a.sated.begin(), a.sated.end(), false) > 0;
        CHECK_FALSE((unclaimed && unsated));
    }
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const auto inst = oracle::random_scattered_instance(1000 + seed, 4, 10);
        const auto all = oracle::all_stable_assignments(inst.sites, inst.centers);
        REQUIRE(all.size() == 1);
        CHECK(all[0] == stable_allocate_balls(inst.sites, inst.centers).owner);
    }
}

TEST_CASE("real affine maps of the half-plane do not change the assignment") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ua(0.1, 10.0), ub(-10.0, 10.0);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto inst = oracle::random_scattered_instance(seed, 10, 500);
        const auto before = stable_allocate_balls(inst.sites, inst.centers);
        const double a = ua(rng), b = ub(rng);
        for (auto& s : inst.sites) s.position = a * s.position + b;
        for (auto& c : inst.centers) c.position = a * c.position + b;
        CHECK(stable_allocate_balls(inst.sites, inst.centers).owner == before.owner);
    }
}

}
