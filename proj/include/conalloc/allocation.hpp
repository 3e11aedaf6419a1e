#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "conalloc/geometry.hpp"

namespace conalloc {

/// Owner values that are not center indices.
inline constexpr std::size_t kUnclaimed = std::numeric_limits<std::size_t>::max();
inline constexpr std::size_t kUndefined = kUnclaimed - 1;

/// A center on the real axis. Engines refer to centers by their position in
/// the center list; `id` is carried through for callers.
struct Center {
    std::size_t id = 0;
    Point position{};
    double appetite = 0.0;
    std::size_t capacity_cells = 0;
};

struct Site {
    std::size_t id = 0;
    Point position{};
    double measure = 1.0;
    std::int64_t ix = 0, iy = 0;
};

/// round(appetite / cell_measure)
std::size_t capacity_cells(double appetite, double cell_measure);

Center make_center(std::size_t id, double u, double appetite, double cell_measure);

struct Assignment {
    /// Per site: index into the center list, kUnclaimed or kUndefined.
    std::vector<std::size_t> owner;
    /// Per site: its owner shares the exact distance with another center.
    std::vector<bool> tie;
    /// Per center.
    std::vector<std::size_t> count;
    std::vector<double> filled;
    std::vector<bool> sated;
    std::size_t stage_count = 0;
    std::size_t rejections = 0;

    std::size_t tie_count() const;
};

/// Squared distance used by both engines; identical arithmetic keeps them in
/// exact agreement.
inline double distance2(Point s, Point c) {
    const double dx = s.real() - c.real();
    const double dy = s.imag() - c.imag();
    return dx * dx + dy * dy;
}

/// Deferred acceptance in stages: every free site applies to its nearest
/// center that has not rejected it, every center keeps its capacity_cells
/// nearest applicants so far and rejects the rest.
Assignment stable_allocate_stages(std::span<const Site> sites, std::span<const Center> centers);

/// Growing balls: (distance, site, center) triples in increasing order, a site
/// goes to the first unsated center that reaches it.
Assignment stable_allocate_balls(std::span<const Site> sites, std::span<const Center> centers);

/// Rebuilds counts, filled measure, ties and satedness for given owners
/// (center indices, kUnclaimed or kUndefined). Throws ParameterError for an
/// out-of-range owner.
Assignment assignment_from_owners(std::span<const Site> sites, std::span<const Center> centers,
                                  std::vector<std::size_t> owners);

struct StabilityReport {
    bool ok = true;
    std::size_t site = kUnclaimed;
    std::size_t center = kUnclaimed;
    std::string detail;
};

/// Looks for a blocking pair, capacity overflow, or an unclaimed site
/// coexisting with an unsated center.
StabilityReport check_stability(std::span<const Site> sites, std::span<const Center> centers,
                                const Assignment& assignment);

/// Territory shape check for sites on a regular grid: the column above each
/// center is a prefix, and each arc of sites around a center is a run from
/// the top. One boundary cell of slack in both.
StabilityReport column_prefix_check(std::span<const Site> sites, std::span<const Center> centers,
                                    const Assignment& assignment);

/// Version for scattered sites: a site whose first choice is A and which is
/// nearer A than A's farthest held site must be held by A.
StabilityReport reach_check(std::span<const Site> sites, std::span<const Center> centers,
                            const Assignment& assignment);

} // namespace conalloc
