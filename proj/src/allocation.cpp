#include "conalloc/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <sstream>
#include <tuple>

#include "conalloc/errors.hpp"

namespace conalloc {

namespace {

// Center-side order on sites and site-side order on centers. Both are
// restrictions of the global (distance, site id, center index) order, which
// is what makes the stable assignment unique and the two engines agree.
using SiteKey = std::pair<double, std::size_t>;   // (d2, site id)
using CenterKey = std::pair<double, std::size_t>; // (d2, center index)

void validate(std::span<const Site> sites) {
    for (const Site& s : sites)
        if (!(s.measure > 0.0)) {
            std::ostringstream os;
            os << "site " << s.id << " has nonpositive measure";
            throw ParameterError(os.str());
        }
}

Assignment empty_assignment(std::size_t n_sites, std::size_t n_centers) {
    Assignment a;
    a.owner.assign(n_sites, kUnclaimed);
    a.tie.assign(n_sites, false);
    a.count.assign(n_centers, 0);
    a.filled.assign(n_centers, 0.0);
    a.sated.assign(n_centers, false);
    return a;
}

void finish(std::span<const Site> sites, std::span<const Center> centers, Assignment& a) {
    for (std::size_t s = 0; s < sites.size(); ++s) {
        const std::size_t c = a.owner[s];
        if (c >= centers.size()) continue;
        a.filled[c] += sites[s].measure;
        const double d = distance2(sites[s].position, centers[c].position);
        for (std::size_t k = 0; k < centers.size(); ++k)
            if (k != c && distance2(sites[s].position, centers[k].position) == d) {
                a.tie[s] = true;
                break;
            }
    }
    for (std::size_t c = 0; c < centers.size(); ++c) a.sated[c] = a.count[c] >= centers[c].capacity_cells;
}

} // namespace

std::size_t Assignment::tie_count() const {
    return static_cast<std::size_t>(std::count(tie.begin(), tie.end(), true));
}

std::size_t capacity_cells(double appetite, double cell_measure) {
    if (!(appetite >= 0.0) || !(cell_measure > 0.0)) throw ParameterError("capacity needs appetite >= 0 and cell measure > 0");
    if (std::isinf(appetite)) return std::numeric_limits<std::size_t>::max() / 2;
    return static_cast<std::size_t>(std::llround(appetite / cell_measure));
}

Center make_center(std::size_t id, double u, double appetite, double cell_measure) {
    return Center{id, Point{u, 0.0}, appetite, capacity_cells(appetite, cell_measure)};
}

Assignment assignment_from_owners(std::span<const Site> sites, std::span<const Center> centers,
                                  std::vector<std::size_t> owners) {
    if (owners.size() != sites.size()) throw ParameterError("one owner per site expected");
    Assignment a = empty_assignment(sites.size(), centers.size());
    for (std::size_t s = 0; s < sites.size(); ++s) {
        const std::size_t c = owners[s];
        if (c < centers.size()) ++a.count[c];
        else if (c != kUnclaimed && c != kUndefined) throw ParameterError("owner index out of range");
    }
    a.owner = std::move(owners);
    finish(sites, centers, a);
    return a;
}

Assignment stable_allocate_stages(std::span<const Site> sites, std::span<const Center> centers) {
    validate(sites);
    const std::size_t n = sites.size(), k = centers.size();
    Assignment out = empty_assignment(n, k);
    if (k == 0 || n == 0) return out;

    std::vector<std::size_t> prefs(n * k);
    std::vector<CenterKey> keys(k);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t c = 0; c < k; ++c) keys[c] = {distance2(sites[s].position, centers[c].position), c};
        std::sort(keys.begin(), keys.end());
        for (std::size_t c = 0; c < k; ++c) prefs[s * k + c] = keys[c].second;
    }

    // Per center: max-heap of held applicants (worst on top).
    using Held = std::tuple<double, std::size_t, std::size_t>; // d2, site id, site index
    std::vector<std::priority_queue<Held>> held(k);
    std::vector<std::size_t> next(n, 0);
    std::vector<std::size_t> free(n);
    for (std::size_t s = 0; s < n; ++s) free[s] = s;

    std::vector<std::size_t> rejected;
    while (!free.empty()) {
        ++out.stage_count;
        rejected.clear();
        for (std::size_t s : free) {
            const std::size_t c = prefs[s * k + next[s]];
            auto& h = held[c];
            h.emplace(distance2(sites[s].position, centers[c].position), sites[s].id, s);
            if (h.size() > centers[c].capacity_cells) {
                rejected.push_back(std::get<2>(h.top()));
                h.pop();
            }
        }
        if (rejected.empty()) break;
        out.rejections += rejected.size();
        free.clear();
        for (std::size_t s : rejected)
            if (++next[s] < k) free.push_back(s);
    }

    for (std::size_t c = 0; c < k; ++c) {
        out.count[c] = held[c].size();
        while (!held[c].empty()) {
            out.owner[std::get<2>(held[c].top())] = c;
            held[c].pop();
        }
    }
    finish(sites, centers, out);
    return out;
}

Assignment stable_allocate_balls(std::span<const Site> sites, std::span<const Center> centers) {
    validate(sites);
    const std::size_t n = sites.size(), k = centers.size();
    Assignment out = empty_assignment(n, k);
    if (k == 0 || n == 0) return out;

    // Each center's sites by (d2, site id); the heap merges the k streams in
    // the global (d2, site id, center) order.
    std::vector<std::vector<std::pair<SiteKey, std::size_t>>> order(k);
    for (std::size_t c = 0; c < k; ++c) {
        if (centers[c].capacity_cells == 0) continue;
        auto& o = order[c];
        o.reserve(n);
        for (std::size_t s = 0; s < n; ++s)
            o.push_back({{distance2(sites[s].position, centers[c].position), sites[s].id}, s});
        std::sort(o.begin(), o.end());
    }

    using Event = std::tuple<double, std::size_t, std::size_t, std::size_t>; // d2, site id, center, position
    std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
    for (std::size_t c = 0; c < k; ++c)
        if (!order[c].empty()) events.emplace(order[c][0].first.first, order[c][0].first.second, c, 0);

    std::size_t claimed = 0;
    while (!events.empty() && claimed < n) {
        const auto [d2, sid, c, pos] = events.top();
        events.pop();
        const std::size_t s = order[c][pos].second;
        if (out.owner[s] == kUnclaimed) {
            out.owner[s] = c;
            ++claimed;
            if (++out.count[c] >= centers[c].capacity_cells) continue; // sated, ball stops
        }
        if (pos + 1 < n) events.emplace(order[c][pos + 1].first.first, order[c][pos + 1].first.second, c, pos + 1);
    }
    out.stage_count = 1;
    finish(sites, centers, out);
    return out;
}

StabilityReport check_stability(std::span<const Site> sites, std::span<const Center> centers,
                                const Assignment& a) {
    StabilityReport r;
    const std::size_t n = sites.size(), k = centers.size();
    auto fail = [&](std::size_t s, std::size_t c, std::string msg) {
        r.ok = false;
        r.site = s;
        r.center = c;
        r.detail = std::move(msg);
        return r;
    };
    if (a.owner.size() != n) return fail(kUnclaimed, kUnclaimed, "owner list size differs from site count");

    std::vector<std::size_t> count(k, 0);
    std::vector<SiteKey> worst(k, {-1.0, 0});
    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t c = a.owner[s];
        if (c == kUnclaimed || c == kUndefined) continue;
        if (c >= k) return fail(s, c, "owner is not a center");
        ++count[c];
        worst[c] = std::max(worst[c], SiteKey{distance2(sites[s].position, centers[c].position), sites[s].id});
    }
    bool any_unsated = false;
    for (std::size_t c = 0; c < k; ++c) {
        if (count[c] > centers[c].capacity_cells) {
            std::ostringstream os;
            os << "center " << c << " holds " << count[c] << " cells, capacity " << centers[c].capacity_cells;
            return fail(kUnclaimed, c, os.str());
        }
        any_unsated = any_unsated || count[c] < centers[c].capacity_cells;
    }

    bool any_unclaimed = false;
    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t own = a.owner[s];
        if (own == kUndefined) continue;
        any_unclaimed = any_unclaimed || own == kUnclaimed;
        const CenterKey mine = own == kUnclaimed
                                   ? CenterKey{std::numeric_limits<double>::infinity(), k}
                                   : CenterKey{distance2(sites[s].position, centers[own].position), own};
        for (std::size_t c = 0; c < k; ++c) {
            const double d = distance2(sites[s].position, centers[c].position);
            if (!(CenterKey{d, c} < mine)) continue;
            const bool room = count[c] < centers[c].capacity_cells;
            if (room || SiteKey{d, sites[s].id} < worst[c]) {
                std::ostringstream os;
                os << "blocking pair: site " << sites[s].id << " prefers center " << c
                   << (room ? " which has room" : " which holds a farther site");
                return fail(s, c, os.str());
            }
        }
    }
    if (any_unclaimed && any_unsated) return fail(kUnclaimed, kUnclaimed, "unclaimed sites and unsated centers coexist");
    return r;
}

namespace {

// Pattern check shared by the column and the arc: the owned entries of a
// sequence form a prefix with at most one hole.
bool prefix_with_slack(const std::vector<bool>& owned) {
    std::size_t m = 0, last = 0;
    for (std::size_t i = 0; i < owned.size(); ++i)
        if (owned[i]) {
            ++m;
            last = i;
        }
    return m == 0 || last <= m;
}

double grid_step(const std::vector<double>& values) {
    double h = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[i - 1]) h = std::min(h, values[i] - values[i - 1]);
    return h;
}

} // namespace

StabilityReport column_prefix_check(std::span<const Site> sites, std::span<const Center> centers,
                                    const Assignment& a) {
    StabilityReport r;
    if (sites.empty() || centers.empty()) return r;

    std::map<double, std::vector<std::size_t>> columns;
    std::vector<double> ys;
    for (std::size_t s = 0; s < sites.size(); ++s) {
        columns[sites[s].position.real()].push_back(s);
        ys.push_back(sites[s].position.imag());
    }
    std::vector<double> xs;
    for (const auto& [x, _] : columns) xs.push_back(x);
    std::sort(ys.begin(), ys.end());
    double h = std::min(grid_step(xs), grid_step(ys));
    if (!std::isfinite(h)) return r;

    for (std::size_t c = 0; c < centers.size(); ++c) {
        if (a.count.size() > c && a.count[c] == 0) continue;
        const double u = centers[c].position.real();

        auto it = columns.lower_bound(u);
        if (it == columns.end() || (it != columns.begin() && u - std::prev(it)->first < it->first - u)) --it;
        const double xc = it->first;
        bool nearest = true;
        for (std::size_t o = 0; o < centers.size(); ++o)
            if (std::abs(xc - centers[o].position.real()) < std::abs(xc - u)) nearest = false;
        if (!nearest) continue;

        std::vector<std::size_t> col = it->second;
        std::sort(col.begin(), col.end(),
                  [&](std::size_t p, std::size_t q) { return sites[p].position.imag() < sites[q].position.imag(); });
        std::vector<bool> owned;
        for (std::size_t s : col) owned.push_back(a.owner[s] == c);
        if (!prefix_with_slack(owned)) {
            std::ostringstream os;
            os << "center " << c << ": column at x=" << xc << " is not a prefix";
            r = {false, kUnclaimed, c, os.str()};
            return r;
        }

        // Arcs: only rings lying wholly within the center's reach, where a
        // site is lost only to a nearer competitor, never to satedness.
        double reach = 0.0;
        for (std::size_t s = 0; s < sites.size(); ++s)
            if (a.owner[s] == c) reach = std::max(reach, std::abs(sites[s].position - centers[c].position));
        std::map<std::int64_t, std::vector<std::size_t>> rings;
        for (std::size_t s = 0; s < sites.size(); ++s) {
            const double d = std::abs(sites[s].position - centers[c].position);
            const auto ring = static_cast<std::int64_t>(std::floor(d / h));
            if ((ring + 1) * h <= reach) rings[ring].push_back(s);
        }
        for (auto& [ring, members] : rings) {
            for (int side = -1; side <= 1; side += 2) {
                std::vector<std::pair<double, std::size_t>> arc;
                for (std::size_t s : members) {
                    const double dx = sites[s].position.real() - u;
                    if (dx * side < 0.0) continue;
                    arc.push_back({std::atan2(std::abs(dx), sites[s].position.imag()), s});
                }
                std::sort(arc.begin(), arc.end());
                // Ring sites are not equidistant from the center, so the run
                // can break on distance alone. What must never happen is a
                // site Z before an owned W that is at least as near the
                // center and no nearer its own owner.
                for (std::size_t j = 0; j < arc.size(); ++j) {
                    const std::size_t w = arc[j].second;
                    if (a.owner[w] != c) continue;
                    const double dwa = distance2(sites[w].position, centers[c].position);
                    for (std::size_t i = 0; i < j; ++i) {
                        const std::size_t z = arc[i].second;
                        const std::size_t b = a.owner[z];
                        if (b == c || b == kUndefined) continue;
                        if (distance2(sites[z].position, centers[c].position) > dwa) continue;
                        if (b != kUnclaimed && distance2(sites[z].position, centers[b].position) <
                                                   distance2(sites[w].position, centers[b].position))
                            continue;
                        std::ostringstream os;
                        os << "center " << c << ": arc " << ring << (side < 0 ? " left" : " right")
                           << " breaks at site " << sites[z].id << " before site " << sites[w].id;
                        r = {false, z, c, os.str()};
                        return r;
                    }
                }
            }
        }
    }
    return r;
}

StabilityReport reach_check(std::span<const Site> sites, std::span<const Center> centers, const Assignment& a) {
    StabilityReport r;
    const std::size_t k = centers.size();
    if (k == 0) return r;
    std::vector<SiteKey> worst(k, {-1.0, 0});
    for (std::size_t s = 0; s < sites.size(); ++s)
        if (a.owner[s] < k)
            worst[a.owner[s]] = std::max(worst[a.owner[s]],
                                         SiteKey{distance2(sites[s].position, centers[a.owner[s]].position), sites[s].id});
    for (std::size_t s = 0; s < sites.size(); ++s) {
        if (a.owner[s] == kUndefined) continue;
        CenterKey best{std::numeric_limits<double>::infinity(), k};
        for (std::size_t c = 0; c < k; ++c) best = std::min(best, CenterKey{distance2(sites[s].position, centers[c].position), c});
        const std::size_t c = best.second;
        if (a.owner[s] != c && SiteKey{best.first, sites[s].id} < worst[c]) {
            std::ostringstream os;
            os << "site " << sites[s].id << " lies inside the reach of its nearest center " << c << " but is not held by it";
            r = {false, s, c, os.str()};
            return r;
        }
    }
    return r;
}

} // namespace conalloc
