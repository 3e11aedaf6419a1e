#include "conalloc/msf.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <numeric>

#include "conalloc/errors.hpp"

namespace conalloc {

namespace {

void sort_rotation(std::span<const Point> points, std::size_t v, std::vector<std::size_t>& incident,
                   auto&& other_end) {
    auto angle_of = [&](std::size_t e) {
        const Point d = points[other_end(e, v)] - points[v];
        return std::atan2(d.imag(), d.real());
    };
    std::sort(incident.begin(), incident.end(), [&](std::size_t x, std::size_t y) { return angle_of(x) < angle_of(y); });
    if (!incident.empty()) {
        auto first = std::min_element(incident.begin(), incident.end());
        std::rotate(incident.begin(), first, incident.end());
    }
}

} // namespace

Forest make_forest(std::span<const Point> points, std::vector<Edge> edges) {
    for (auto& e : edges) {
        if (e.a > e.b) std::swap(e.a, e.b);
        e.length = std::abs(points[e.a] - points[e.b]);
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
        return x.a != y.a ? x.a < y.a : x.b < y.b;
    });
    Forest f;
    f.vertex_count = points.size();
    f.edges = std::move(edges);
    f.rotation.assign(points.size(), {});
    for (std::size_t i = 0; i < f.edges.size(); ++i) {
        f.rotation[f.edges[i].a].push_back(i);
        f.rotation[f.edges[i].b].push_back(i);
    }
    for (std::size_t v = 0; v < points.size(); ++v)
        sort_rotation(points, v, f.rotation[v], [&](std::size_t e, std::size_t at) { return f.edges[e].other(at); });
    return f;
}

Forest build_mst(std::span<const Point> points) {
    const std::size_t n = points.size();
    if (n < 2) throw ParameterError("minimum spanning tree needs at least two points");

    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> best(n, inf);
    std::vector<std::size_t> parent(n, 0);
    std::vector<bool> in_tree(n, false);
    std::vector<Edge> edges;
    edges.reserve(n - 1);

    best[0] = 0.0;
    for (std::size_t round = 0; round < n; ++round) {
        std::size_t u = n;
        for (std::size_t v = 0; v < n; ++v)
            if (!in_tree[v] && (u == n || best[v] < best[u])) u = v;
        in_tree[u] = true;
        if (round > 0) edges.push_back({parent[u], u, 0.0});
        for (std::size_t v = 0; v < n; ++v) {
            if (in_tree[v]) continue;
            const double d2 = std::norm(points[u] - points[v]);
            if (d2 == 0.0) throw DegeneracyError("coincident points " + std::to_string(u) + " and " + std::to_string(v));
            if (d2 < best[v]) {
                best[v] = d2;
                parent[v] = u;
            }
        }
    }
    return make_forest(points, std::move(edges));
}

MinimaxReport verify_minimax(std::span<const Point> points, const Forest& forest) {
    MinimaxReport report;
    const std::size_t n = points.size();
    if (forest.edges.size() + 1 != n && n > 0) {
        report.ok = false;
        report.detail = "edge count " + std::to_string(forest.edges.size()) + " is not n-1";
        return report;
    }
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < forest.edges.size(); ++i) {
        adj[forest.edges[i].a].push_back(i);
        adj[forest.edges[i].b].push_back(i);
    }

    // For a spanning tree the criterion is the cycle property: every pair
    // (r, y) must be at least as long as the heaviest tree edge between them.
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> heaviest(n), stack;
    std::vector<bool> seen(n);
    for (std::size_t r = 0; r < n; ++r) {
        std::fill(seen.begin(), seen.end(), false);
        heaviest[r] = none;
        seen[r] = true;
        stack.assign(1, r);
        std::size_t reached = 1;
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            for (auto e : adj[v]) {
                const std::size_t w = forest.edges[e].other(v);
                if (seen[w]) continue;
                seen[w] = true;
                ++reached;
                const std::size_t h = heaviest[v];
                heaviest[w] = (h == none || forest.edges[e].length > forest.edges[h].length) ? e : h;
                stack.push_back(w);
            }
        }
        if (reached != n) {
            report.ok = false;
            report.detail = "forest does not span the sample";
            return report;
        }
        for (std::size_t y = r + 1; y < n; ++y) {
            const Edge& e = forest.edges[heaviest[y]];
            if (e.length > std::abs(points[r] - points[y]) && !(e.a == r && e.b == y)) {
                report.ok = false;
                report.violation = e;
                report.detail = "edge (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                                ") is longer than the chord (" + std::to_string(r) + "," + std::to_string(y) +
                                ") closing a cycle through it";
                return report;
            }
        }
    }
    return report;
}

PlanarGraph planar_graph(std::span<const Point> points, const Forest& forest) {
    PlanarGraph g;
    const std::size_t n = points.size();
    g.hull = convex_hull(points);
    if (g.hull.size() < 3) throw DegeneracyError("points are collinear; no bounded face");
    g.on_hull.assign(n, false);
    for (auto v : g.hull) g.on_hull[v] = true;

    std::map<std::pair<std::size_t, std::size_t>, std::size_t> index;
    for (const auto& e : forest.edges) {
        index[{e.a, e.b}] = g.edges.size();
        g.edges.push_back({e.a, e.b, true, false});
    }
    for (std::size_t i = 0; i < g.hull.size(); ++i) {
        std::size_t a = g.hull[i], b = g.hull[(i + 1) % g.hull.size()];
        if (a > b) std::swap(a, b);
        auto it = index.find({a, b});
        if (it != index.end()) {
            g.edges[it->second].hull = true;
        } else {
            index[{a, b}] = g.edges.size();
            g.edges.push_back({a, b, false, true});
        }
    }
    g.rotation.assign(n, {});
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        g.rotation[g.edges[i].a].push_back(i);
        g.rotation[g.edges[i].b].push_back(i);
    }
    for (std::size_t v = 0; v < n; ++v)
        sort_rotation(points, v, g.rotation[v], [&](std::size_t e, std::size_t at) { return g.edges[e].other(at); });
    return g;
}

std::vector<Face> extract_faces(std::span<const Point> points, const Forest& forest) {
    if (points.size() < 3) throw DegeneracyError("face extraction needs at least three points");
    const PlanarGraph g = planar_graph(points, forest);
    const std::size_t m = g.edges.size();

    // Position of each edge inside the rotation list of each endpoint.
    std::vector<std::array<std::size_t, 2>> slot(m);
    for (std::size_t v = 0; v < points.size(); ++v)
        for (std::size_t k = 0; k < g.rotation[v].size(); ++k) {
            const std::size_t e = g.rotation[v][k];
            slot[e][g.edges[e].a == v ? 0 : 1] = k;
        }

    // Half-edge h = 2e + d, d = 0 for a->b.
    auto tail = [&](std::size_t h) { return (h & 1) ? g.edges[h / 2].b : g.edges[h / 2].a; };
    auto head = [&](std::size_t h) { return (h & 1) ? g.edges[h / 2].a : g.edges[h / 2].b; };
    auto next_half = [&](std::size_t h) {
        // Arrive at v along h; leave along the edge clockwise after reverse(h).
        const std::size_t v = head(h);
        const std::size_t e = h / 2;
        const auto& rot = g.rotation[v];
        const std::size_t k = slot[e][g.edges[e].a == v ? 0 : 1];
        const std::size_t out = rot[(k + rot.size() - 1) % rot.size()];
        return 2 * out + (g.edges[out].a == v ? 0 : 1);
    };

    std::vector<bool> used(2 * m, false);
    std::vector<Face> faces;
    for (std::size_t h0 = 0; h0 < 2 * m; ++h0) {
        if (used[h0]) continue;
        std::vector<std::size_t> cycle;
        for (std::size_t h = h0; !used[h]; h = next_half(h)) {
            used[h] = true;
            cycle.push_back(h);
        }
        std::vector<Point> poly;
        poly.reserve(cycle.size());
        for (auto h : cycle) poly.push_back(points[tail(h)]);
        const double area = signed_area(poly);
        if (area <= 0.0) continue;  // the unbounded face runs clockwise

        Face f;
        f.id = faces.size();
        f.area = area;
        f.polygon = std::move(poly);
        std::vector<int> uses(m, 0);
        for (auto h : cycle) ++uses[h / 2];
        for (std::size_t k = 0; k < cycle.size(); ++k) {
            const std::size_t h = cycle[k];
            const std::size_t prev = cycle[(k + cycle.size() - 1) % cycle.size()];
            WalkStep s;
            s.vertex = tail(h);
            s.next = head(h);
            s.out_edge = h / 2;
            s.in_edge = prev / 2;
            s.doubled = uses[h / 2] == 2;
            s.tree = g.edges[h / 2].tree;
            f.walk.push_back(s);
            const Point out_dir = points[head(h)] - points[s.vertex];
            const Point back_dir = points[tail(prev)] - points[s.vertex];
            double angle = ccw_angle(out_dir, back_dir);
            if (s.out_edge == s.in_edge) angle = kTwoPi;
            f.corner_angles.push_back(angle);
        }
        faces.push_back(std::move(f));
    }
    return faces;
}

std::vector<std::vector<Sector>> sector_angles(std::span<const Face> faces, std::size_t vertex_count) {
    std::vector<std::vector<Sector>> out(vertex_count);
    for (const auto& f : faces)
        for (std::size_t k = 0; k < f.walk.size(); ++k) out[f.walk[k].vertex].push_back({f.id, k, f.corner_angles[k]});
    return out;
}

} // namespace conalloc
