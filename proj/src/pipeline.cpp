#include "conalloc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <unordered_map>

#include "conalloc/errors.hpp"

namespace conalloc {

std::string to_string(AppetiteMode mode) { return mode == AppetiteMode::ideal ? "ideal" : "figure"; }

AppetiteMode parse_mode(const std::string& text) {
    if (text == "ideal") return AppetiteMode::ideal;
    if (text == "figure") return AppetiteMode::figure;
    throw ParameterError("unknown appetite mode '" + text + "'");
}

std::vector<std::vector<double>> compute_appetites(std::span<const Face> faces, std::size_t vertex_count,
                                                   AppetiteMode mode) {
    std::vector<std::vector<double>> out(faces.size());
    if (mode == AppetiteMode::figure) {
        for (std::size_t f = 0; f < faces.size(); ++f) {
            const auto& angles = faces[f].corner_angles;
            const double total = std::accumulate(angles.begin(), angles.end(), 0.0);
            if (!(total > 0.0)) throw DegeneracyError("face " + std::to_string(f) + " has zero total angle");
            for (double a : angles) out[f].push_back(faces[f].area * a / total);
        }
        return out;
    }
    std::vector<double> total(vertex_count, 0.0);
    for (const Face& face : faces)
        for (std::size_t k = 0; k < face.walk.size(); ++k) total[face.walk[k].vertex] += face.corner_angles[k];
    for (std::size_t f = 0; f < faces.size(); ++f)
        for (std::size_t k = 0; k < faces[f].walk.size(); ++k) {
            const double t = total[faces[f].walk[k].vertex];
            if (!(t > 0.0)) throw DegeneracyError("vertex " + std::to_string(faces[f].walk[k].vertex) + " has zero total angle");
            out[f].push_back(faces[f].corner_angles[k] / t);
        }
    return out;
}

std::size_t CellGrid::jittered() const {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const Cell& c) { return c.jittered; }));
}

CellGrid discretize_face(const Face& face, double h) {
    if (!(h > 0.0)) throw ParameterError("grid size must be positive");
    CellGrid grid{face.id, h, classify_cells(face.polygon, h)};
    if (grid.cells.empty())
        throw ResolutionError("face " + std::to_string(face.id) + " has no cell centers inside at h = " + std::to_string(h));
    return grid;
}

FaceResult run_face(const Face& face, const MapChain& chain, const CellGrid& grid, std::span<const double> appetites) {
    FaceResult r;
    r.face = face.id;
    const double cell = grid.h * grid.h;
    for (std::size_t a = 0; a < chain.corner_images.size(); ++a) {
        const std::size_t step = chain.corner_steps[a];
        r.centers.push_back(make_center(step, chain.corner_images[a], appetites[step], cell));
    }
    r.gaps = gap_stats(chain);

    std::vector<Point> centers(grid.cells.size());
    for (std::size_t i = 0; i < grid.cells.size(); ++i) centers[i] = grid.cells[i].center;
    const auto images = map_points_forward(chain, centers);

    // Cells with no usable image stay out of the allocation and end UNDEFINED.
    std::vector<Site> usable;
    std::vector<std::size_t> usable_index;
    r.sites.resize(grid.cells.size());
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        Point w = images[i].w;
        Site& s = r.sites[i];
        s.id = i;
        s.measure = cell;
        s.ix = grid.cells[i].ix;
        s.iy = grid.cells[i].iy;
        if (images[i].on_slit || !std::isfinite(w.real()) || !std::isfinite(w.imag())) {
            ++r.on_slit;
            s.position = w;
            continue;
        }
        if (w.imag() < 0.0) {
            // Interior points next to the boundary can land a rounding error
            // below the axis.
            w = std::conj(w);
            ++r.reflected;
        }
        if (w.imag() == 0.0) w.imag(std::numeric_limits<double>::min());
        s.position = w;
        usable.push_back(s);
        usable_index.push_back(i);
    }

    const Assignment inner = stable_allocate_balls(usable, r.centers);
    r.assignment = inner;
    r.assignment.owner.assign(grid.cells.size(), kUndefined);
    r.assignment.tie.assign(grid.cells.size(), false);
    for (std::size_t j = 0; j < usable.size(); ++j) {
        r.assignment.owner[usable_index[j]] = inner.owner[j];
        r.assignment.tie[usable_index[j]] = inner.tie[j];
    }
    return r;
}

GlobalAllocation assemble(std::span<const Face> faces, std::span<const FaceResult> results, std::span<const CellGrid> grids,
                          const std::vector<std::vector<double>>& appetites, std::size_t vertex_count, double h,
                          AppetiteMode mode) {
    GlobalAllocation g;
    g.h = h;
    g.mode = mode;
    g.vertex_count = vertex_count;
    g.face_count = faces.size();
    g.claimed.assign(vertex_count, 0.0);
    g.appetite.assign(vertex_count, 0.0);
    const double cell = h * h;
    for (std::size_t f = 0; f < faces.size(); ++f) {
        for (std::size_t k = 0; k < faces[f].walk.size(); ++k) g.appetite[faces[f].walk[k].vertex] += appetites[f][k];
        const FaceResult& r = results[f];
        for (std::size_t i = 0; i < grids[f].cells.size(); ++i) {
            CellOwner c{f, grids[f].cells[i].ix, grids[f].cells[i].iy, kUndefined, kUnclaimed, grids[f].cells[i].jittered};
            if (!r.failed) {
                const std::size_t o = r.assignment.owner[i];
                if (o == kUnclaimed) {
                    c.owner = kUnclaimed;
                } else if (o < r.centers.size()) {
                    c.corner = r.centers[o].id;
                    c.owner = faces[f].walk[c.corner].vertex;
                }
            }
            if (c.owner == kUnclaimed) ++g.unclaimed;
            else if (c.owner == kUndefined) ++g.undefined;
            else g.claimed[c.owner] += cell;
            g.cells.push_back(c);
        }
    }
    return g;
}

namespace {

struct DisjointSets {
    std::vector<std::size_t> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void join(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

std::uint64_t cell_key(std::int64_t ix, std::int64_t iy) {
    return (static_cast<std::uint64_t>(ix) << 32) ^ static_cast<std::uint64_t>(iy & 0xffffffff);
}

} // namespace

ConnectivityReport verify_connectivity(const GlobalAllocation& g, std::span<const Point> points,
                                       std::span<const Face> faces) {
    const std::size_t n = g.cells.size();
    const std::size_t v = g.vertex_count;
    DisjointSets sets(n + v);

    std::vector<std::vector<std::pair<Point, Point>>> slits(faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f)
        for (const WalkStep& s : faces[f].walk)
            if (s.doubled && s.vertex < s.next) slits[f].push_back({points[s.vertex], points[s.next]});

    std::size_t begin = 0;
    while (begin < n) {
        const std::size_t f = g.cells[begin].face;
        std::size_t end = begin;
        std::unordered_map<std::uint64_t, std::size_t> at;
        while (end < n && g.cells[end].face == f) {
            at[cell_key(g.cells[end].ix, g.cells[end].iy)] = end;
            ++end;
        }
        for (std::size_t i = begin; i < end; ++i) {
            const CellOwner& c = g.cells[i];
            if (c.owner >= v) continue;
            const Point pc = cell_center(c.ix, c.iy, g.h);
            if (std::abs(pc - points[c.owner]) <= 2.0 * g.h) sets.join(i, n + c.owner);
            for (const auto& [dx, dy] : {std::pair{1, 0}, std::pair{0, 1}}) {
                const auto it = at.find(cell_key(c.ix + dx, c.iy + dy));
                if (it == at.end() || g.cells[it->second].owner != c.owner) continue;
                const Point pn = cell_center(c.ix + dx, c.iy + dy, g.h);
                const Point qc = pc + (c.jittered ? cell_jitter(g.h) : Point{});
                const Point qn = pn + (g.cells[it->second].jittered ? cell_jitter(g.h) : Point{});
                bool blocked = false;
                for (const auto& [a, b] : slits[f])
                    if (segments_cross(qc, qn, a, b)) {
                        blocked = true;
                        break;
                    }
                if (!blocked) sets.join(i, it->second);
            }
        }
        begin = end;
    }

    ConnectivityReport r;
    r.components.assign(v, 0);
    std::vector<std::set<std::size_t>> roots(v);
    for (std::size_t i = 0; i < n; ++i)
        if (g.cells[i].owner < v) roots[g.cells[i].owner].insert(sets.find(i));
    for (std::size_t x = 0; x < v; ++x) {
        r.components[x] = roots[x].size();
        if (r.components[x] > 0) {
            ++r.with_cells;
            if (r.components[x] == 1) ++r.connected;
        }
    }
    return r;
}

std::size_t boundary_cell_count(const Face& face, double h) {
    std::set<std::pair<std::int64_t, std::int64_t>> cells;
    const auto& poly = face.polygon;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point a = poly[i], b = poly[(i + 1) % poly.size()];
        const auto steps = static_cast<std::size_t>(std::ceil(16.0 * std::abs(b - a) / h)) + 1;
        for (std::size_t k = 0; k <= steps; ++k) {
            const Point p = a + (b - a) * (static_cast<double>(k) / static_cast<double>(steps));
            cells.insert({static_cast<std::int64_t>(std::floor(p.real() / h)),
                          static_cast<std::int64_t>(std::floor(p.imag() / h))});
        }
    }
    return cells.size();
}

SatednessReport satedness_report(std::span<const Face> faces, std::span<const FaceResult> results, double h) {
    SatednessReport rep;
    const double cell = h * h;
    std::size_t vertices = 0;
    for (const Face& f : faces)
        for (const WalkStep& s : f.walk) vertices = std::max(vertices, s.vertex + 1);
    std::vector<double> filled(vertices, 0.0), appetite(vertices, 0.0);

    for (std::size_t f = 0; f < results.size(); ++f) {
        const FaceResult& r = results[f];
        SatednessReport::FaceLine line;
        line.face = r.face;
        if (r.failed) {
            rep.faces.push_back(line);
            continue;
        }
        line.tolerance = static_cast<double>(r.boundary_cells + r.centers.size()) * cell;
        for (std::size_t o : r.assignment.owner)
            if (o == kUnclaimed) ++line.unclaimed;
        for (std::size_t c = 0; c < r.centers.size(); ++c) {
            const Center& ctr = r.centers[c];
            const double got = static_cast<double>(r.assignment.count[c]) * cell;
            const std::size_t vtx = faces[f].walk[ctr.id].vertex;
            filled[vtx] += got;
            appetite[vtx] += ctr.appetite;
            if (r.assignment.count[c] < ctr.capacity_cells) ++line.unsated;
            const double shortfall = std::abs(ctr.appetite - got);
            line.worst_shortfall = std::max(line.worst_shortfall, shortfall);
            if (shortfall > line.tolerance) ++rep.outside_tolerance;
        }
        rep.unclaimed_cells += line.unclaimed;
        rep.unsated_centers += line.unsated;
        if (line.unclaimed > 0 && line.unsated > 0) rep.dichotomy_violations.push_back(r.face);
        rep.faces.push_back(line);
    }
    rep.ratio.resize(vertices);
    for (std::size_t x = 0; x < vertices; ++x) rep.ratio[x] = appetite[x] > 0.0 ? filled[x] / appetite[x] : 1.0;
    return rep;
}

ClosureReport check_closure(std::span<const Point> points, std::span<const Face> faces,
                            const std::vector<std::vector<double>>& appetites, AppetiteMode mode, double tolerance) {
    ClosureReport rep;
    const auto flag = [&](double err, double& worst, const std::string& what) {
        worst = std::max(worst, err);
        if (err > tolerance && rep.ok) {
            rep.ok = false;
            rep.detail = what + " off by " + std::to_string(err);
        }
    };
    const std::size_t n = points.size();
    std::vector<double> angle(n, 0.0), appetite(n, 0.0);
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const Face& face = faces[f];
        double sum = 0.0, app = 0.0;
        for (std::size_t k = 0; k < face.walk.size(); ++k) {
            sum += face.corner_angles[k];
            angle[face.walk[k].vertex] += face.corner_angles[k];
            appetite[face.walk[k].vertex] += appetites[f][k];
            app += appetites[f][k];
        }
        const double expect = (static_cast<double>(face.walk.size()) - 2.0) * std::numbers::pi;
        flag(std::abs(sum - expect) / expect, rep.worst_angle_error, "corner angles of face " + std::to_string(f));
        if (mode == AppetiteMode::figure)
            flag(std::abs(app - face.area) / face.area, rep.worst_appetite_error, "appetites of face " + std::to_string(f));
    }
    if (faces.empty()) return rep;

    std::vector<double> full(n, 2.0 * std::numbers::pi);
    const auto hull = convex_hull(points);
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const std::size_t prev = hull[(i + hull.size() - 1) % hull.size()], v = hull[i], next = hull[(i + 1) % hull.size()];
        full[v] = ccw_angle(points[next] - points[v], points[prev] - points[v]);
    }
    for (std::size_t v = 0; v < n; ++v) {
        flag(std::abs(angle[v] - full[v]) / full[v], rep.worst_angle_error, "sector angles at vertex " + std::to_string(v));
        if (mode == AppetiteMode::ideal)
            flag(std::abs(appetite[v] - 1.0), rep.worst_appetite_error, "appetite of vertex " + std::to_string(v));
    }
    return rep;
}

std::size_t PipelineResult::failed_faces() const {
    return static_cast<std::size_t>(std::count_if(results.begin(), results.end(), [](const FaceResult& r) { return r.failed; }));
}

double default_spacing(std::span<const Point> points, const Forest& forest) {
    double shortest = std::numeric_limits<double>::infinity();
    for (const Edge& e : forest.edges) shortest = std::min(shortest, std::abs(points[e.a] - points[e.b]));
    if (!std::isfinite(shortest) || !(shortest > 0.0)) throw DegeneracyError("forest has no positive-length edge");
    return shortest / 4.0;
}

namespace {

double boundary_residual(const MapChain& chain, const BoundarySamples& samples) {
    double worst = 0.0;
    // Sample 0 is the point sent to infinity.
    for (std::size_t k = 1; k < samples.points.size(); ++k)
        worst = std::max(worst, std::abs(map_forward(chain, samples.points[k]).imag()));
    return worst / chain.scale;
}

} // namespace

FaceMap build_face_map(std::span<const Point> points, const Face& face, double spacing, const PipelineConfig& config,
                       const FaceMapSetting* fixed) {
    FaceMap out;
    if (fixed) spacing = fixed->spacing;
    const int rounds = fixed ? 1 : config.refinements + 1;
    // Crowding depends on where the walk starts, so other start edges are
    // tried before finer spacing.
    for (int t = 0; t < rounds; ++t, spacing *= 0.5) {
        out.spacing = spacing;
        std::size_t choices = 1;
        for (std::size_t k = 0; k < choices && k < config.start_attempts; ++k) {
            const std::size_t rank = fixed ? fixed->start_rank : k;
            out.start_rank = rank;
            try {
                const BoundarySamples samples = trace_boundary(points, face, spacing, rank);
                choices = fixed ? 1 : samples.start_choices;
                out.chain = build_map(samples);
                out.boundary_residual = boundary_residual(out.chain, samples);
                out.built = true;
                return out;
            } catch (const NumericalFailure& e) {
                out.failure = e.what();
            } catch (const Error& e) {
                out.failure = e.what();
                return out;
            }
        }
    }
    return out;
}

PipelineResult run_pipeline(std::span<const Point> points, const PipelineConfig& config) {
    if (!(config.h > 0.0)) throw ParameterError("grid size must be positive");
    if (points.size() < 3) throw DegeneracyError("need at least three points for a bounded face");
    PipelineResult out;
    out.points.assign(points.begin(), points.end());
    out.forest = build_mst(points);
    out.faces = extract_faces(points, out.forest);
    out.appetites = compute_appetites(out.faces, points.size(), config.mode);
    // Between samples the mapped boundary is an arc, not the straight edge;
    // keeping the spacing near h keeps that sliver below a cell.
    out.base_spacing = config.max_spacing > 0.0 ? config.max_spacing
                                                : std::min(default_spacing(points, out.forest), 2.0 * config.h);

    const std::size_t nf = out.faces.size();
    out.chains.resize(nf);
    out.grids.resize(nf);
    out.results.resize(nf);

    const auto count = static_cast<std::ptrdiff_t>(nf);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t fi = 0; fi < count; ++fi) {
        const auto f = static_cast<std::size_t>(fi);
        const Face& face = out.faces[f];
        CellGrid grid{face.id, config.h, classify_cells(face.polygon, config.h)};

        FaceMap map = build_face_map(points, face, out.base_spacing, config,
                                           f < config.face_settings.size() ? &config.face_settings[f] : nullptr);
        FaceResult result;
        if (map.built) {
            result = run_face(face, map.chain, grid, out.appetites[f]);
            result.boundary_residual = map.boundary_residual;
        } else {
            result.face = face.id;
            result.failed = true;
            result.failure = map.failure;
        }
        result.spacing = map.spacing;
        result.start_rank = map.start_rank;
        result.boundary_cells = boundary_cell_count(face, config.h);
        out.chains[f] = std::move(map.chain);
        out.grids[f] = std::move(grid);
        out.results[f] = std::move(result);
    }

    out.global = assemble(out.faces, out.results, out.grids, out.appetites, points.size(), config.h, config.mode);
    return out;
}

} // namespace conalloc
