#include "conalloc/conformal.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "conalloc/errors.hpp"

namespace conalloc {

namespace {

const Point kI{0.0, 1.0};
const Point kEighthTurn = std::polar(1.0, std::numbers::pi / 4.0);

// Square root with its cut along the downward vertical ray, arg in
// [-pi/2, 3pi/2). Points on the cut take the right-hand value.
Point sqrt_down_cut(Point u) {
    double turned_im = -u.real();
    if (turned_im == 0.0) turned_im = -0.0;
    return std::sqrt(Point(u.imag(), turned_im)) * kEighthTurn;
}

Point moebius(double b, Point z) { return std::isinf(b) ? z : z / (1.0 - z / b); }
Point moebius_inverse(double b, Point z) { return std::isinf(b) ? z : z / (1.0 + z / b); }

// sqrt(m^2 + c^2) as sqrt(m - ic) sqrt(m + ic): the only cut inside the
// closed upper half-plane is the segment [0, ic].
Point slit_sqrt(double c, Point m) { return sqrt_down_cut(m - Point(0.0, c)) * std::sqrt(m + Point(0.0, c)); }

// Image of infinity under the slit map.
double image_of_infinity(double b, double c) {
    if (std::isinf(b)) return kInf;
    return (b > 0 ? -1.0 : 1.0) * std::hypot(b, c);
}

// Real Moebius map fixing 0 and sending w0 to infinity.
Point renormalize_inverse(double w0, Point y) { return std::isinf(w0) ? y : y * w0 / (w0 + y); }

double renormalize_real(double w0, double w) {
    if (std::isinf(w0)) return w;
    if (std::isinf(w)) return -w0;
    return w * w0 / (w0 - w);
}

// Principal square root without the special-value handling of std::sqrt;
// keeps the sign of a zero imaginary part, like std::sqrt.
inline Point fast_sqrt(double x, double y) {
    const double r = std::sqrt(x * x + y * y);
    if (r == 0.0) return {0.0, y};
    const double t = std::sqrt(0.5 * (r + std::abs(x)));
    if (x >= 0.0) return {t, y / (2.0 * t)};
    return {std::abs(y) / (2.0 * t), std::copysign(t, y)};
}

// num / (dr + i di) without the library's scaled complex division.
inline Point divide(Point num, double dr, double di) {
    const double n = dr * dr + di * di;
    return {(num.real() * dr + num.imag() * di) / n, (num.imag() * dr - num.real() * di) / n};
}

Point apply_step(const ChainStep& s, Point z) {
    double x = z.real() - s.shift, y = z.imag();
    if (!std::isinf(s.b)) {
        // z / (1 - z/b) = b z / (b - z)
        const Point m = divide({s.b * x, s.b * y}, s.b - x, -y);
        x = m.real(), y = m.imag();
    }
    // sqrt(m - ic) with the cut turned downwards, times sqrt(m + ic).
    double ty = -x;
    if (ty == 0.0) ty = -0.0;
    const Point p = fast_sqrt(y - s.c, ty);
    const Point q = fast_sqrt(x, y + s.c);
    const double pr = p.real() * q.real() - p.imag() * q.imag();
    const double pi = p.real() * q.imag() + p.imag() * q.real();
    const double h = std::numbers::sqrt2 / 2.0;
    const Point w((pr - pi) * h, (pr + pi) * h);
    const double w0 = image_of_infinity(s.b, s.c);
    if (std::isinf(w0)) return w / s.c;
    return divide(w * (w0 / s.c), w0 - w.real(), -w.imag());
}

Point invert_step(const ChainStep& s, Point y) {
    const Point w = renormalize_inverse(image_of_infinity(s.b, s.c), y * s.c);
    return elementary_inverse(s.b, s.c, w) + s.shift;
}

// Boundary push for a point already on the real axis. The point sitting at
// the current zipper position (t == shift) is a processed prime end and goes
// to the negative side.
double push_real(const ChainStep& s, double t) {
    const double t1 = t - s.shift;
    double m;
    if (std::isinf(s.b)) m = t1;
    else if (t1 == s.b) m = kInf;
    else m = t1 / (1.0 - t1 / s.b);
    const double w = std::isinf(m) ? kInf : (m > 0.0 ? 1.0 : -1.0) * std::hypot(m, s.c);
    return renormalize_real(image_of_infinity(s.b, s.c), w) / s.c;
}

Point first_map(Point z0, Point z1, Point z) { return kI * std::sqrt((z - z1) / (z - z0)); }

Point first_map_inverse(Point z0, Point z1, Point zeta) {
    const Point q = -zeta * zeta;
    return (z1 - q * z0) / (1.0 - q);
}

Point zip_forward(const MapChain& chain, Point z) {
    Point w = first_map(chain.z0, chain.z1, z);
    for (const auto& s : chain.steps) w = apply_step(s, w);
    return w;
}

} // namespace

SlitParams slit_parameters(Point tip) {
    const double p = tip.real(), q = tip.imag();
    if (!(q > 0.0)) throw NumericalFailure("slit tip must lie in the open upper half-plane");
    const double r2 = std::norm(tip);
    SlitParams sp;
    sp.b = p == 0.0 ? kInf : r2 / p;
    sp.c = r2 / q;
    return sp;
}

Point elementary_forward(double b, double c, Point z) {
    if (!std::isinf(b) && z == Point(b, 0.0)) throw PoleError("slit map evaluated at its pole");
    return slit_sqrt(c, moebius(b, z));
}

Point elementary_inverse(double b, double c, Point w) {
    // Boundary values come from the upper side.
    const Point wc(w.real(), w.imag() > 0.0 ? w.imag() : 0.0);
    const Point s = std::sqrt(wc - c) * std::sqrt(wc + c);
    return moebius_inverse(b, s);
}

BoundarySamples trace_boundary(std::span<const Point> points, const Face& face, double max_spacing,
                               std::size_t start_rank) {
    if (!(max_spacing > 0.0)) throw ParameterError("max_spacing must be positive");
    const std::size_t m = face.walk.size();
    if (m < 2) throw DegeneracyError("face walk too short");

    auto edge_length = [&](const WalkStep& s) { return std::abs(points[s.next] - points[s.vertex]); };
    auto segments = [&](double len) {
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / max_spacing - 1e-9)));
    };

    // Start on a single-traversal edge: hull chords first, longest first.
    std::vector<std::size_t> candidates;
    for (std::size_t k = 0; k < m; ++k)
        if (!face.walk[k].doubled) candidates.push_back(k);
    if (candidates.empty()) throw DegeneracyError("face has no single-traversal edge");
    std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t p, std::size_t q) {
        const auto& a = face.walk[p];
        const auto& b = face.walk[q];
        if (a.tree != b.tree) return !a.tree;
        return edge_length(a) > edge_length(b);
    });
    const std::size_t start = candidates[start_rank % candidates.size()];

    BoundarySamples out;
    out.start_step = start;
    out.start_choices = candidates.size();
    double shortest = kInf;
    for (const auto& s : face.walk) shortest = std::min(shortest, edge_length(s));
    out.refinement_warning = max_spacing >= shortest;

    const std::size_t vertex_nodes = points.size();
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> interior_nodes;
    std::size_t next_node = vertex_nodes;
    auto interior_node = [&](std::size_t edge, std::size_t k) {
        auto [it, fresh] = interior_nodes.try_emplace({edge, k}, next_node);
        if (fresh) ++next_node;
        return it->second;
    };
    auto push = [&](Point p, std::size_t node) {
        out.points.push_back(p);
        out.node.push_back(node);
    };

    // Interior samples of a full edge, positioned canonically from the lower
    // vertex index so both sides of a slit get identical coordinates.
    auto emit_edge = [&](const WalkStep& s) {
        const std::size_t a = std::min(s.vertex, s.next), b = std::max(s.vertex, s.next);
        const std::size_t segs = segments(std::abs(points[b] - points[a]));
        for (std::size_t i = 1; i < segs; ++i) {
            const std::size_t k = s.vertex == a ? i : segs - i;
            const Point p = points[a] + (points[b] - points[a]) * (static_cast<double>(k) / static_cast<double>(segs));
            push(p, interior_node(s.out_edge, k));
        }
    };

    const WalkStep& first = face.walk[start];
    const Point u = points[first.vertex], v = points[first.next];
    const Point mid = 0.5 * (u + v);
    const std::size_t half_segs = segments(0.5 * std::abs(v - u));

    push(mid, next_node++);
    for (std::size_t i = 1; i < half_segs; ++i)
        push(mid + (v - mid) * (static_cast<double>(i) / static_cast<double>(half_segs)), next_node++);
    for (std::size_t r = 1; r <= m; ++r) {
        const std::size_t k = (start + r) % m;
        const WalkStep& s = face.walk[k];
        out.anchors.push_back(out.points.size());
        out.anchor_steps.push_back(k);
        push(points[s.vertex], s.vertex);
        if (k != start) {
            emit_edge(s);
        } else {
            for (std::size_t i = 1; i < half_segs; ++i)
                push(u + (mid - u) * (static_cast<double>(i) / static_cast<double>(half_segs)), next_node++);
        }
        if (s.doubled && s.vertex < s.next) out.slits.emplace_back(points[s.vertex], points[s.next]);
    }

    // Witness: the candidate inside the face farthest from its boundary.
    double x0 = face.polygon[0].real(), x1 = x0, y0 = face.polygon[0].imag(), y1 = y0;
    for (auto p : face.polygon) {
        x0 = std::min(x0, p.real());
        x1 = std::max(x1, p.real());
        y0 = std::min(y0, p.imag());
        y1 = std::max(y1, p.imag());
    }
    constexpr int grid = 32;
    double best_clearance = -1.0;
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            const Point p(x0 + (x1 - x0) * (i + 0.5) / grid, y0 + (y1 - y0) * (j + 0.5) / grid);
            if (winding_number(face.polygon, p) != 1) continue;
            double clearance = kInf;
            for (std::size_t k = 0; k < face.polygon.size(); ++k)
                clearance = std::min(clearance, distance_to_segment(p, face.polygon[k],
                                                                    face.polygon[(k + 1) % face.polygon.size()]));
            if (clearance > best_clearance) {
                best_clearance = clearance;
                out.witness = p;
            }
        }
    if (best_clearance < 0.0) {
        const Point along = v - u;
        out.witness = mid + Point(-along.imag(), along.real()) * 1e-3;
    }
    return out;
}

MapChain build_map(const BoundarySamples& samples) {
    const std::size_t n = samples.points.size();
    if (n < 3) throw ParameterError("need at least three boundary samples");
    if (samples.node.size() != n) throw ParameterError("node list does not match samples");
    for (std::size_t k = 0; k < n; ++k)
        if (samples.points[k] == samples.points[(k + 1) % n])
            throw DegeneracyError("consecutive boundary samples coincide at " + std::to_string(k));

    MapChain chain;
    chain.z0 = samples.points[0];
    chain.z1 = samples.points[1];
    chain.slits = samples.slits;
    chain.corner_steps = samples.anchor_steps;

    std::unordered_map<std::size_t, int> visits;
    std::vector<bool> first_visit(n);
    for (std::size_t k = 0; k < n; ++k) first_visit[k] = visits[samples.node[k]]++ == 0;
    if (visits[samples.node[0]] != 1 || visits[samples.node[1]] == 0 || !first_visit[1])
        throw ParameterError("walk must start on a single-traversal edge");

    std::vector<int> anchor_of(n, -1);
    for (std::size_t a = 0; a < samples.anchors.size(); ++a) {
        if (samples.anchors[a] >= n || samples.anchors[a] == 0)
            throw ParameterError("anchor index out of range");
        anchor_of[samples.anchors[a]] = static_cast<int>(a);
    }

    std::vector<Point> pending(n);
    for (std::size_t k = 2; k < n; ++k)
        if (first_visit[k]) pending[k] = first_map(chain.z0, chain.z1, samples.points[k]);

    // Real-axis points carried along: anchors (processed prime ends) and
    // right-hand copies of nodes still to be revisited.
    std::vector<double> tracked;
    std::vector<std::size_t> anchor_slot(samples.anchors.size(), 0);
    std::unordered_map<std::size_t, std::size_t> right_copy;
    double position = 0.0;  // current zipper point, before the pending shift

    auto mark_anchor = [&](std::size_t k) {
        if (anchor_of[k] >= 0) {
            anchor_slot[static_cast<std::size_t>(anchor_of[k])] = tracked.size();
            tracked.push_back(position);
        }
    };
    mark_anchor(1);

    chain.steps.reserve(n);
    for (std::size_t k = 2; k < n; ++k) {
        if (first_visit[k]) {
            const Point tip = pending[k] - position;
            if (!(tip.imag() > 0.0) || !std::isfinite(tip.real()) || !std::isfinite(tip.imag()))
                throw NumericalFailure("boundary sample " + std::to_string(k) +
                                       " left the upper half-plane; use a finer spacing");
            const SlitParams sp = slit_parameters(tip);
            if (!std::isfinite(sp.c) || std::isnan(sp.b))
                throw CrowdingError("slit parameters overflowed at boundary sample " + std::to_string(k));
            const ChainStep step{position, sp.b, sp.c};
            for (auto& t : tracked) t = push_real(step, t);
            right_copy[samples.node[k - 1]] = tracked.size();
            tracked.push_back(renormalize_real(image_of_infinity(step.b, step.c), step.c) / step.c);
            for (std::size_t j = k + 1; j < n; ++j)
                if (first_visit[j]) pending[j] = apply_step(step, pending[j]);
            chain.steps.push_back(step);
            position = 0.0;
        } else {
            auto it = right_copy.find(samples.node[k]);
            if (it == right_copy.end())
                throw NumericalFailure("revisited boundary node " + std::to_string(samples.node[k]) +
                                       " has no recorded image");
            const double r = tracked[it->second];
            if (!std::isfinite(r)) throw CrowdingError("tracked boundary image overflowed at sample " + std::to_string(k));
            // Under crowding the arc between the two copies can shrink below
            // the spacing of doubles; the gap collapses to zero and shows up
            // in gap_stats. A clearly negative gap is a real failure.
            if (r < position - 1e-9 * std::max(1.0, std::abs(position)))
                throw NumericalFailure("boundary images out of order at sample " + std::to_string(k) + " (" +
                                       std::to_string(r) + " < " + std::to_string(position) + ")");
            position = std::max(r, position);
            right_copy.erase(it);
        }
        mark_anchor(k);
    }

    chain.terminal.shift = position;
    const Point zeta = zip_forward(chain, samples.witness) - position;
    const Point sq = zeta * zeta;
    if (!std::isfinite(sq.real()) || !std::isfinite(sq.imag()) || std::abs(sq.imag()) <= 1e-12 * std::abs(sq))
        throw NumericalFailure("interior witness does not separate the half-planes");
    chain.terminal.sign = sq.imag() < 0.0 ? -1 : 1;

    chain.corner_images.reserve(samples.anchors.size());
    chain.scale = 0.0;
    for (auto slot : anchor_slot) {
        const double t = tracked[slot] - position;
        const double u = chain.terminal.sign * t * t;
        if (!std::isfinite(u)) throw CrowdingError("corner image overflowed");
        chain.corner_images.push_back(u);
        chain.scale = std::max(chain.scale, std::abs(u));
    }
    if (chain.scale == 0.0) chain.scale = 1.0;
    return chain;
}

Point map_forward(const MapChain& chain, Point z) {
    const Point zeta = zip_forward(chain, z) - chain.terminal.shift;
    return static_cast<double>(chain.terminal.sign) * zeta * zeta;
}

FlaggedImage map_forward_flagged(const MapChain& chain, Point z) {
    FlaggedImage out{map_forward(chain, z), false};
    for (const auto& [a, b] : chain.slits)
        if (distance_to_segment(z, a, b) <= 1e-12 * (1.0 + std::abs(z))) out.on_slit = true;
    return out;
}

Point map_inverse(const MapChain& chain, Point w) {
    // Inverse squaring onto the quadrant the face occupies.
    const double im = w.imag() > 0.0 ? w.imag() : 0.0;
    Point zeta;
    if (chain.terminal.sign < 0) zeta = -std::sqrt(Point(-w.real(), -im));
    else zeta = std::sqrt(Point(w.real(), im));
    zeta += chain.terminal.shift;
    for (auto it = chain.steps.rbegin(); it != chain.steps.rend(); ++it) zeta = invert_step(*it, zeta);
    return first_map_inverse(chain.z0, chain.z1, zeta);
}

GapStats gap_stats(std::span<const double> images) {
    GapStats g;
    if (images.size() < 2) return g;
    std::vector<double> gaps;
    for (std::size_t k = 0; k + 1 < images.size(); ++k) gaps.push_back(images[k + 1] - images[k]);
    g.max = *std::max_element(gaps.begin(), gaps.end());
    g.min = *std::min_element(gaps.begin(), gaps.end());
    for (double d : gaps) {
        if (d <= 0.0) ++g.collapsed;
        g.normalized.push_back(g.max > 0.0 ? d / g.max : 0.0);
    }
    g.ratio = g.min > 0.0 ? g.max / g.min : kInf;
    return g;
}

GapStats gap_stats(const MapChain& chain) { return gap_stats(chain.corner_images); }

} // namespace conalloc
