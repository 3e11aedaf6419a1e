#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "conalloc/geometry.hpp"

namespace conalloc {

struct Edge {
    std::size_t a = 0;  // a < b
    std::size_t b = 0;
    double length = 0.0;

    std::size_t other(std::size_t v) const { return v == a ? b : a; }
    friend bool operator==(const Edge& x, const Edge& y) { return x.a == y.a && x.b == y.b; }
};

/// Euclidean minimum spanning tree with its rotation system.
struct Forest {
    std::size_t vertex_count = 0;
    /// Sorted lexicographically by (a, b).
    std::vector<Edge> edges;
    /// Per vertex: incident edge indices in counterclockwise direction order,
    /// rotated so the smallest edge index comes first.
    std::vector<std::vector<std::size_t>> rotation;
};

/// O(n^2) Prim. Throws ParameterError for n < 2, DegeneracyError for
/// coincident points.
Forest build_mst(std::span<const Point> points);

/// Assembles a Forest (sorted edges, rotation system) from an explicit edge list.
Forest make_forest(std::span<const Point> points, std::vector<Edge> edges);

struct MinimaxReport {
    bool ok = true;
    /// Offending tree edge, if any.
    std::optional<Edge> violation;
    std::string detail;
};

/// Checks the minimal-spanning-forest criterion: no tree edge (x, y) admits an
/// x-y path in the complete graph whose edges are all strictly shorter.
MinimaxReport verify_minimax(std::span<const Point> points, const Forest& forest);

/// Tree edges plus the convex-hull edges that are not already tree edges.
struct PlanarEdge {
    std::size_t a = 0, b = 0;
    bool tree = false;
    bool hull = false;
    std::size_t other(std::size_t v) const { return v == a ? b : a; }
};

struct PlanarGraph {
    std::vector<PlanarEdge> edges;                 // tree edges first, same order as Forest::edges
    std::vector<std::vector<std::size_t>> rotation; // counterclockwise, per vertex
    std::vector<std::size_t> hull;                 // counterclockwise hull vertices
    std::vector<bool> on_hull;
};

PlanarGraph planar_graph(std::span<const Point> points, const Forest& forest);

/// One prime-end step of a face boundary: stand at `vertex`, leave along
/// `out_edge` towards `next`. `in_edge` is the edge the walk arrived on.
struct WalkStep {
    std::size_t vertex = 0;
    std::size_t next = 0;
    std::size_t out_edge = 0;
    std::size_t in_edge = 0;
    /// The out edge is walked twice in this face (a slit side).
    bool doubled = false;
    /// The out edge belongs to the tree (otherwise it is a hull chord).
    bool tree = false;
};

struct Face {
    std::size_t id = 0;
    std::vector<WalkStep> walk;
    /// Interior sector angle at each step, in (0, 2pi]; slit tips are 2pi.
    std::vector<double> corner_angles;
    double area = 0.0;
    std::vector<Point> polygon;
};

/// Bounded faces of (tree + hull), each walked counterclockwise with the
/// interior on the left. Face ids follow the first half-edge (edge index,
/// direction) of each face, so they are invariant under rigid motions.
std::vector<Face> extract_faces(std::span<const Point> points, const Forest& forest);

struct Sector {
    std::size_t face = 0;
    std::size_t step = 0;
    double angle = 0.0;
};

/// Per vertex, the face sectors meeting at it.
std::vector<std::vector<Sector>> sector_angles(std::span<const Face> faces, std::size_t vertex_count);

} // namespace conalloc
