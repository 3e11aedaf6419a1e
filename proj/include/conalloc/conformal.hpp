#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "conalloc/geometry.hpp"
#include "conalloc/msf.hpp"

namespace conalloc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Parameters of the slit map removing the hyperbolic geodesic from 0 to `tip`:
/// for tip = p + iq, b = |tip|^2 / p (infinite when p = 0) and c = |tip|^2 / q.
struct SlitParams {
    double b = kInf;
    double c = 1.0;
};

SlitParams slit_parameters(Point tip);

/// sqrt(M(z)^2 + c^2) with M(z) = z / (1 - z/b); maps the closed upper
/// half-plane minus the geodesic onto the closed upper half-plane, 0 to c,
/// tip to 0. Throws PoleError at z == b.
Point elementary_forward(double b, double c, Point z);

/// Inverse of elementary_forward: M^-1(sqrt(w - c) sqrt(w + c)).
Point elementary_inverse(double b, double c, Point w);

/// A face boundary sampled for the zipper.
struct BoundarySamples {
    /// Walk order. points[0] is the midpoint of a single-traversal hull edge.
    std::vector<Point> points;
    /// Boundary location of each sample. The two sides of a slit share node
    /// ids; a vertex of tree degree d shows up under one node d times.
    std::vector<std::size_t> node;
    /// Sample indices of the face corners, in walk order.
    std::vector<std::size_t> anchors;
    /// Walk step of each anchor.
    std::vector<std::size_t> anchor_steps;
    /// A point well inside the domain; fixes the sign of the final squaring.
    Point witness{0.0, 0.0};
    /// Doubly traversed edges (plane segments).
    std::vector<std::pair<Point, Point>> slits;
    bool refinement_warning = false;
    /// Walk step whose edge holds points[0], and how many edges qualified.
    std::size_t start_step = 0;
    std::size_t start_choices = 1;
};

/// `start_rank` picks the start edge among the single-traversal edges ordered
/// hull chords first, then by decreasing length.
BoundarySamples trace_boundary(std::span<const Point> points, const Face& face, double max_spacing,
                               std::size_t start_rank = 0);

/// One zipper step: translate by -shift, apply the slit map (b, c), send the
/// image of infinity back to infinity with a real Moebius map fixing 0, and
/// divide by c so the next tip sits at unit scale.
struct ChainStep {
    double shift = 0.0;
    double b = kInf;
    double c = 1.0;
};

/// z -> sign * (z - shift)^2 after the last step. The chain keeps the start
/// sample at infinity throughout, so the usual Moebius pole d is always
/// infinite.
struct Terminal {
    double d = kInf;
    double shift = 0.0;
    int sign = -1;
};

/// Numerical Riemann map from a face onto the upper half-plane.
struct MapChain {
    Point z0{}, z1{};
    std::vector<ChainStep> steps;
    Terminal terminal;
    /// Image of each anchor on the real axis, nondecreasing in walk order.
    std::vector<double> corner_images;
    /// Walk step of each corner image.
    std::vector<std::size_t> corner_steps;
    /// max |corner image|
    double scale = 1.0;
    std::vector<std::pair<Point, Point>> slits;
};

MapChain build_map(const BoundarySamples& samples);

Point map_forward(const MapChain& chain, Point z);

struct FlaggedImage {
    Point w;
    /// z lies on a slit, so its prime end (and image) is ambiguous.
    bool on_slit = false;
};

FlaggedImage map_forward_flagged(const MapChain& chain, Point z);

Point map_inverse(const MapChain& chain, Point w);

struct GapStats {
    /// Consecutive corner-image gaps divided by the largest gap.
    std::vector<double> normalized;
    double min = 0.0;
    double max = 0.0;
    /// max / min, infinite when a gap collapsed to zero.
    double ratio = 1.0;
    std::size_t collapsed = 0;
};

GapStats gap_stats(const MapChain& chain);
GapStats gap_stats(std::span<const double> corner_images);

} // namespace conalloc
