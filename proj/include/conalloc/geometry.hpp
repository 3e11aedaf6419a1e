#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

namespace conalloc {

/// Planar points and half-plane points share one representation.
using Point = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double cross(Point a, Point b) { return a.real() * b.imag() - a.imag() * b.real(); }
inline double dot(Point a, Point b) { return a.real() * b.real() + a.imag() * b.imag(); }

/// Twice the signed area of (a, b, c); positive when counterclockwise.
inline double orient(Point a, Point b, Point c) { return cross(b - a, c - a); }

/// Signed shoelace area of a closed polygon (counterclockwise positive).
inline double signed_area(std::span<const Point> poly) {
    double twice = 0.0;
    for (std::size_t i = 0, n = poly.size(); i < n; ++i)
        twice += cross(poly[i], poly[(i + 1) % n]);
    return 0.5 * twice;
}

/// Counterclockwise angle needed to rotate direction `from` onto `to`, in [0, 2pi).
inline double ccw_angle(Point from, Point to) {
    double a = std::atan2(cross(from, to), dot(from, to));
    if (a < 0.0) a += kTwoPi;
    return a;
}

double distance_to_segment(Point p, Point a, Point b);

/// True when the open segments (p, q) and (a, b) properly cross.
bool segments_cross(Point p, Point q, Point a, Point b);

/// Convex hull, counterclockwise, as indices into `points` (no collinear
/// vertices). Returns fewer than three indices for degenerate input.
std::vector<std::size_t> convex_hull(std::span<const Point> points);

} // namespace conalloc

namespace conalloc {

/// Winding number of the closed polygon around p. Doubly traversed slit
/// edges cancel, so walks of slit domains work unchanged.
int winding_number(std::span<const Point> polygon, Point p);

} // namespace conalloc
