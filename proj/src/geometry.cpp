#include "conalloc/geometry.hpp"

#include <algorithm>
#include <numeric>

namespace conalloc {

double distance_to_segment(Point p, Point a, Point b) {
    const Point ab = b - a;
    const double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(p - a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return std::abs(p - (a + t * ab));
}

bool segments_cross(Point p, Point q, Point a, Point b) {
    const double d1 = orient(a, b, p);
    const double d2 = orient(a, b, q);
    const double d3 = orient(p, q, a);
    const double d4 = orient(p, q, b);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

std::vector<std::size_t> convex_hull(std::span<const Point> points) {
    const std::size_t n = points.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
        if (points[i].real() != points[j].real()) return points[i].real() < points[j].real();
        return points[i].imag() < points[j].imag();
    });
    if (n < 3) return idx;

    // Andrew's monotone chain.
    std::vector<std::size_t> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && orient(points[hull[k - 2]], points[hull[k - 1]], points[idx[i]]) <= 0) --k;
        hull[k++] = idx[i];
    }
    for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
        while (k >= t && orient(points[hull[k - 2]], points[hull[k - 1]], points[idx[i]]) <= 0) --k;
        hull[k++] = idx[i];
    }
    hull.resize(k - 1);
    return hull;
}

} // namespace conalloc

namespace conalloc {

int winding_number(std::span<const Point> polygon, Point p) {
    int wn = 0;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = polygon[i], b = polygon[(i + 1) % n];
        if (a.imag() <= p.imag()) {
            if (b.imag() > p.imag() && orient(a, b, p) > 0) ++wn;
        } else if (b.imag() <= p.imag() && orient(a, b, p) < 0) {
            --wn;
        }
    }
    return wn;
}

} // namespace conalloc
