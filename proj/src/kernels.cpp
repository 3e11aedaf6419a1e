#include "conalloc/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace conalloc {

namespace {

constexpr double kBoundaryTolerance = 1e-9;

struct Segment {
    Point a, b;
    double xlo, xhi, ylo, yhi;
};

std::vector<Segment> segments_of(std::span<const Point> polygon) {
    std::vector<Segment> out;
    for (std::size_t i = 0, n = polygon.size(); i < n; ++i) {
        const Point a = polygon[i], b = polygon[(i + 1) % n];
        out.push_back({a, b, std::min(a.real(), b.real()) - kBoundaryTolerance,
                       std::max(a.real(), b.real()) + kBoundaryTolerance,
                       std::min(a.imag(), b.imag()) - kBoundaryTolerance,
                       std::max(a.imag(), b.imag()) + kBoundaryTolerance});
    }
    return out;
}

bool near_boundary(const std::vector<Segment>& segs, Point p) {
    for (const Segment& s : segs) {
        if (p.real() < s.xlo || p.real() > s.xhi || p.imag() < s.ylo || p.imag() > s.yhi) continue;
        if (distance_to_segment(p, s.a, s.b) < kBoundaryTolerance) return true;
    }
    return false;
}

struct RowRange {
    std::int64_t ix0, ix1, iy0, iy1;
};

RowRange range_of(std::span<const Point> polygon, double h) {
    double x0 = polygon[0].real(), x1 = x0, y0 = polygon[0].imag(), y1 = y0;
    for (Point p : polygon) {
        x0 = std::min(x0, p.real());
        x1 = std::max(x1, p.real());
        y0 = std::min(y0, p.imag());
        y1 = std::max(y1, p.imag());
    }
    // Jitter can move a center by under half a cell, so pad by one cell.
    return {static_cast<std::int64_t>(std::floor(x0 / h)) - 1, static_cast<std::int64_t>(std::ceil(x1 / h)) + 1,
            static_cast<std::int64_t>(std::floor(y0 / h)) - 1, static_cast<std::int64_t>(std::ceil(y1 / h)) + 1};
}

void classify_row(std::span<const Point> polygon, const std::vector<Segment>& segs, double h, std::int64_t iy,
                  const RowRange& r, std::vector<Cell>& out) {
    for (std::int64_t ix = r.ix0; ix <= r.ix1; ++ix) {
        Point p = cell_center(ix, iy, h);
        bool jittered = false;
        if (near_boundary(segs, p)) {
            p += cell_jitter(h);
            jittered = true;
            if (near_boundary(segs, p)) continue;
        }
        if (winding_number(polygon, p) == 1) out.push_back({ix, iy, p, jittered});
    }
}

} // namespace

Point cell_center(std::int64_t ix, std::int64_t iy, double h) {
    return {(static_cast<double>(ix) + 0.5) * h, (static_cast<double>(iy) + 0.5) * h};
}

Point cell_jitter(double h) { return h * Point{0.1234567, 0.0765432}; }

std::vector<Cell> classify_cells_serial(std::span<const Point> polygon, double h) {
    std::vector<Cell> out;
    if (polygon.size() < 3) return out;
    const auto segs = segments_of(polygon);
    const RowRange r = range_of(polygon, h);
    for (std::int64_t iy = r.iy0; iy <= r.iy1; ++iy) classify_row(polygon, segs, h, iy, r, out);
    return out;
}

std::vector<Cell> classify_cells(std::span<const Point> polygon, double h) {
    if (polygon.size() < 3) return {};
    const auto segs = segments_of(polygon);
    const RowRange r = range_of(polygon, h);
    const auto rows = static_cast<std::size_t>(r.iy1 - r.iy0 + 1);
    std::vector<std::vector<Cell>> per_row(rows);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::size_t k = 0; k < rows; ++k)
        classify_row(polygon, segs, h, r.iy0 + static_cast<std::int64_t>(k), r, per_row[k]);
    std::vector<Cell> out;
    for (auto& row : per_row) out.insert(out.end(), row.begin(), row.end());
    return out;
}

std::vector<FlaggedImage> map_points_forward_serial(const MapChain& chain, std::span<const Point> points) {
    std::vector<FlaggedImage> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = map_forward_flagged(chain, points[i]);
    return out;
}

std::vector<FlaggedImage> map_points_forward(const MapChain& chain, std::span<const Point> points) {
    std::vector<FlaggedImage> out(points.size());
    const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = map_forward_flagged(chain, points[static_cast<std::size_t>(i)]);
    return out;
}

} // namespace conalloc
