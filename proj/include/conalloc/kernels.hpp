#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "conalloc/conformal.hpp"
#include "conalloc/geometry.hpp"

namespace conalloc {

/// A cell of the global grid of side h; its center is ((ix + 0.5) h, (iy + 0.5) h)
/// unless it was jittered off a boundary segment.
struct Cell {
    std::int64_t ix = 0, iy = 0;
    Point center{};
    bool jittered = false;
};

/// Center of grid cell (ix, iy) before any jitter.
Point cell_center(std::int64_t ix, std::int64_t iy, double h);

/// Fixed sub-cell offset applied to centers within 1e-9 of the boundary.
Point cell_jitter(double h);

/// Grid cells whose centers have winding number 1 with respect to the closed
/// walk `polygon`. Row-major order (iy, then ix).
std::vector<Cell> classify_cells(std::span<const Point> polygon, double h);
std::vector<Cell> classify_cells_serial(std::span<const Point> polygon, double h);

std::vector<FlaggedImage> map_points_forward(const MapChain& chain, std::span<const Point> points);
std::vector<FlaggedImage> map_points_forward_serial(const MapChain& chain, std::span<const Point> points);

} // namespace conalloc
