#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

#include "conalloc/allocation_file.hpp"
#include "conalloc/msf.hpp"

namespace conalloc {

struct RenderOptions {
    double width_px = 1000.0;
    double margin_px = 10.0;
    bool draw_tree = true;
    bool draw_points = true;
    std::uint64_t palette_seed = 0;
};

/// "#rrggbb" for a vertex: hue from a hash of the id, fixed saturation and
/// lightness in two bands so neighbours rarely look alike.
std::string owner_color(std::size_t owner, std::uint64_t palette_seed = 0);

/// SVG 1.1. Unclaimed cells are white, undefined cells hatched; runs of equal
/// cells in a row become one rect. Output depends only on the inputs.
void render_svg(const AllocationFile& file, std::span<const Point> points, const Forest& forest, std::ostream& out,
                const RenderOptions& options = {});

} // namespace conalloc
