#include "conalloc/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <tuple>

#include "conalloc/errors.hpp"
#include "conalloc/pointproc.hpp"

namespace conalloc {

namespace {

std::string hex_rgb(double r, double g, double b) {
    const auto byte = [](double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", byte(r), byte(g), byte(b));
    return buf;
}

std::string hsl_to_hex(double hue, double s, double l) {
    const double c = (1.0 - std::abs(2.0 * l - 1.0)) * s;
    const double hp = hue / 60.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    switch (static_cast<int>(hp) % 6) {
    case 0: r = c, g = x; break;
    case 1: r = x, g = c; break;
    case 2: g = c, b = x; break;
    case 3: g = x, b = c; break;
    case 4: r = x, b = c; break;
    default: r = c, b = x; break;
    }
    const double m = l - c / 2.0;
    return hex_rgb(r + m, g + m, b + m);
}

// Fixed-point coordinates keep the text stable across platforms.
std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s = buf;
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
    if (s == "-0") s = "0";
    return s;
}

} // namespace

std::string owner_color(std::size_t owner, std::uint64_t palette_seed) {
    const std::uint64_t hash = SeededStream::mix(static_cast<std::uint64_t>(owner) ^ SeededStream::mix(palette_seed));
    const double hue = static_cast<double>(hash % 3600) / 10.0;
    const bool light = ((hash >> 20) & 1) != 0;
    return hsl_to_hex(hue, 0.65, light ? 0.68 : 0.50);
}

void render_svg(const AllocationFile& file, std::span<const Point> points, const Forest& forest, std::ostream& out,
                const RenderOptions& options) {
    if (points.size() != file.point_count) throw ParameterError("point count does not match the allocation file");
    const double h = file.h;

    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const Point& p : points) {
        xmin = std::min(xmin, p.real()), xmax = std::max(xmax, p.real());
        ymin = std::min(ymin, p.imag()), ymax = std::max(ymax, p.imag());
    }
    for (const CellOwner& c : file.cells) {
        xmin = std::min(xmin, static_cast<double>(c.ix) * h), xmax = std::max(xmax, static_cast<double>(c.ix + 1) * h);
        ymin = std::min(ymin, static_cast<double>(c.iy) * h), ymax = std::max(ymax, static_cast<double>(c.iy + 1) * h);
    }
    if (!std::isfinite(xmin)) xmin = ymin = 0.0, xmax = ymax = 1.0;
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
    const double scale = (options.width_px - 2.0 * options.margin_px) / span;
    const double width = options.width_px;
    const double height = (ymax - ymin) * scale + 2.0 * options.margin_px;
    const auto px = [&](double x) { return (x - xmin) * scale + options.margin_px; };
    const auto py = [&](double y) { return (ymax - y) * scale + options.margin_px; };

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(width) << "\" height=\""
        << num(height) << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n"
        << "<defs><pattern id=\"undefined\" patternUnits=\"userSpaceOnUse\" width=\"4\" height=\"4\">"
        << "<rect width=\"4\" height=\"4\" fill=\"#dddddd\"/>"
        << "<path d=\"M0,4 L4,0\" stroke=\"#555555\" stroke-width=\"0.7\"/></pattern></defs>\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

    std::vector<const CellOwner*> order;
    order.reserve(file.cells.size());
    for (const CellOwner& c : file.cells) order.push_back(&c);
    std::sort(order.begin(), order.end(), [](const CellOwner* a, const CellOwner* b) {
        return std::tie(a->iy, a->ix, a->face) < std::tie(b->iy, b->ix, b->face);
    });

    const auto fill = [&](std::size_t owner) {
        if (owner == kUnclaimed) return std::string("#ffffff");
        if (owner == kUndefined) return std::string("url(#undefined)");
        return owner_color(owner, options.palette_seed);
    };

    out << "<g shape-rendering=\"crispEdges\">\n";
    for (std::size_t i = 0; i < order.size();) {
        const CellOwner& first = *order[i];
        std::size_t j = i + 1;
        while (j < order.size() && order[j]->iy == first.iy && order[j]->owner == first.owner &&
               order[j]->ix == order[j - 1]->ix + 1)
            ++j;
        const double x0 = static_cast<double>(first.ix) * h;
        const double x1 = static_cast<double>(order[j - 1]->ix + 1) * h;
        const double y1 = static_cast<double>(first.iy + 1) * h;
        out << "<rect x=\"" << num(px(x0)) << "\" y=\"" << num(py(y1)) << "\" width=\"" << num((x1 - x0) * scale)
            << "\" height=\"" << num(h * scale) << "\" fill=\"" << fill(first.owner) << "\"/>\n";
        i = j;
    }
    out << "</g>\n";

    if (options.draw_tree) {
        out << "<g stroke=\"#000000\" stroke-width=\"1\" fill=\"none\">\n";
        for (const Edge& e : forest.edges)
            out << "<line x1=\"" << num(px(points[e.a].real())) << "\" y1=\"" << num(py(points[e.a].imag()))
                << "\" x2=\"" << num(px(points[e.b].real())) << "\" y2=\"" << num(py(points[e.b].imag())) << "\"/>\n";
        out << "</g>\n";
    }
    if (options.draw_points) {
        out << "<g fill=\"#000000\">\n";
        for (const Point& p : points)
            out << "<circle cx=\"" << num(px(p.real())) << "\" cy=\"" << num(py(p.imag())) << "\" r=\"2\"/>\n";
        out << "</g>\n";
    }
    out << "</svg>\n";
}

} // namespace conalloc
