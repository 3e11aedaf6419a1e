#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "conalloc/allocation_file.hpp"
#include "conalloc/errors.hpp"
#include "conalloc/pipeline.hpp"
#include "conalloc/pointproc.hpp"
#include "conalloc/render.hpp"

using namespace conalloc;

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3, kInvariant = 4 };

Domain parse_domain(const std::string& text) {
    if (text == "disk") return Domain::disk({0.0, 0.0}, 1.0);
    if (text.rfind("rect:", 0) == 0) {
        const std::string dims = text.substr(5);
        const auto x = dims.find('x');
        if (x != std::string::npos) {
            try {
                std::size_t used_w = 0, used_h = 0;
                const double w = std::stod(dims.substr(0, x), &used_w);
                const double h = std::stod(dims.substr(x + 1), &used_h);
                if (used_w == x && used_h == dims.size() - x - 1) return Domain::rectangle({0.0, 0.0}, {w, h});
            } catch (const std::logic_error&) {
            }
        }
    }
    throw ParameterError("domain must be 'disk' or 'rect:WxH', got '" + text + "'");
}

/// Writes to a file, or to stdout when the path is empty.
class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty()) return;
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
        if (!*file_) throw ParameterError("cannot write " + path);
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }
    void close() {
        if (file_) {
            file_->close();
            if (!*file_) throw Error("write failed");
        }
    }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::vector<Point> load_points(const std::string& path) {
    std::vector<std::string> warnings;
    PointSample s = read_points(std::filesystem::path(path), &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    return std::move(s.points);
}

std::string number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// ---- sample

struct SampleArgs {
    std::optional<std::size_t> n;
    std::optional<double> intensity;
    std::string domain = "disk";
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_sample(const SampleArgs& a) {
    const Domain domain = parse_domain(a.domain);
    PointSample s = a.n ? sample_uniform_count(domain, *a.n, a.seed) : sample_poisson(domain, *a.intensity, a.seed);
    Output out(a.out);
    write_points(s, out.stream());
    out.close();
    return kOk;
}

// ---- run

struct RunArgs {
    std::string points;
    double grid = 0.005;
    std::string mode = "figure";
    double spacing = 0.0;
    std::string out;
    std::string report;
};

void write_report(const PipelineResult& r, std::ostream& os, double seconds) {
    const SatednessReport sat = satedness_report(r.faces, r.results, r.global.h);
    const ConnectivityReport con = verify_connectivity(r.global, r.points, r.faces);
    os << "points: " << r.points.size() << '\n';
    os << "faces: " << r.faces.size() << '\n';
    os << "failed_faces: " << r.failed_faces() << '\n';
    os << "grid: " << format_double(r.global.h) << '\n';
    os << "mode: " << to_string(r.global.mode) << '\n';
    os << "base_spacing: " << number(r.base_spacing) << '\n';
    os << "cells: " << r.global.cells.size() << '\n';
    os << "unclaimed_cells: " << r.global.unclaimed << '\n';
    os << "undefined_cells: " << r.global.undefined << '\n';
    os << "unsated_corners: " << sat.unsated_centers << '\n';
    os << "dichotomy_violations: " << sat.dichotomy_violations.size() << '\n';
    os << "outside_tolerance: " << sat.outside_tolerance << '\n';
    os << "connected_centers: " << con.connected << '/' << con.with_cells << '\n';
    os << "connected_fraction: " << number(con.connected_fraction()) << '\n';
    std::size_t unstable = 0;
    for (const FaceResult& f : r.results)
        if (!f.failed && !check_stability(f.sites, f.centers, f.assignment).ok) ++unstable;
    os << "unstable_faces: " << unstable << '\n';
    os << "seconds: " << number(seconds) << '\n';
    for (std::size_t f = 0; f < r.results.size(); ++f) {
        const FaceResult& x = r.results[f];
        const auto& line = sat.faces[f];
        os << "face " << f << ": corners=" << r.faces[f].walk.size() << " cells=" << r.grids[f].cells.size();
        if (x.failed) {
            os << " failed=\"" << x.failure << "\"\n";
            continue;
        }
        os << " spacing=" << number(x.spacing) << " start=" << x.start_rank << " residual=" << number(x.boundary_residual)
           << " stages=" << x.assignment.stage_count << " ties=" << x.assignment.tie_count() << " reflected=" << x.reflected
           << " on_slit=" << x.on_slit << " unclaimed=" << line.unclaimed << " unsated=" << line.unsated
           << " worst_shortfall=" << number(line.worst_shortfall) << " tolerance=" << number(line.tolerance)
           << " gap_ratio=" << number(x.gaps.ratio) << '\n';
    }
}

int cmd_run(const RunArgs& a) {
    PipelineConfig config;
    config.h = a.grid;
    config.mode = parse_mode(a.mode);
    config.max_spacing = a.spacing;
    const auto points = load_points(a.points);
    const auto t0 = std::chrono::steady_clock::now();
    const PipelineResult r = run_pipeline(points, config);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    Output out(a.out);
    write_allocation(make_allocation_file(r), out.stream());
    out.close();

    if (!a.report.empty()) {
        Output rep(a.report);
        write_report(r, rep.stream(), seconds);
        rep.close();
    } else {
        write_report(r, a.out.empty() ? std::cerr : std::cout, seconds);
    }
    return r.failed_faces() > 0 ? kNumerical : kOk;
}

// ---- render

struct RenderArgs {
    std::string allocation;
    std::string points;
    std::string out;
    std::uint64_t palette_seed = 0;
    double width = 1000.0;
    bool no_tree = false;
    bool no_points = false;
};

int cmd_render(const RenderArgs& a) {
    const AllocationFile file = read_allocation(std::filesystem::path(a.allocation));
    const auto points = load_points(a.points);
    if (points.size() != file.point_count)
        throw ConsistencyError("allocation file has " + std::to_string(file.point_count) + " points, points file has " +
                               std::to_string(points.size()));
    const Forest forest = build_mst(points);
    RenderOptions opt;
    opt.palette_seed = a.palette_seed;
    opt.width_px = a.width;
    opt.draw_tree = !a.no_tree;
    opt.draw_points = !a.no_points;
    Output out(a.out);
    render_svg(file, points, forest, out.stream(), opt);
    out.close();
    return kOk;
}

// ---- verify

struct VerifyArgs {
    std::string allocation;
    std::string points;
};

int cmd_verify(const VerifyArgs& a) {
    const AllocationFile file = read_allocation(std::filesystem::path(a.allocation));
    const auto points = load_points(a.points);
    if (points.size() != file.point_count)
        throw ConsistencyError("allocation file has " + std::to_string(file.point_count) + " points, points file has " +
                               std::to_string(points.size()));
    PipelineResult r = run_pipeline(points, config_from_file(file));
    adopt_owners(r, file);

    std::optional<std::string> first;
    const auto fail = [&](const std::string& what) {
        std::cout << "FAIL " << what << '\n';
        if (!first) first = what;
    };

    std::size_t failed = 0;
    for (std::size_t f = 0; f < r.results.size(); ++f) {
        const FaceResult& x = r.results[f];
        if (x.failed) {
            ++failed;
            continue;
        }
        const StabilityReport st = check_stability(x.sites, x.centers, x.assignment);
        if (!st.ok) fail("stability face " + std::to_string(f) + ": " + st.detail);
        const StabilityReport shape = reach_check(x.sites, x.centers, x.assignment);
        if (!shape.ok) fail("territory shape face " + std::to_string(f) + ": " + shape.detail);
    }
    std::cout << "stability: checked " << r.results.size() - failed << " faces\n";

    const SatednessReport sat = satedness_report(r.faces, r.results, file.h);
    if (!sat.dichotomy_violations.empty())
        fail("face " + std::to_string(sat.dichotomy_violations.front()) + " has unclaimed cells and an unsated corner");
    if (sat.outside_tolerance > 0)
        fail(std::to_string(sat.outside_tolerance) + " corners miss their appetite by more than the face tolerance");
    std::cout << "satedness: unsated=" << sat.unsated_centers << " unclaimed=" << sat.unclaimed_cells
              << " outside_tolerance=" << sat.outside_tolerance << '\n';

    const ClosureReport closure = check_closure(r.points, r.faces, r.appetites, file.mode);
    if (!closure.ok) fail("closure: " + closure.detail);
    std::cout << "closure: angle_error=" << number(closure.worst_angle_error)
              << " appetite_error=" << number(closure.worst_appetite_error) << '\n';

    // Discrete territories can split along one-cell necks, so connectivity is
    // reported rather than enforced.
    const ConnectivityReport con = verify_connectivity(r.global, r.points, r.faces);
    std::cout << "connectivity: " << con.connected << '/' << con.with_cells << " = " << number(con.connected_fraction())
              << '\n';

    if (first) {
        std::cout << "first counterexample: " << *first << '\n';
        return kInvariant;
    }
    if (failed > 0) {
        std::cout << "partial: " << failed << " faces without a map\n";
        return kNumerical;
    }
    std::cout << "ok\n";
    return kOk;
}

// ---- stats

struct StatsArgs {
    std::string points;
    double spacing = 0.0;
    std::string out;
};

int cmd_stats(const StatsArgs& a) {
    const auto points = load_points(a.points);
    if (points.size() < 3) throw DegeneracyError("need at least three points for a bounded face");
    const Forest forest = build_mst(points);
    const auto faces = extract_faces(points, forest);
    const double base = a.spacing > 0.0 ? a.spacing : default_spacing(points, forest);
    PipelineConfig config;

    Output out(a.out);
    std::ostream& os = out.stream();
    std::size_t failed = 0;
    double overall = 1.0;
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const FaceMap map = build_face_map(points, faces[f], base, config);
        std::set<std::size_t> vertices;
        for (const WalkStep& w : faces[f].walk) vertices.insert(w.vertex);
        os << "face " << f << ": points=" << vertices.size() << " corners=" << faces[f].walk.size();
        if (!map.built) {
            ++failed;
            os << " failed=\"" << map.failure << "\"\n";
            continue;
        }
        const GapStats g = gap_stats(map.chain);
        overall = std::max(overall, g.ratio);
        os << " min=" << number(g.min) << " max=" << number(g.max) << " ratio=" << number(g.ratio)
           << " collapsed=" << g.collapsed << '\n';
        os << "  gaps:";
        for (double x : g.normalized) os << ' ' << number(x);
        os << '\n';
        // Decades of the normalized gaps; collapsed gaps get their own bin.
        std::map<int, std::size_t> hist;
        for (double x : g.normalized) hist[x > 0.0 ? static_cast<int>(std::floor(std::log10(x))) : -999]++;
        os << "  histogram:";
        for (const auto& [decade, count] : hist) {
            if (decade == -999) os << " zero:" << count;
            else os << " 1e" << decade << ':' << count;
        }
        os << '\n';
    }
    os << "max_ratio: " << number(overall) << '\n';
    out.close();
    return failed > 0 ? kNumerical : kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Connected stable allocations to the vertices of a planar minimal spanning tree"};
    app.require_subcommand(1);

    SampleArgs sample;
    auto* s = app.add_subcommand("sample", "Sample centers in a domain");
    auto* n_opt = s->add_option("--n", sample.n, "Number of uniform points");
    auto* i_opt = s->add_option("--intensity", sample.intensity, "Poisson intensity");
    n_opt->excludes(i_opt);
    s->add_option("--domain", sample.domain, "disk or rect:WxH");
    s->add_option("--seed", sample.seed, "Random seed");
    s->add_option("-o,--output", sample.out, "Output file (default: stdout)");

    RunArgs run;
    auto* r = app.add_subcommand("run", "Build the allocation for a points file");
    r->add_option("points", run.points, "Points file")->required();
    r->add_option("--grid", run.grid, "Grid cell size")->check(CLI::PositiveNumber);
    r->add_option("--mode", run.mode, "Appetite mode")->check(CLI::IsMember({"figure", "ideal"}));
    r->add_option("--spacing", run.spacing, "Boundary sample spacing (default: min(shortest tree edge / 4, 2 * grid))")
        ->check(CLI::NonNegativeNumber);
    r->add_option("-o,--output", run.out, "Allocation file (default: stdout)");
    r->add_option("--report", run.report, "Diagnostics file (default: stdout, or stderr when -o is missing)");

    RenderArgs render;
    auto* d = app.add_subcommand("render", "Render an allocation as SVG");
    d->add_option("allocation", render.allocation, "Allocation file")->required();
    d->add_option("points", render.points, "Points file")->required();
    d->add_option("-o,--output", render.out, "SVG file (default: stdout)");
    d->add_option("--palette-seed", render.palette_seed, "Palette seed");
    d->add_option("--width", render.width, "Width in pixels")->check(CLI::PositiveNumber);
    d->add_flag("--no-tree", render.no_tree, "Do not draw the tree");
    d->add_flag("--no-points", render.no_points, "Do not draw the centers");

    VerifyArgs verify;
    auto* v = app.add_subcommand("verify", "Check an allocation against its points");
    v->add_option("allocation", verify.allocation, "Allocation file")->required();
    v->add_option("points", verify.points, "Points file")->required();

    StatsArgs stats;
    auto* t = app.add_subcommand("stats", "Corner image gap statistics per face");
    t->add_option("points", stats.points, "Points file")->required();
    t->add_option("--spacing", stats.spacing, "Boundary sample spacing")->check(CLI::NonNegativeNumber);
    t->add_option("-o,--output", stats.out, "Output file (default: stdout)");

    try {
        app.parse(argc, argv);
        if (s->parsed() && !sample.n && !sample.intensity) throw CLI::RequiredError("--n or --intensity");
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (s->parsed()) return cmd_sample(sample);
        if (r->parsed()) return cmd_run(run);
        if (d->parsed()) return cmd_render(render);
        if (v->parsed()) return cmd_verify(verify);
        return cmd_stats(stats);
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    }
}
