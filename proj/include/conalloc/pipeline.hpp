#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "conalloc/allocation.hpp"
#include "conalloc/conformal.hpp"
#include "conalloc/kernels.hpp"
#include "conalloc/msf.hpp"

namespace conalloc {

enum class AppetiteMode {
    /// Every vertex has appetite 1, split over its sectors by angle.
    ideal,
    /// Each face's area is split over its corners by angle.
    figure,
};

std::string to_string(AppetiteMode mode);
AppetiteMode parse_mode(const std::string& text);

/// Appetite per face per walk step (one step per corner).
std::vector<std::vector<double>> compute_appetites(std::span<const Face> faces, std::size_t vertex_count,
                                                   AppetiteMode mode);

struct CellGrid {
    std::size_t face = 0;
    double h = 0.0;
    std::vector<Cell> cells;

    std::size_t jittered() const;
    double measure() const { return h * h * static_cast<double>(cells.size()); }
};

CellGrid discretize_face(const Face& face, double h);

/// Allocation inside one face, in half-plane coordinates.
struct FaceResult {
    std::size_t face = 0;
    std::size_t boundary_cells = 0;
    bool failed = false;
    std::string failure;
    double spacing = 0.0;
    std::size_t start_rank = 0;
    /// Center id = walk step of the corner.
    std::vector<Center> centers;
    std::vector<Site> sites;
    Assignment assignment;
    std::size_t reflected = 0;
    std::size_t on_slit = 0;
    double boundary_residual = 0.0;
    GapStats gaps;
};

FaceResult run_face(const Face& face, const MapChain& chain, const CellGrid& grid, std::span<const double> appetites);

/// One cell of the assembled allocation.
struct CellOwner {
    std::size_t face = 0;
    std::int64_t ix = 0, iy = 0;
    /// Vertex index, kUnclaimed or kUndefined.
    std::size_t owner = kUnclaimed;
    /// Walk step of the owning corner, kUnclaimed when there is none.
    std::size_t corner = kUnclaimed;
    bool jittered = false;
};

struct GlobalAllocation {
    double h = 0.0;
    AppetiteMode mode = AppetiteMode::figure;
    std::size_t vertex_count = 0;
    std::size_t face_count = 0;
    /// Face by face, each face's cells in row-major order.
    std::vector<CellOwner> cells;
    std::vector<double> claimed;  // per vertex
    std::vector<double> appetite; // per vertex
    std::size_t unclaimed = 0;
    std::size_t undefined = 0;
};

GlobalAllocation assemble(std::span<const Face> faces, std::span<const FaceResult> results, std::span<const CellGrid> grids,
                          const std::vector<std::vector<double>>& appetites, std::size_t vertex_count, double h,
                          AppetiteMode mode);

struct ConnectivityReport {
    /// Per vertex; 0 for vertices without cells.
    std::vector<std::size_t> components;
    std::size_t with_cells = 0;
    std::size_t connected = 0;
    double connected_fraction() const {
        return with_cells == 0 ? 1.0 : static_cast<double>(connected) / static_cast<double>(with_cells);
    }
};

/// Same-face 4-adjacency (not across a slit), plus a virtual node per vertex
/// joining its cells within 2h of it.
ConnectivityReport verify_connectivity(const GlobalAllocation& global, std::span<const Point> points,
                                       std::span<const Face> faces);

struct SatednessReport {
    /// Per face: unclaimed cells, unsated corners, the allowed shortfall.
    struct FaceLine {
        std::size_t face = 0;
        std::size_t unclaimed = 0;
        std::size_t unsated = 0;
        double tolerance = 0.0;
        double worst_shortfall = 0.0;
    };
    std::vector<FaceLine> faces;
    /// filled / appetite per vertex (1 when the appetite is 0).
    std::vector<double> ratio;
    std::size_t unsated_centers = 0;
    std::size_t unclaimed_cells = 0;
    /// Faces with both unclaimed cells and unsated corners.
    std::vector<std::size_t> dichotomy_violations;
    /// Corners whose filled measure misses the appetite by more than the
    /// face tolerance.
    std::size_t outside_tolerance = 0;
};

/// Grid cells of side h met by the face boundary. The cell count of a face
/// differs from its area / h^2 by at most this many.
std::size_t boundary_cell_count(const Face& face, double h);

/// Allowed per-corner shortfall: (boundary cells + corners) * h^2, covering
/// the cell-count error and the rounding of each capacity.
SatednessReport satedness_report(std::span<const Face> faces, std::span<const FaceResult> results, double h);

struct ClosureReport {
    bool ok = true;
    double worst_angle_error = 0.0;
    double worst_appetite_error = 0.0;
    std::string detail;
};

/// Angle and appetite bookkeeping: each face's corner angles sum to
/// (corners - 2) pi, the sectors at a vertex sum to 2 pi (its hull angle on the
/// hull), and appetites sum to the face area (figure) or to 1 per vertex (ideal).
ClosureReport check_closure(std::span<const Point> points, std::span<const Face> faces,
                            const std::vector<std::vector<double>>& appetites, AppetiteMode mode,
                            double tolerance = 1e-9);

struct FaceMapSetting {
    double spacing = 0.0;
    std::size_t start_rank = 0;
};

struct PipelineConfig {
    double h = 0.005;
    AppetiteMode mode = AppetiteMode::figure;
    /// Boundary sample spacing; 0 picks min((shortest tree edge) / 4, 2h).
    double max_spacing = 0.0;
    /// Spacing halvings tried after a numerical failure.
    int refinements = 3;
    /// Start edges tried per spacing.
    std::size_t start_attempts = 4;
    /// Per-face map settings to reuse instead of the adaptive search.
    std::vector<FaceMapSetting> face_settings;
};

struct PipelineResult {
    std::vector<Point> points;
    Forest forest;
    std::vector<Face> faces;
    std::vector<std::vector<double>> appetites;
    std::vector<MapChain> chains;
    std::vector<CellGrid> grids;
    std::vector<FaceResult> results;
    GlobalAllocation global;
    double base_spacing = 0.0;

    std::size_t failed_faces() const;
};

struct FaceMap {
    bool built = false;
    MapChain chain;
    double spacing = 0.0;
    std::size_t start_rank = 0;
    /// max |Im| of the boundary sample images over the chain scale.
    double boundary_residual = 0.0;
    std::string failure;
};

/// Builds a face map, retrying other start edges and then halved spacing
/// after numerical failures. A fixed setting is tried once as given.
FaceMap build_face_map(std::span<const Point> points, const Face& face, double spacing, const PipelineConfig& config,
                       const FaceMapSetting* fixed = nullptr);

double default_spacing(std::span<const Point> points, const Forest& forest);

PipelineResult run_pipeline(std::span<const Point> points, const PipelineConfig& config);

} // namespace conalloc
