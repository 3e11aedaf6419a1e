#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "conalloc/pipeline.hpp"

namespace conalloc {

/// Text allocation file: a versioned key/value header, the per-face map
/// settings needed to rebuild the maps, then one tab-separated record per cell.
struct AllocationFile {
    static constexpr int kVersion = 1;
    int version = kVersion;
    double h = 0.0;
    AppetiteMode mode = AppetiteMode::figure;
    std::size_t point_count = 0;
    std::size_t face_count = 0;
    std::vector<FaceMapSetting> face_maps;
    std::vector<CellOwner> cells;
};

AllocationFile make_allocation_file(const PipelineResult& result);

void write_allocation(const AllocationFile& file, std::ostream& out);
void write_allocation(const AllocationFile& file, const std::filesystem::path& path);

/// Throws ParseError on malformed or truncated input.
AllocationFile read_allocation(std::istream& in);
AllocationFile read_allocation(const std::filesystem::path& path);

/// Pipeline settings that reproduce the maps recorded in a file.
PipelineConfig config_from_file(const AllocationFile& file);

/// Replaces the owners of a pipeline rerun by the file's and reassembles the
/// global allocation. Throws ConsistencyError when the file does not describe
/// the rerun's faces and cells.
void adopt_owners(PipelineResult& result, const AllocationFile& file);

} // namespace conalloc
