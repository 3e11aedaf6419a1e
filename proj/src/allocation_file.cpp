#include "conalloc/allocation_file.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "conalloc/errors.hpp"
#include "conalloc/pointproc.hpp"

namespace conalloc {

namespace {

std::string owner_text(std::size_t owner) {
    if (owner == kUnclaimed) return "unclaimed";
    if (owner == kUndefined) return "undefined";
    return std::to_string(owner);
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t begin = 0;
    for (;;) {
        const std::size_t tab = line.find('\t', begin);
        out.push_back(line.substr(begin, tab - begin));
        if (tab == std::string::npos) break;
        begin = tab + 1;
    }
    return out;
}

template <class T>
T parse_number(const std::string& text, std::size_t line, const char* what) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        throw ParseError(std::string("bad ") + what + " '" + text + "'", line);
    return value;
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    std::vector<std::string> fields(const char* expect) {
        std::string line;
        if (!std::getline(in_, line)) throw ParseError(std::string("truncated file: expected ") + expect, line_ + 1);
        ++line_;
        return split_tabs(line);
    }

    std::string value(const char* key) {
        const auto f = fields(key);
        if (f.size() != 2 || f[0] != key) throw ParseError(std::string("expected '") + key + "' header line", line_);
        return f[1];
    }

    std::size_t line() const { return line_; }

    bool at_end() {
        return in_.peek() == std::char_traits<char>::eof();
    }

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

constexpr const char* kMagic = "# conalloc allocation";
constexpr const char* kColumns = "face\tix\tiy\towner\tcorner";

} // namespace

AllocationFile make_allocation_file(const PipelineResult& result) {
    AllocationFile file;
    file.h = result.global.h;
    file.mode = result.global.mode;
    file.point_count = result.points.size();
    file.face_count = result.faces.size();
    for (const FaceResult& r : result.results) file.face_maps.push_back({r.spacing, r.start_rank});
    file.cells = result.global.cells;
    return file;
}

void write_allocation(const AllocationFile& file, std::ostream& out) {
    out << kMagic << '\n';
    out << "version\t" << file.version << '\n';
    out << "h\t" << format_double(file.h) << '\n';
    out << "mode\t" << to_string(file.mode) << '\n';
    out << "points\t" << file.point_count << '\n';
    out << "faces\t" << file.face_count << '\n';
    for (std::size_t f = 0; f < file.face_maps.size(); ++f)
        out << "face_map\t" << f << '\t' << format_double(file.face_maps[f].spacing) << '\t'
            << file.face_maps[f].start_rank << '\n';
    out << "cells\t" << file.cells.size() << '\n';
    out << kColumns << '\n';
    for (const CellOwner& c : file.cells) {
        out << c.face << '\t' << c.ix << '\t' << c.iy << '\t' << owner_text(c.owner) << '\t';
        if (c.corner == kUnclaimed) out << '-';
        else out << c.corner;
        out << '\n';
    }
}

void write_allocation(const AllocationFile& file, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParameterError("cannot write " + path.string());
    write_allocation(file, out);
    if (!out) throw ParameterError("write failed for " + path.string());
}

AllocationFile read_allocation(std::istream& in) {
    LineReader rd(in);
    AllocationFile file;
    {
        const auto f = rd.fields("header");
        if (f.size() != 1 || f[0] != kMagic) throw ParseError("not an allocation file", rd.line());
    }
    file.version = parse_number<int>(rd.value("version"), rd.line(), "version");
    if (file.version != AllocationFile::kVersion)
        throw ParseError("unsupported version " + std::to_string(file.version), rd.line());
    file.h = parse_number<double>(rd.value("h"), rd.line(), "grid size");
    if (!(file.h > 0.0)) throw ParseError("grid size must be positive", rd.line());
    try {
        file.mode = parse_mode(rd.value("mode"));
    } catch (const ParameterError& e) {
        throw ParseError(e.what(), rd.line());
    }
    file.point_count = parse_number<std::size_t>(rd.value("points"), rd.line(), "point count");
    file.face_count = parse_number<std::size_t>(rd.value("faces"), rd.line(), "face count");
    for (std::size_t f = 0; f < file.face_count; ++f) {
        const auto x = rd.fields("face_map");
        if (x.size() != 4 || x[0] != "face_map" || parse_number<std::size_t>(x[1], rd.line(), "face id") != f)
            throw ParseError("expected face_map line for face " + std::to_string(f), rd.line());
        file.face_maps.push_back({parse_number<double>(x[2], rd.line(), "spacing"),
                                  parse_number<std::size_t>(x[3], rd.line(), "start rank")});
    }
    const auto count = parse_number<std::size_t>(rd.value("cells"), rd.line(), "cell count");
    {
        const auto f = rd.fields("column header");
        if (f.size() != 5) throw ParseError("expected column header", rd.line());
    }
    file.cells.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto x = rd.fields("cell record");
        if (x.size() != 5) throw ParseError("expected 5 fields", rd.line());
        CellOwner c;
        c.face = parse_number<std::size_t>(x[0], rd.line(), "face");
        if (c.face >= file.face_count) throw ParseError("face id out of range", rd.line());
        c.ix = parse_number<std::int64_t>(x[1], rd.line(), "ix");
        c.iy = parse_number<std::int64_t>(x[2], rd.line(), "iy");
        if (x[3] == "unclaimed") c.owner = kUnclaimed;
        else if (x[3] == "undefined") c.owner = kUndefined;
        else {
            c.owner = parse_number<std::size_t>(x[3], rd.line(), "owner");
            if (c.owner >= file.point_count) throw ParseError("owner out of range", rd.line());
        }
        c.corner = x[4] == "-" ? kUnclaimed : parse_number<std::size_t>(x[4], rd.line(), "corner");
        file.cells.push_back(c);
    }
    if (!rd.at_end()) throw ParseError("trailing data after the declared cells", rd.line() + 1);
    return file;
}

AllocationFile read_allocation(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    return read_allocation(in);
}

PipelineConfig config_from_file(const AllocationFile& file) {
    PipelineConfig config;
    config.h = file.h;
    config.mode = file.mode;
    config.face_settings = file.face_maps;
    return config;
}

void adopt_owners(PipelineResult& result, const AllocationFile& file) {
    if (file.point_count != result.points.size())
        throw ConsistencyError("allocation file has " + std::to_string(file.point_count) + " points, points file has " +
                               std::to_string(result.points.size()));
    if (file.face_count != result.faces.size()) throw ConsistencyError("face count does not match the points");
    std::size_t total = 0;
    for (const CellGrid& g : result.grids) total += g.cells.size();
    if (file.cells.size() != total) throw ConsistencyError("cell count does not match the recomputed grid");

    std::size_t next = 0;
    for (std::size_t f = 0; f < result.faces.size(); ++f) {
        const Face& face = result.faces[f];
        const CellGrid& grid = result.grids[f];
        FaceResult& r = result.results[f];
        std::vector<std::size_t> by_step(face.walk.size(), kUnclaimed);
        for (std::size_t c = 0; c < r.centers.size(); ++c) by_step[r.centers[c].id] = c;

        std::vector<std::size_t> owners(grid.cells.size(), kUndefined);
        for (std::size_t i = 0; i < grid.cells.size(); ++i, ++next) {
            const CellOwner& c = file.cells[next];
            const std::string where = "cell " + std::to_string(next) + " (face " + std::to_string(f) + ")";
            if (c.face != f || c.ix != grid.cells[i].ix || c.iy != grid.cells[i].iy)
                throw ConsistencyError(where + " is not the recomputed grid cell");
            const bool unusable = r.failed || r.assignment.owner[i] == kUndefined;
            if ((c.owner == kUndefined) != unusable)
                throw ConsistencyError(where + (unusable ? " has no image but is not undefined" : " is wrongly undefined"));
            if (c.owner == kUndefined || c.owner == kUnclaimed) {
                owners[i] = c.owner;
                continue;
            }
            if (c.corner >= face.walk.size() || face.walk[c.corner].vertex != c.owner || by_step[c.corner] == kUnclaimed)
                throw ConsistencyError(where + ": owner " + std::to_string(c.owner) + " has no corner in this face");
            owners[i] = by_step[c.corner];
        }
        if (!r.failed) r.assignment = assignment_from_owners(r.sites, r.centers, std::move(owners));
    }
    result.global = assemble(result.faces, result.results, result.grids, result.appetites, result.points.size(), file.h,
                             file.mode);
}

} // namespace conalloc
