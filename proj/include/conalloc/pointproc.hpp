#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "conalloc/geometry.hpp"

namespace conalloc {

/// Region the centers are drawn from.
struct Domain {
    enum class Kind { disk, rectangle };

    Kind kind = Kind::disk;
    Point center{0.0, 0.0};
    double radius = 1.0;
    Point lo{0.0, 0.0};
    Point hi{1.0, 1.0};

    static Domain disk(Point center, double radius);
    static Domain rectangle(Point lo, Point hi);

    /// Strict containment.
    bool contains(Point p) const;
    double area() const;
};

struct Generation {
    enum class Kind { poisson, uniform_count, file };
    Kind kind = Kind::file;
    double intensity = 0.0;
    std::size_t count = 0;
};

/// A finite planar configuration of centers.
struct PointSample {
    std::vector<Point> points;
    Domain domain;
    std::uint64_t seed = 0;
    Generation generation;
    /// Number of general-position perturbations applied after sampling.
    std::size_t jitters = 0;
};

/// Portable seeded stream: SplitMix64 derives independent std::mt19937_64
/// seeds per purpose, and uniforms are built from the top 53 bits so the
/// output does not depend on the standard library's distributions.
class SeededStream {
public:
    SeededStream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();
    /// Uniform in [0, 1).
    double uniform();

    /// SplitMix64 finalizer, exposed for derived seeds.
    static std::uint64_t mix(std::uint64_t x);

private:
    std::mt19937_64 engine_;
};

PointSample sample_poisson(const Domain& domain, double intensity, std::uint64_t seed);
PointSample sample_uniform_count(const Domain& domain, std::size_t n, std::uint64_t seed);

/// Largest n for which the all-pairs distance tie check runs.
inline constexpr std::size_t kGeneralPositionCheckLimit = 4096;

/// Perturbs points (deterministic jitter of magnitude 1e-9) until no two
/// points coincide and no two pairwise distances agree within `tolerance`.
/// Returns the number of perturbations applied.
std::size_t enforce_general_position(std::vector<Point>& points, const Domain& domain,
                                     std::uint64_t seed, double tolerance = 1e-12);

/// Smallest relative gap between sorted pairwise distances (inf for n < 3).
double min_distance_gap(std::span<const Point> points);

PointSample read_points(std::istream& in, std::vector<std::string>* warnings = nullptr);
PointSample read_points(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);
void write_points(const PointSample& sample, std::ostream& out);
void write_points(const PointSample& sample, const std::filesystem::path& path);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

} // namespace conalloc
