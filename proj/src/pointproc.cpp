#include "conalloc/pointproc.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "conalloc/errors.hpp"

namespace conalloc {

namespace {

constexpr std::uint64_t kCountStream = 1;
constexpr std::uint64_t kPointStream = 2;
constexpr std::uint64_t kJitterStream = 3;

Point uniform_in(const Domain& d, SeededStream& rng) {
    if (d.kind == Domain::Kind::rectangle) {
        for (;;) {
            const double x = d.lo.real() + (d.hi.real() - d.lo.real()) * rng.uniform();
            const double y = d.lo.imag() + (d.hi.imag() - d.lo.imag()) * rng.uniform();
            // uniform() can return exactly 0, which lands on the closed edge.
            if (d.contains({x, y})) return {x, y};
        }
    }
    for (;;) {
        const double x = 2.0 * rng.uniform() - 1.0;
        const double y = 2.0 * rng.uniform() - 1.0;
        if (x * x + y * y < 1.0) {
            const Point p = d.center + d.radius * Point{x, y};
            if (d.contains(p)) return p;
        }
    }
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& token, double& out) {
    const char* first = token.data();
    const char* last = first + token.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && std::isfinite(out);
}

} // namespace

Domain Domain::disk(Point center, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw ParameterError("disk radius must be positive");
    Domain d;
    d.kind = Kind::disk;
    d.center = center;
    d.radius = radius;
    return d;
}

Domain Domain::rectangle(Point lo, Point hi) {
    if (!(hi.real() > lo.real()) || !(hi.imag() > lo.imag()))
        throw ParameterError("rectangle needs positive width and height");
    Domain d;
    d.kind = Kind::rectangle;
    d.lo = lo;
    d.hi = hi;
    return d;
}

bool Domain::contains(Point p) const {
    if (kind == Kind::disk) return std::norm(p - center) < radius * radius;
    return p.real() > lo.real() && p.real() < hi.real() && p.imag() > lo.imag() && p.imag() < hi.imag();
}

double Domain::area() const {
    if (kind == Kind::disk) return std::numbers::pi * radius * radius;
    return (hi.real() - lo.real()) * (hi.imag() - lo.imag());
}

std::uint64_t SeededStream::mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

SeededStream::SeededStream(std::uint64_t seed, std::uint64_t stream)
    : engine_(mix(mix(seed) ^ mix(stream + 0x632BE59BD9B4E019ull))) {}

std::uint64_t SeededStream::next_u64() { return engine_(); }

double SeededStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

PointSample sample_poisson(const Domain& domain, double intensity, std::uint64_t seed) {
    if (!(intensity >= 0.0) || !std::isfinite(intensity))
        throw ParameterError("intensity must be a nonnegative finite number");
    PointSample s;
    s.domain = domain;
    s.seed = seed;
    s.generation = {Generation::Kind::poisson, intensity, 0};
    if (intensity == 0.0) return s;

    // Count of a unit-rate arrival process on [0, mean].
    const double mean = intensity * domain.area();
    SeededStream counter(seed, kCountStream);
    std::size_t count = 0;
    double t = 0.0;
    for (;;) {
        t += -std::log1p(-counter.uniform());
        if (t > mean) break;
        ++count;
    }

    SeededStream rng(seed, kPointStream);
    s.points.reserve(count);
    for (std::size_t i = 0; i < count; ++i) s.points.push_back(uniform_in(domain, rng));
    s.generation.count = count;
    s.jitters = enforce_general_position(s.points, domain, seed);
    return s;
}

PointSample sample_uniform_count(const Domain& domain, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ParameterError("point count must be at least 1");
    PointSample s;
    s.domain = domain;
    s.seed = seed;
    s.generation = {Generation::Kind::uniform_count, 0.0, n};
    SeededStream rng(seed, kPointStream);
    s.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) s.points.push_back(uniform_in(domain, rng));
    s.jitters = enforce_general_position(s.points, domain, seed);
    return s;
}

namespace {

struct PairDistance {
    double d2;
    std::uint32_t i, j;
};

std::vector<PairDistance> sorted_pairs(std::span<const Point> points) {
    const std::size_t n = points.size();
    std::vector<PairDistance> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            pairs.push_back({std::norm(points[i] - points[j]), static_cast<std::uint32_t>(i),
                             static_cast<std::uint32_t>(j)});
    std::sort(pairs.begin(), pairs.end(), [](const PairDistance& a, const PairDistance& b) { return a.d2 < b.d2; });
    return pairs;
}

} // namespace

double min_distance_gap(std::span<const Point> points) {
    if (points.size() < 3) return std::numeric_limits<double>::infinity();
    const auto pairs = sorted_pairs(points);
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < pairs.size(); ++k) {
        const double a = std::sqrt(pairs[k].d2), b = std::sqrt(pairs[k + 1].d2);
        gap = std::min(gap, (b - a) / std::max(b, std::numeric_limits<double>::min()));
    }
    return gap;
}

std::size_t enforce_general_position(std::vector<Point>& points, const Domain& domain, std::uint64_t seed,
                                     double tolerance) {
    if (points.size() > kGeneralPositionCheckLimit) return 0;
    SeededStream jitter(seed, kJitterStream);
    std::size_t applied = 0;
    for (int round = 0; round < 64; ++round) {
        const auto pairs = sorted_pairs(points);
        std::vector<std::uint32_t> offenders;
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            if (pairs[k].d2 == 0.0) offenders.push_back(pairs[k].j);
            if (k + 1 == pairs.size()) break;
            const double a = std::sqrt(pairs[k].d2), b = std::sqrt(pairs[k + 1].d2);
            if (b - a <= tolerance * std::max(b, 1.0)) offenders.push_back(std::max(pairs[k + 1].i, pairs[k + 1].j));
        }
        if (offenders.empty()) return applied;
        std::sort(offenders.begin(), offenders.end());
        offenders.erase(std::unique(offenders.begin(), offenders.end()), offenders.end());
        for (auto idx : offenders) {
            const double theta = kTwoPi * jitter.uniform();
            Point moved = points[idx] + 1e-9 * std::polar(1.0, theta);
            if (!domain.contains(moved)) moved = points[idx] - 1e-9 * std::polar(1.0, theta);
            points[idx] = moved;
            ++applied;
        }
    }
    throw DegeneracyError("could not reach general position after 64 perturbation rounds");
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw Error("float formatting failed");
    return std::string(buf, ptr);
}

PointSample read_points(std::istream& in, std::vector<std::string>* warnings) {
    PointSample s;
    s.generation.kind = Generation::Kind::file;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        std::istringstream fields(t);
        std::string a, b, extra;
        fields >> a >> b;
        if (b.empty()) throw ParseError("expected two coordinates", lineno);
        if (fields >> extra) throw ParseError("expected two coordinates, found more", lineno);
        double x = 0.0, y = 0.0;
        if (!parse_double(a, x) || !parse_double(b, y)) throw ParseError("malformed coordinate", lineno);
        s.points.emplace_back(x, y);
    }
    if (in.bad()) throw ParseError("read failure");
    s.generation.count = s.points.size();
    if (s.points.empty()) {
        if (warnings) warnings->push_back("points file contains no points");
        s.domain = Domain::rectangle({0.0, 0.0}, {1.0, 1.0});
        return s;
    }
    double x0 = s.points[0].real(), x1 = x0, y0 = s.points[0].imag(), y1 = y0;
    for (auto p : s.points) {
        x0 = std::min(x0, p.real());
        x1 = std::max(x1, p.real());
        y0 = std::min(y0, p.imag());
        y1 = std::max(y1, p.imag());
    }
    const double pad = 1e-9 * std::max({1.0, x1 - x0, y1 - y0});
    s.domain = Domain::rectangle({x0 - pad, y0 - pad}, {x1 + pad, y1 + pad});
    return s;
}

PointSample read_points(const std::filesystem::path& path, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open points file " + path.string());
    return read_points(in, warnings);
}

void write_points(const PointSample& sample, std::ostream& out) {
    for (auto p : sample.points) out << format_double(p.real()) << ' ' << format_double(p.imag()) << '\n';
}

void write_points(const PointSample& sample, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParameterError("cannot write points file " + path.string());
    write_points(sample, out);
    if (!out) throw Error("write failed for " + path.string());
}

} // namespace conalloc
