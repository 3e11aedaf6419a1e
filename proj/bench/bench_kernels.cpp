// Serial reference vs OpenMP kernels on the largest face of a disk sample.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <omp.h>

#include "conalloc/kernels.hpp"
#include "conalloc/msf.hpp"
#include "conalloc/pipeline.hpp"
#include "conalloc/pointproc.hpp"

using namespace conalloc;

namespace {

template <class F>
double best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

} // namespace

int main(int argc, char** argv) {
    const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 64;
    const double h = argc > 2 ? std::strtod(argv[2], nullptr) : 0.002;
    const int reps = argc > 3 ? std::atoi(argv[3]) : 3;

    const PointSample s = sample_uniform_count(Domain::disk({0, 0}, 1), n, 7);
    const Forest forest = build_mst(s.points);
    const auto faces = extract_faces(s.points, forest);
    std::size_t big = 0;
    for (std::size_t f = 0; f < faces.size(); ++f)
        if (faces[f].area > faces[big].area) big = f;
    const Face& face = faces[big];

    std::printf("threads %d, n %zu, face %zu (%zu corners, area %.4f), h %g\n", omp_get_max_threads(), n, big,
                face.walk.size(), face.area, h);

    std::vector<Cell> a, b;
    const double ts = best_of(reps, [&] { a = classify_cells_serial(face.polygon, h); });
    const double tp = best_of(reps, [&] { b = classify_cells(face.polygon, h); });
    std::printf("classify_cells    cells %zu  serial %.4fs  parallel %.4fs  speedup %.2f  same %d\n", a.size(), ts, tp,
                ts / tp, static_cast<int>(a.size() == b.size()));

    PipelineConfig config;
    const FaceMap map = build_face_map(s.points, face, default_spacing(s.points, forest), config);
    if (!map.built) {
        std::printf("map failed: %s\n", map.failure.c_str());
        return 1;
    }
    std::vector<Point> z(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) z[i] = a[i].center;
    std::vector<FlaggedImage> wa, wb;
    const double ms = best_of(reps, [&] { wa = map_points_forward_serial(map.chain, z); });
    const double mp = best_of(reps, [&] { wb = map_points_forward(map.chain, z); });
    bool same = wa.size() == wb.size();
    for (std::size_t i = 0; same && i < wa.size(); ++i) same = wa[i].w == wb[i].w && wa[i].on_slit == wb[i].on_slit;
    std::printf("map_points_forward points %zu  steps %zu  serial %.4fs  parallel %.4fs  speedup %.2f  same %d\n",
                z.size(), map.chain.steps.size(), ms, mp, ms / mp, static_cast<int>(same));
    return 0;
}
