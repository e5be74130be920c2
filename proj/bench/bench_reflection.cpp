// Timing comparison of the parallel reflection kernel against the serial
// reference on a dense spectrum, plus a correctness cross-check: the two
// must agree bit-for-bit.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rydgate/reflection.hpp"

using namespace rydgate;

namespace {
double seconds_for(const std::function<ReflectionSpectrum()>& work, ReflectionSpectrum& out,
                   int repeats) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        out = work();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}
}  // namespace

int main() {
    PhysicsParams params;
    CloudGeometry geom;
    geom.n_atoms = 2000;
    geom.qubit_positions = {{0.0, -15.0, 0.0}, {0.0, 15.0, 0.0}};
    geom.seed = 7;

    const EnsembleRealization real =
        sample_ensemble(geom, params).with_excited(std::vector<int>{0, 1});
    const FrequencyGrid grid = FrequencyGrid::linspace(-20.0, 20.0, 4096);

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("N = %d atoms, %zu frequency points, %d threads\n", geom.n_atoms,
                grid.points.size(), threads);

    ReflectionSpectrum serial, parallel;
    const double ts = seconds_for([&] { return reflection_full_serial(real, params, grid); },
                                  serial, 3);
    const double tp = seconds_for([&] { return reflection_full(real, params, grid); }, parallel, 3);

    bool identical = serial.values.size() == parallel.values.size();
    for (std::size_t i = 0; identical && i < serial.values.size(); ++i)
        identical = serial.values[i] == parallel.values[i];

    std::printf("serial reference  %8.1f ms\n", ts * 1e3);
    std::printf("parallel kernel   %8.1f ms\n", tp * 1e3);
    std::printf("speedup           %8.2fx\n", ts / tp);
    std::printf("bitwise identical %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
