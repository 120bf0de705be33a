// Wall-clock comparison of the serial reference ensemble against the OpenMP
// kernel, plus a bitwise agreement check between the two.

#include <cstdio>
#include <cstring>
#include <omp.h>

#include "stabilab/montecarlo.hpp"
#include "stabilab/presets.hpp"

using namespace stabilab;

namespace {

double time_once(const SddeSystem& sys, const SchemeConfig& scheme, const GridSpec& grid,
                 const InitialSegment& xi, std::int64_t paths, bool parallel, int threads,
                 MomentSeries& out) {
    const double t0 = omp_get_wtime();
    out = parallel ? ensemble_moments(sys, scheme, grid, xi, paths, 42, std::nullopt, threads)
                   : ensemble_moments_serial(sys, scheme, grid, xi, paths, 42);
    return omp_get_wtime() - t0;
}

bool bitwise_equal(const MomentSeries& a, const MomentSeries& b) {
    if (a.component_moments.size() != b.component_moments.size()) return false;
    for (std::size_t i = 0; i < a.component_moments.size(); ++i)
        if (std::memcmp(a.component_moments[i].data(), b.component_moments[i].data(),
                        a.component_moments[i].size() * sizeof(double)) != 0)
            return false;
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    std::int64_t paths = 1000;
    std::int64_t steps = 2000;
    if (argc > 1) paths = std::atoll(argv[1]);
    if (argc > 2) steps = std::atoll(argv[2]);

    const Preset p = preset("example1");
    const GridSpec grid = GridSpec::from_delay_steps(p.system.delay.tau_max, 10, steps);

    struct Case {
        const char* name;
        SchemeConfig scheme;
    };
    const Case cases[] = {
        {"mtem", SchemeConfig::mtem(TruncationConfig::for_model(p.system.lipschitz_model))},
        {"theta(1.0)", SchemeConfig::theta_em(1.0)},
    };

    const int max_threads = omp_get_max_threads();
    std::printf("paths = %lld, steps = %lld, hardware threads = %d\n\n",
                static_cast<long long>(paths), static_cast<long long>(steps), max_threads);
    std::printf("%-12s %12s %12s %9s %9s\n", "scheme", "serial [s]", "openmp [s]", "speedup",
                "bitwise");

    for (const auto& c : cases) {
        MomentSeries serial, parallel;
        const double ts = time_once(p.system, c.scheme, grid, p.initial, paths, false, 0, serial);
        const double tp =
            time_once(p.system, c.scheme, grid, p.initial, paths, true, max_threads, parallel);
        std::printf("%-12s %12.3f %12.3f %8.2fx %9s\n", c.name, ts, tp, ts / tp,
                    bitwise_equal(serial, parallel) ? "equal" : "DIFFER");
    }
    return 0;
}
