// Times the OpenMP kernels against their serial reference paths and checks
// that both produce identical bits (the kernels only ever write by index and
// reduce in fixed order).

#include <chrono>
#include <cstdio>
#include <cstring>

#include "nonstat/classifier.hpp"
#include "nonstat/parallel.hpp"
#include "nonstat/spectral.hpp"
#include "nonstat/stats.hpp"

using namespace nonstat;

namespace {

double seconds(std::chrono::steady_clock::time_point a,
               std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

template <class Fn>
double timed(Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return seconds(t0, std::chrono::steady_clock::now());
}

}  // namespace

int main() {
    const EnsembleSpec spec = bernoulli_schrodinger();
    const OmegaStream omega{42};

    std::printf("%-28s %10s %10s %8s %s\n", "kernel", "serial[s]", "omp[s]", "speedup",
                "bitwise");

    {
        const auto grid = [&] {
            std::vector<double> g(33);
            for (int i = 0; i < 33; ++i) g[i] = -3.0 + 7.0 * i / 32.0;
            return g;
        }();
        const std::vector<std::int64_t> ns = {100, 200, 400};
        GrowthProfile serial, parallel;
        const double ts = timed([&] { serial = estimate_L(spec, grid, ns, 512, 9, 0, false); });
        const double tp = timed([&] { parallel = estimate_L(spec, grid, ns, 512, 9, 0, true); });
        const bool same = std::memcmp(serial.l_hat.data(), parallel.l_hat.data(),
                                      serial.l_hat.size() * sizeof(double)) == 0;
        std::printf("%-28s %10.3f %10.3f %8.2f %s\n", "estimate_L (512x33x400)", ts, tp, ts / tp,
                    same ? "ok" : "MISMATCH");
    }

    {
        const ParamGrid grid{-3.0, 4.0, 1024};
        LiftSweep serial, parallel;
        const double ts = timed([&] {
            set_max_threads(1);
            serial = lift_sweep(spec, omega, grid, 400);
        });
        const double tp = timed([&] {
            set_max_threads(0);
            parallel = lift_sweep(spec, omega, grid, 400);
        });
        const bool same = serial.values == parallel.values;
        std::printf("%-28s %10.3f %10.3f %8.2f %s\n", "lift_sweep (400x1025)", ts, tp, ts / tp,
                    same ? "ok" : "MISMATCH");
    }

    {
        const TridiagOperator op = build_operator(spec, omega, 1, 2000);
        std::vector<EigenPair> serial, parallel;
        const double ts = timed([&] {
            set_max_threads(1);
            serial = eigensolve(op);
        });
        const double tp = timed([&] {
            set_max_threads(0);
            parallel = eigensolve(op);
        });
        bool same = serial.size() == parallel.size();
        for (std::size_t i = 0; same && i < serial.size(); ++i)
            same = serial[i].e == parallel[i].e && serial[i].phi == parallel[i].phi;
        std::printf("%-28s %10.3f %10.3f %8.2f %s\n", "eigensolve (n=2000)", ts, tp, ts / tp,
                    same ? "ok" : "MISMATCH");
    }

    set_max_threads(0);
    return 0;
}
