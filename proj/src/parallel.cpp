#include "nonstat/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <atomic>

namespace nonstat {

namespace {
std::atomic<int> g_max_threads{0};
}

void set_max_threads(int n) { g_max_threads.store(n < 0 ? 0 : n); }

int max_threads() { return g_max_threads.load(); }

namespace detail {

void run_indexed_parallel(std::size_t count, void (*thunk)(void*, std::size_t), void* ctx) {
#ifdef _OPENMP
    const int cap = g_max_threads.load();
    const long long nn = static_cast<long long>(count);
    if (cap > 0) {
#pragma omp parallel for schedule(static) num_threads(cap)
        for (long long i = 0; i < nn; ++i) thunk(ctx, static_cast<std::size_t>(i));
    } else {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < nn; ++i) thunk(ctx, static_cast<std::size_t>(i));
    }
#else
    for (std::size_t i = 0; i < count; ++i) thunk(ctx, i);
#endif
}

}  // namespace detail

double pairwise_sum(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace nonstat
