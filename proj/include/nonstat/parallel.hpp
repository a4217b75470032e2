#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nonstat {

// Global worker cap shared by all kernels. 0 = use OpenMP default.
void set_max_threads(int n);
int max_threads();

// Runs fn(i) for i in [0, count). The parallel path writes results by index
// only, so serial and parallel execution produce identical bits; the serial
// path is kept as the reference for tests and the benchmark.
template <class Fn>
void run_indexed(std::size_t count, Fn&& fn, bool parallel = true);

// Fixed-shape pairwise reduction; summation order is independent of thread
// count because it only ever runs on an already materialized array.
double pairwise_sum(std::span<const double> xs);

namespace detail {
void run_indexed_parallel(std::size_t count, void (*thunk)(void*, std::size_t), void* ctx);
}

template <class Fn>
void run_indexed(std::size_t count, Fn&& fn, bool parallel) {
    if (!parallel) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    auto thunk = [](void* ctx, std::size_t i) { (*static_cast<Fn*>(ctx))(i); };
    detail::run_indexed_parallel(count, thunk, &fn);
}

}  // namespace nonstat
