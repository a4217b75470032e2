#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nonstat/ensemble.hpp"

namespace nonstat {

// Uniform parameter grid b_0 < ... < b_N over J. The default N follows the
// subexponential rule [exp(n^{1/4})], capped; pipelines that need the grid to
// resolve the rotation count pass their own N.
struct ParamGrid {
    double j_lo = 0.0, j_hi = 1.0;
    std::int64_t n_cells = 1;

    static std::int64_t default_cells(std::int64_t n, std::int64_t cap = 4096);
    static ParamGrid over(const EnsembleSpec& spec, std::int64_t n, std::int64_t cap = 4096);

    double point(std::int64_t i) const {
        return i == n_cells ? j_hi : j_lo + (j_hi - j_lo) * static_cast<double>(i) /
                                                 static_cast<double>(n_cells);
    }
    double spacing() const { return (j_hi - j_lo) / static_cast<double>(n_cells); }
};

// Log-norms, lift orbit and the renormalized frame of one finite product
// T_{m,a,omega}, m = 1..n. log_scale + log|frame| is the true log-norm; the
// frame is rescaled whenever its norm passes 1e100, far from overflow.
struct CocycleTrace {
    std::vector<double> log_norms;   // log |T_m|, m = 1..n
    std::vector<double> lift_orbit;  // lift image of x0 after m steps, m = 0..n
    Mat2 frame;
    double log_scale = 0.0;
};

CocycleTrace run_trace(const EnsembleSpec& spec, const OmegaStream& omega, double a,
                       std::int64_t n, LiftPoint x0 = 0.0);

// Product over steps m1+1 .. m2 returned as (frame, log_scale).
struct ScaledMat {
    Mat2 frame;
    double log_scale = 0.0;
    double log_norm() const { return log_scale + std::log(operator_norm(frame)); }
};

ScaledMat window_product(const EnsembleSpec& spec, const OmegaStream& omega, double a,
                         std::int64_t m1, std::int64_t m2);

// Lift values x~_{m,i} for m = 0..n, i = 0..N, with branch continuity in the
// parameter: the one-step branch at b_i is continued from b_{i-1} (adaptive
// bisection when a cell's one-step image moves too far), and column i = 0
// uses the canonical branch.
struct LiftSweep {
    ParamGrid grid;
    std::int64_t n = 0;
    std::vector<double> values;  // (n+1) x (N+1), row-major

    double at(std::int64_t m, std::int64_t i) const {
        return values[static_cast<std::size_t>(m) * (grid.n_cells + 1) + i];
    }
    std::span<const double> row(std::int64_t m) const {
        return {values.data() + static_cast<std::size_t>(m) * (grid.n_cells + 1),
                static_cast<std::size_t>(grid.n_cells + 1)};
    }
};

LiftSweep lift_sweep(const EnsembleSpec& spec, const OmegaStream& omega, const ParamGrid& grid,
                     std::int64_t n, LiftPoint x0 = 0.0);

// Streaming variant: visit(m, row) is called for m = 0..n with the current
// row of lifts; only O(N) state is kept. Used where the full matrix would
// not fit (large counterexample stages).
void lift_sweep_stream(const EnsembleSpec& spec, const OmegaStream& omega,
                       const ParamGrid& grid, std::int64_t n, LiftPoint x0,
                       const std::function<void(std::int64_t, std::span<const double>)>& visit);

// x~_{m,a}(x0) at an arbitrary parameter, on the same branch family as
// lift_sweep (one-step branches continued from j_lo). Monotone in a for
// monotone families, so it is the bisection primitive for locating turns.
// When branches_out is non-null it receives the per-step branch values at a.
double lift_at_parameter(const EnsembleSpec& spec, const OmegaStream& omega, std::int64_t m,
                         double a, LiftPoint x0 = 0.0, std::vector<double>* branches_out = nullptr);

// x~_{m,i'} - x~_{m,i}: projective turns swept over [b_i, b_{i'}] after m steps.
double rotation_count(const LiftSweep& sweep, std::int64_t i, std::int64_t i_prime,
                      std::int64_t m);

// |X_{m,i}| = x~_{m,i} - x~_{m,i-1} for i = 1..N; sums to the full rotation count.
std::vector<double> interval_lengths(const LiftSweep& sweep, std::int64_t m);

}  // namespace nonstat
