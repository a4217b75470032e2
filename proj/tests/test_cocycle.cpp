#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nonstat/cocycle.hpp"
#include "nonstat/spectral.hpp"

using namespace nonstat;

namespace {

EnsembleSpec fixed_diag_spec() {
    // alpha forced to 0, parameter never applied: every step is diag(2, 1/2).
    EnsembleSpec spec;
    spec.family = Family::RotationDiagonal;
    spec.j_lo = 0.0;
    spec.j_hi = 2.0 * M_PI;
    spec.k = 1;
    spec.rotation.alpha_random = false;
    spec.rotation.param_mode = ParamMode::None;
    return spec;
}

EnsembleSpec zero_potential_spec(double lo, double hi) {
    EnsembleSpec spec = bernoulli_schrodinger(lo, hi);
    spec.potential.base = PotentialLaw::finite_atoms({0.0, 1e-9}, {0.5, 0.5});
    return spec;
}

}  // namespace

TEST_CASE("grid rule") {
    CHECK(ParamGrid::default_cells(400) == 87);  // [exp(400^{1/4})]
    CHECK(ParamGrid::default_cells(1 << 30) == 4096);  // capped
    const ParamGrid g{0.0, 1.0, 10};
    CHECK(g.point(0) == 0.0);
    CHECK(g.point(10) == 1.0);
    CHECK(g.spacing() == doctest::Approx(0.1));
}

TEST_CASE("constant diagonal steps grow at log 2 with a pinned lift") {
    const EnsembleSpec spec = fixed_diag_spec();
    const OmegaStream omega{1};
    const CocycleTrace tr = run_trace(spec, omega, 0.0, 100, 0.0);
    for (std::int64_t m = 1; m <= 100; ++m)
        CHECK(tr.log_norms[m - 1] == doctest::Approx(m * std::log(2.0)).epsilon(1e-12));
    for (double lift : tr.lift_orbit) CHECK(lift == 0.0);
}

TEST_CASE("zero potential at E=3 grows at the spectral radius") {
    const EnsembleSpec spec = zero_potential_spec(-4, 4);
    const OmegaStream omega{2};
    const CocycleTrace tr = run_trace(spec, omega, 3.0, 50);
    const double rate = std::log(0.5 * (3.0 + std::sqrt(5.0)));
    CHECK(tr.log_norms[49] / 50.0 == doctest::Approx(rate).epsilon(0.02));
}

TEST_CASE("zero potential at E=0 has period four") {
    const EnsembleSpec spec = zero_potential_spec(-4, 4);
    const OmegaStream omega{3};
    const CocycleTrace tr = run_trace(spec, omega, 0.0, 4);
    CHECK(tr.log_norms[3] == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("renormalized log-norms match extended-range direct products") {
    // Norms near e^700 would overflow without rescaling; the trace's
    // log_scale bookkeeping has to agree with longdouble accumulation.
    const EnsembleSpec spec = bernoulli_schrodinger(-3, 4);
    const OmegaStream omega{17};
    const std::int64_t n = 1000;
    const CocycleTrace tr = run_trace(spec, omega, 3.9, n);
    long double l11 = 1, l12 = 0, l21 = 0, l22 = 1;
    long double scale = 0;
    for (std::int64_t m = 1; m <= n; ++m) {
        const Mat2 s = sample_step(spec, omega, m).mat(3.9);
        const long double n11 = s.a11 * l11 + s.a12 * l21;
        const long double n12 = s.a11 * l12 + s.a12 * l22;
        const long double n21 = s.a21 * l11 + s.a22 * l21;
        const long double n22 = s.a21 * l12 + s.a22 * l22;
        l11 = n11;
        l12 = n12;
        l21 = n21;
        l22 = n22;
        const long double mag = std::max({fabsl(l11), fabsl(l12), fabsl(l21), fabsl(l22)});
        if (mag > 1e300L) {
            l11 /= mag;
            l12 /= mag;
            l21 /= mag;
            l22 /= mag;
            scale += logl(mag);
        }
    }
    const long double fro =
        sqrtl(l11 * l11 + l12 * l12 + l21 * l21 + l22 * l22);
    const double log_fro = static_cast<double>(scale + logl(fro));
    // |T| <= |T|_F <= sqrt(2) |T|; compare within that bracket plus noise.
    CHECK(tr.log_norms[n - 1] <= log_fro + 1e-6 * n);
    CHECK(tr.log_norms[n - 1] >= log_fro - 0.5 * std::log(2.0) - 1e-6 * n);
}

TEST_CASE("lift/norm link: derivative equals reciprocal squared vector growth") {
    const EnsembleSpec spec = bernoulli_schrodinger(-3, 4);
    const OmegaStream omega{23};
    const double a = 0.6;
    const std::int64_t n = 30;
    const CocycleTrace tr = run_trace(spec, omega, a, n);
    // |T_n v0| via direct recursion from v0 = (1, 0).
    double vx = 1, vy = 0;
    for (std::int64_t m = 1; m <= n; ++m) sample_step(spec, omega, m).mat(a).apply(vx, vy);
    const double log_len = 0.5 * std::log(vx * vx + vy * vy);
    // Numerical lift derivative at x0.
    const double h = 1e-7;
    const CocycleTrace tr2 = run_trace(spec, omega, a, n, h);
    const double deriv = (tr2.lift_orbit[n] - tr.lift_orbit[n]) / h;
    CHECK(deriv == doctest::Approx(std::exp(-2.0 * log_len)).epsilon(0.01));
}

TEST_CASE("parameter-independent family sweeps flat") {
    const EnsembleSpec spec = fixed_diag_spec();
    const OmegaStream omega{4};
    const ParamGrid grid{spec.j_lo, spec.j_hi, 16};
    const LiftSweep sweep = lift_sweep(spec, omega, grid, 20);
    for (std::int64_t m = 0; m <= 20; ++m)
        for (std::int64_t i = 0; i <= 16; ++i) CHECK(sweep.at(m, i) == sweep.at(m, 0));
    for (std::int64_t m = 0; m <= 20; ++m) {
        const auto lens = interval_lengths(sweep, m);
        for (double len : lens) CHECK(len == 0.0);
    }
}

TEST_CASE("a single full-turn factor shifts the sweep by two") {
    // Rotation applied at step 1 only; across J = [0, 2pi] the image turns by
    // 2 pi, i.e. two projective turns.
    EnsembleSpec spec = fixed_diag_spec();
    spec.rotation.param_mode = ParamMode::First;
    const OmegaStream omega{5};
    const ParamGrid grid{0.0, 2.0 * M_PI, 64};
    const LiftSweep sweep = lift_sweep(spec, omega, grid, 3);
    CHECK(rotation_count(sweep, 0, 64, 1) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("telescoping: interval lengths sum to the rotation count") {
    const EnsembleSpec spec = bernoulli_schrodinger(-3, 4);
    const OmegaStream omega{6};
    const ParamGrid grid{-3.0, 4.0, 128};
    const std::int64_t n = 100;
    const LiftSweep sweep = lift_sweep(spec, omega, grid, n);
    for (std::int64_t m : {0L, 25L, 100L}) {
        const auto lens = interval_lengths(sweep, m);
        double sum = 0;
        for (double len : lens) {
            CHECK(len >= -1e-12);  // monotone family
            sum += len;
        }
        CHECK(sum == doctest::Approx(rotation_count(sweep, 0, 128, m)).epsilon(1e-9));
    }
    CHECK(rotation_count(sweep, 0, 128, 0) == 0.0);
    CHECK_THROWS(rotation_count(sweep, -1, 5, 10));
}

TEST_CASE("oscillation: lift counts track Dirichlet eigenvalue counts") {
    const EnsembleSpec spec = bernoulli_schrodinger(-3, 4);
    const OmegaStream omega{777};
    const std::int64_t n = 200;
    const ParamGrid grid{-3.0, 4.0, 64};
    const LiftSweep sweep = lift_sweep(spec, omega, grid, n);
    const TridiagOperator op = build_operator(spec, omega, 1, n);
    for (std::int64_t i = 0; i <= 64; i += 8) {
        const double count = sweep.at(n, i) - sweep.at(n, 0);
        const double eig = static_cast<double>(sturm_count(op, grid.point(i)));
        CHECK(std::abs(count - eig) <= 2.0);
    }
}

TEST_CASE("streaming sweep matches the stored sweep") {
    const EnsembleSpec spec = bernoulli_schrodinger(-3, 4);
    const OmegaStream omega{8};
    const ParamGrid grid{-3.0, 4.0, 32};
    const LiftSweep sweep = lift_sweep(spec, omega, grid, 50);
    lift_sweep_stream(spec, omega, grid, 50, 0.0,
                      [&](std::int64_t m, std::span<const double> row) {
                          for (std::int64_t i = 0; i <= 32; ++i)
                              CHECK(row[i] == sweep.at(m, i));
                      });
}

TEST_CASE("window products compose") {
    const EnsembleSpec spec = bernoulli_schrodinger(-3, 4);
    const OmegaStream omega{9};
    const double a = 1.1;
    const ScaledMat t1 = window_product(spec, omega, a, 0, 40);
    const ScaledMat t2 = window_product(spec, omega, a, 40, 90);
    const ScaledMat t3 = window_product(spec, omega, a, 0, 90);
    const Mat2 composed = t2.frame * t1.frame;
    CHECK(std::log(operator_norm(composed)) + t1.log_scale + t2.log_scale ==
          doctest::Approx(t3.log_norm()).epsilon(1e-9));
}
