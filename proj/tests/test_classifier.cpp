#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nonstat/classifier.hpp"
#include "nonstat/deep.hpp"

using namespace nonstat;

namespace {

EnsembleSpec fixed_diag_spec(ParamMode mode = ParamMode::None) {
    EnsembleSpec spec;
    spec.family = Family::RotationDiagonal;
    spec.j_lo = 0.0;
    spec.j_hi = 2.0 * M_PI;
    spec.k = 1;
    spec.rotation.alpha_random = false;
    spec.rotation.param_mode = mode;
    return spec;
}

}  // namespace

TEST_CASE("parameter-independent hyperbolic family classifies all-small") {
    const EnsembleSpec spec = fixed_diag_spec();
    const OmegaStream omega{1};
    const ParamGrid grid{spec.j_lo, spec.j_hi, 32};
    const LiftSweep sweep = lift_sweep(spec, omega, grid, 60);
    const Classification cls = classify_intervals(sweep, 0.1);
    CHECK(cls.jumps == 0);
    CHECK(cls.anomalies == 0);
    for (const auto& r : cls.reports) CHECK(r.kind == IntervalKind::Small);
    CHECK_THROWS(classify_intervals(sweep, 0.7));
}

TEST_CASE("a one-shot full turn produces jump cells matching the rotation count") {
    // Rotation by a at step 1 only, then a random hyperbolic tail: the swept
    // turn across J = [0, 2pi] is 2, so two cells complete a full turn.
    EnsembleSpec spec = fixed_diag_spec(ParamMode::First);
    spec.rotation.alpha_random = true;
    const OmegaStream omega{2};
    const std::int64_t n = 400;  // the eps' n window absorbs the settling period
    const ParamGrid grid{0.0, 2.0 * M_PI, 64};
    const LiftSweep sweep = lift_sweep(spec, omega, grid, n);
    const Classification cls = classify_intervals(sweep, 0.1);
    const double r_total = rotation_count(sweep, 0, 64, n);
    CHECK(r_total == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(cls.jumps >= 1);
    CHECK(std::abs(static_cast<double>(cls.jumps) - r_total) <= 1.0 + 0.1 * n);
    CHECK(cls.anomalies == 0);
    for (const auto& r : cls.reports)
        if (r.kind == IntervalKind::Jump) CHECK(r.m0 <= 5);
}

TEST_CASE("mbar prime rule") {
    // Window norms 1, 2, ..., head norm 3.5: first window above is m = mbar+4.
    const std::vector<double> window = {1, 2, 3, 4, 5};
    CHECK(choose_mbar_prime(3.5, window, 10, 15) == 14);
    CHECK(choose_mbar_prime(99.0, window, 10, 15) == 15);  // never exceeded
    CHECK(choose_mbar_prime(0.5, window, 10, 15) == 11);   // ties break small
}

TEST_CASE("synthetic two-step cancellation recovers the aligning angle") {
    // Head R_a diag(10, 1/10), tail diag(4, 1/4). The head's expanding axis
    // is the direction of R_a e1, which meets the tail's contracting axis e2
    // exactly at a = pi/2, where |BA| collapses to the norm ratio 10/4.
    const Mat2 tail = diagonal(4.0);
    const Mat2 head = rotation(M_PI_2) * diagonal(10.0);
    const auto [lhs, rhs] = cancellation_norm_check(head, tail, 1e-9);
    CHECK(lhs == doctest::Approx(2.5).epsilon(1e-9));
    CHECK(rhs == doctest::Approx(2.5).epsilon(1e-9));
    // Away from alignment there is no cancellation to speak of.
    CHECK(operator_norm(tail * rotation(1.0) * diagonal(10.0)) > 10.0);
}

TEST_CASE("cancellation search on a random schrodinger jump interval") {
    const EnsembleSpec spec = bernoulli_schrodinger(-3, 4);
    const OmegaStream omega{7};
    const std::int64_t n = 200;
    const ParamGrid grid{-3.0, 4.0, 1024};
    const LiftSweep sweep = lift_sweep(spec, omega, grid, n);
    const Classification cls = classify_intervals(sweep, 0.1);
    REQUIRE(cls.jumps > 0);

    int verified = 0;
    for (const auto& r : cls.reports) {
        if (r.kind != IntervalKind::Jump || verified >= 3) continue;
        const CancellationResult cancel =
            find_cancellation_parameter(spec, omega, sweep, r.i, r.mbar, n, 512);
        if (!cancel.found || !cancel.aligned) continue;
        ++verified;
        CHECK(cancel.final_gap < 1e-10);
        // The search pads the cell by one neighbor on each side.
        CHECK(cancel.a_cancel >= grid.point(r.i - 2));
        CHECK(cancel.a_cancel <= grid.point(r.i + 1));

        // At alignment |T_{mbar'}| = max(|B|/|A|, |A|/|B|); the product side
        // has to be traced in extended precision because doubles floor out
        // at |A||B| * 1e-13.
        const double head = window_product(spec, omega, cancel.a_cancel, 0, cancel.mbar)
                                .log_norm();
        const double tail =
            window_product(spec, omega, cancel.a_cancel, cancel.mbar, cancel.mbar_prime)
                .log_norm();
        const auto logs = deep_window_lognorms(spec, omega, cancel.a_cancel_decimal, 0,
                                               cancel.mbar_prime, 512);
        CHECK(logs.back() == doctest::Approx(std::abs(head - tail)).epsilon(1e-6));

        // Stability: re-running moves the root by < 1e-9 |J|.
        const CancellationResult again =
            find_cancellation_parameter(spec, omega, sweep, r.i, r.mbar, n, 512);
        CHECK(std::abs(again.a_cancel - cancel.a_cancel) < 1e-9 * 7.0);
        CHECK(again.aligned);
    }
    CHECK(verified >= 2);
}

TEST_CASE("deterministic diagonal steps are not jumps") {
    const EnsembleSpec spec = fixed_diag_spec();
    const OmegaStream omega{4};
    const ParamGrid grid{spec.j_lo, spec.j_hi, 8};
    const LiftSweep sweep = lift_sweep(spec, omega, grid, 40);
    const CancellationResult res = find_cancellation_parameter(spec, omega, sweep, 1, 5, 20, 0);
    CHECK(!res.found);
    CHECK(res.failure == "not-a-jump");
}

TEST_CASE("cover volume partial sums") {
    const std::vector<std::int64_t> m_counts = {0, 0, 0};
    const std::vector<std::int64_t> cells = {16, 64, 256};
    const auto zero = exceptional_cover_volume(m_counts, cells, 7.0, 0.5);
    for (double v : zero) CHECK(v == 0.0);

    const std::vector<std::int64_t> linear = {10, 20, 40};
    const std::vector<std::int64_t> fast_cells = {16, 256, 4096};
    const auto d_half = exceptional_cover_volume(linear, fast_cells, 7.0, 0.5);
    CHECK(d_half.size() == 3);
    // Increments shrink when N grows faster than M.
    CHECK(d_half[2] - d_half[1] < d_half[1] - d_half[0]);
    // d = 1 dominates d = 0.1 termwise once |J|/N < 1.
    const auto d_one = exceptional_cover_volume(linear, cells, 0.5, 1.0);
    const auto d_tenth = exceptional_cover_volume(linear, cells, 0.5, 0.1);
    for (std::size_t i = 0; i < 3; ++i) CHECK(d_one[i] < d_tenth[i]);
    CHECK_THROWS(exceptional_cover_volume(linear, cells, 7.0, 1.5));
}

TEST_CASE("audit passes on a deterministic hyperbolic family") {
    const EnsembleSpec spec = fixed_diag_spec();
    const OmegaStream omega{6};
    AuditParams params;
    params.n = 60;
    params.eps = 0.1;
    params.grid_cells = 16;
    params.profile_samples = 16;
    params.window_samples = 16;
    params.sampled_cells = 4;
    params.v_checks = 8;
    const MainTheoremAudit audit = audit_main_theorem(spec, omega, params);
    CHECK(audit.jump_count == 0);
    CHECK(audit.all_pass());
    CHECK(audit.growth_typical.worst < 1e-9);
    CHECK(audit.distribution.worst < 1e-9);
}

TEST_CASE("audit reports failure when the tolerance sits below the noise floor") {
    const EnsembleSpec spec = bernoulli_schrodinger(-3, 4);
    const OmegaStream omega{7};
    AuditParams params;
    params.n = 120;
    params.eps = 1e-6;
    params.grid_cells = 256;
    params.profile_samples = 64;
    params.window_samples = 32;
    params.sampled_cells = 6;
    params.a_per_cell = 1;
    params.v_checks = 8;
    params.deep_traces = false;
    const MainTheoremAudit audit = audit_main_theorem(spec, omega, params);
    CHECK(!audit.all_pass());
    CHECK(!audit.growth_typical.pass);  // estimator noise alone exceeds 1e-6 n
}
