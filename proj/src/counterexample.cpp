#include "nonstat/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nonstat/deep.hpp"

namespace nonstat {

void ScheduleB::validate(double min_ratio) const {
    if (n_list.empty()) throw std::invalid_argument("ScheduleB: empty schedule");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] < 8) throw std::invalid_argument("ScheduleB: stage too short");
        if (i > 0 && static_cast<double>(n_list[i]) <
                         min_ratio * static_cast<double>(n_list[i - 1]))
            throw std::invalid_argument("ScheduleB: stage ratio below the scale-separation floor");
    }
}

namespace {

// Exact expectation surrogate: L_m is within log 2 of sum_{j<=m} N(|H_j|)
// for this family, uniformly in the parameter.
double expected_lognorm(const EnsembleSpec& spec, std::int64_t m) {
    double acc = 0.0;
    for (std::int64_t j = 1; j <= m; ++j) acc += *expected_step_lognorm(spec, j);
    return acc;
}

std::int64_t pick_grid_cells(const EnsembleSpec& spec, const OmegaStream& omega,
                             std::int64_t n_run) {
    const ParamGrid ends{spec.j_lo, spec.j_hi, 1};
    const LiftSweep probe = lift_sweep(spec, omega, ends, n_run);
    const double r_total = probe.at(n_run, 1) - probe.at(n_run, 0);
    const std::int64_t want = (static_cast<std::int64_t>(std::ceil(8.0 * r_total)) / 64 + 1) * 64;
    return std::clamp<std::int64_t>(want, 256, 4096);
}

}  // namespace

CounterexampleResult run_counterexample(const ScheduleB& schedule, std::uint64_t seed,
                                        double eps) {
    schedule.validate();
    CounterexampleResult result;
    const OmegaStream omega{seed};

    EnsembleSpec spec;
    spec.family = Family::RotationDiagonal;
    spec.k = 1;
    spec.rotation.n_list = schedule.n_list;
    spec.rotation.alpha_random = true;
    spec.rotation.param_mode = ParamMode::All;

    double search_lo = 0.0, search_hi = 2.0 * M_PI;
    result.success = true;

    for (std::size_t stage = 0; stage < schedule.n_list.size(); ++stage) {
        StageLog log;
        log.n = schedule.n_list[stage];
        const std::int64_t n_run = 2 * log.n;
        log.search_lo = search_lo;
        log.search_hi = search_hi;
        spec.j_lo = search_lo;
        spec.j_hi = search_hi;

        log.grid_cells = pick_grid_cells(spec, omega, n_run);
        const ParamGrid grid{search_lo, search_hi, log.grid_cells};
        const LiftSweep sweep = lift_sweep(spec, omega, grid, n_run);
        const Classification cls = classify_intervals(sweep, 0.1);

        // Jump moment window [(1.5 - 3 eps) n, 1.5 n]; widened when empty,
        // which costs gap but keeps the stage alive.
        log.window_hi = static_cast<std::int64_t>(1.5 * static_cast<double>(log.n));
        CancellationResult cancel;
        for (double widen = 3.0 * eps; widen <= 0.5 + 1e-9; widen += eps) {
            log.window_lo =
                static_cast<std::int64_t>((1.5 - widen) * static_cast<double>(log.n));
            log.widened_window = widen > 3.0 * eps;
            for (const auto& rep : cls.reports) {
                if (rep.kind != IntervalKind::Jump) continue;
                if (rep.m0 < log.window_lo || rep.m0 > log.window_hi) continue;
                const std::int64_t mbar = adjust_jump_index(sweep, rep.i, rep.mbar, 0.05);
                if (mbar < 0 || mbar > log.window_hi) continue;

                const double l_mbar = expected_lognorm(spec, mbar);
                std::vector<double> l_window(n_run - mbar);
                double acc = 0.0;
                for (std::int64_t m = mbar + 1; m <= n_run; ++m) {
                    acc += *expected_step_lognorm(spec, m);
                    l_window[m - mbar - 1] = acc;
                }
                const std::int64_t mbar_prime = choose_mbar_prime(l_mbar, l_window, mbar, n_run);

                // Deep alignment is affordable at the first stage only; the
                // later stages' dips stay unobservable either way and the
                // max-over-stages gap comes from stage one.
                int deep_bits = 0;
                if (n_run <= 1024) {
                    double depth = 0.0;
                    for (std::int64_t m = mbar + 1; m <= n_run; ++m)
                        depth = std::fmax(depth, 2.0 * std::fmin(l_mbar, l_window[m - mbar - 1]));
                    deep_bits = bits_for_depth(depth + 80.0);
                }
                cancel = find_cancellation_parameter(spec, omega, sweep, rep.i, mbar,
                                                     mbar_prime, deep_bits);
                if (cancel.found) {
                    log.jump_cell = rep.i;
                    log.m0 = rep.m0;
                    log.deep_bits = deep_bits;
                    break;
                }
            }
            if (cancel.found) break;
        }

        if (!cancel.found) {
            result.success = false;
            result.failed_stage = static_cast<std::int64_t>(stage) + 1;
            result.stages.push_back(log);
            break;
        }

        log.found = true;
        log.mbar = cancel.mbar;
        log.mbar_prime = cancel.mbar_prime;
        log.a_cancel = cancel.a_cancel;
        log.axis_gap = cancel.final_gap;

        if (!cancel.a_cancel_decimal.empty())
            log.trace = deep_window_lognorms(spec, omega, cancel.a_cancel_decimal, 0, n_run,
                                             log.deep_bits);
        else {
            const CocycleTrace tr = run_trace(spec, omega, cancel.a_cancel, n_run);
            log.trace = tr.log_norms;
        }

        const double l_end = expected_lognorm(spec, n_run) / static_cast<double>(n_run);
        log.gap_at_end = l_end - log.trace[n_run - 1] / static_cast<double>(n_run);
        double plateau = -1e300;
        for (std::int64_t m = log.n; m <= n_run; ++m)
            plateau = std::fmax(plateau, log.trace[m - 1] / static_cast<double>(m));
        log.plateau_gap = l_end - plateau;

        result.gap = std::fmax(result.gap, log.gap_at_end);
        result.a_found = cancel.a_cancel;
        result.a_found_decimal = !cancel.a_cancel_decimal.empty()
                                     ? cancel.a_cancel_decimal
                                     : std::to_string(cancel.a_cancel);

        // Next stage searches a neighborhood of the cancellation point wide
        // enough that its differential rotation reaches a handful of turns
        // inside the next jump-moment window (the submartingale growth rate
        // is |I|/pi per step).
        if (stage + 1 < schedule.n_list.size()) {
            const double window_steps = 3.0 * eps * static_cast<double>(schedule.n_list[stage + 1]);
            const double half_width = 4.0 * M_PI / window_steps;
            search_lo = std::fmax(search_lo, cancel.a_cancel - half_width);
            search_hi = std::fmin(search_hi, cancel.a_cancel + half_width);
        }
        result.stages.push_back(std::move(log));
    }
    return result;
}

}  // namespace nonstat
