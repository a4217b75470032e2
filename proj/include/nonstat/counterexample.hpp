#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nonstat/classifier.hpp"

namespace nonstat {

// Desk-scale replacement for the tower schedule n_{i+1} = 10^{10^{n_i}}:
// the burst structure on (n_i, 2 n_i] is what the mechanism needs, and a
// fixed ratio >= 8 keeps the scales separated.
struct ScheduleB {
    std::vector<std::int64_t> n_list = {200, 1600, 12800};

    void validate(double min_ratio = 8.0) const;
};

struct StageLog {
    std::int64_t n = 0;          // n_i; products run to 2 n_i
    double search_lo = 0.0, search_hi = 0.0;
    std::int64_t grid_cells = 0;
    std::int64_t window_lo = 0, window_hi = 0;  // accepted jump-moment range
    std::int64_t jump_cell = -1;
    std::int64_t m0 = -1, mbar = -1, mbar_prime = -1;
    bool widened_window = false;
    bool found = false;
    double a_cancel = 0.0;
    double axis_gap = 0.0;
    int deep_bits = 0;
    // L-hat_{2n}/(2n) minus the measured slope at 2n, and the same against
    // the running maximum of (1/m) log |T_m| over [n, 2n] (the plateau).
    double gap_at_end = 0.0;
    double plateau_gap = 0.0;
    std::vector<double> trace;  // log |T_m| at the stage's parameter, m = 1..2n
};

struct CounterexampleResult {
    bool success = false;        // a parameter was found at every stage
    std::int64_t failed_stage = -1;
    double a_found = 0.0;
    std::string a_found_decimal;
    double gap = 0.0;  // max over stages of gap_at_end
    std::vector<StageLog> stages;
};

// Nested cancellation search: per stage, find a jump interval whose jump
// moment lands in [(1.5 - 3 eps) n_i, 1.5 n_i], align its axes, measure the
// resulting dip against the exact expectation sum_{m} N(|H_m|), and shrink
// the parameter interval around the cancellation point for the next stage.
// Stage-1 traces run in extended precision; the dip is unobservable in
// doubles (the head product's rounding noise re-expands through the tail).
CounterexampleResult run_counterexample(const ScheduleB& schedule, std::uint64_t seed,
                                        double eps = 0.1);

}  // namespace nonstat
