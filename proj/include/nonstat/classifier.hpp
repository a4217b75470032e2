#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nonstat/cocycle.hpp"
#include "nonstat/stats.hpp"

namespace nonstat {

enum class IntervalKind { Small, OpinionChanger, Jump, Anomaly };

struct IntervalReport {
    std::int64_t i = 0;  // grid cell index, 1-based
    IntervalKind kind = IntervalKind::Small;
    std::int64_t m0 = -1;          // first moment with |X_{m,i}| > eps'
    std::int64_t onset = -1;       // last sub-eps' moment before the turn
    std::int64_t first_turn = -1;  // first moment the length settles above 1
    std::int64_t mbar = -1;        // jump index (margin-adjusted first turn)
    std::int64_t turns = 0;        // completed turns by m = n (final band)
    double max_len = 0.0;
    std::int64_t anomaly_m = -1;  // first moment violating every template
    double a_cancel = std::numeric_limits<double>::quiet_NaN();
};

struct Classification {
    double eps_prime = 0.1;
    std::int64_t n = 0;
    std::int64_t tail_window = 0;  // max(5, ceil(eps' n))
    std::vector<IntervalReport> reports;
    std::int64_t anomalies = 0;
    std::int64_t jumps = 0;

    std::vector<std::int64_t> jump_cells() const;
};

// Every interval matched against the three length templates: small
// throughout, excursions that die out (opinion-changer), or completed full
// turns settling just above an integer (jump). At desk scale a cell can host
// several turns, so the templates are tracked as integer bands: the length
// must sit within eps' of a nondecreasing integer except for transits
// shorter than the eps' n window. Patterns violating that (a band running
// backwards, or a stuck transit) are counted as anomalies, never coerced.
Classification classify_intervals(const LiftSweep& sweep, double eps_prime);

// m' rule: first window whose expected log-norm passes the head's, else n.
std::int64_t choose_mbar_prime(double l_mbar, std::span<const double> l_window,
                               std::int64_t mbar, std::int64_t n);

// Full-turn margin: bump mbar until |X_{mbar,i}| >= 1 + delta |J|/N; -1 when
// the run never clears it.
std::int64_t adjust_jump_index(const LiftSweep& sweep, std::int64_t cell, std::int64_t mbar,
                               double monotonicity_delta);

struct CancellationResult {
    bool found = false;
    bool aligned = false;  // axis gap driven below 1e-10 (deeper when deep)
    std::string failure;   // "not-a-jump" | "degenerate-axes" | ""
    double a_cancel = 0.0;
    std::string a_cancel_decimal;  // full-precision value when deep_bits > 0
    std::int64_t mbar = 0, mbar_prime = 0;
    std::vector<double> axis_gap_history;
    double final_gap = 0.0;
};

// Root of the lifted axis difference x+(T_{mbar,a}) - x-(T_{[mbar,mbar'],a})
// over the jump cell (padded by one neighbor). The turn is pinned by
// bisecting the branch-continued image lift against the contracted axis,
// then the axis gap is bracketed inside the winding window. deep_bits > 0
// continues in extended precision so downstream traces can follow the
// cancellation dip. Shallow heads (small L_mbar) can leave the singular
// frame detached from the image, in which case the pinned parameter is
// returned with aligned = false -- for such early jump moments the growth
// profile is insensitive to the parameter choice anyway.
CancellationResult find_cancellation_parameter(const EnsembleSpec& spec,
                                               const OmegaStream& omega, const LiftSweep& sweep,
                                               std::int64_t cell, std::int64_t mbar,
                                               std::int64_t mbar_prime, int deep_bits = 0,
                                               double monotonicity_delta = 0.05);

struct ConclusionResult {
    bool pass = false;
    double worst = 0.0;  // max deviation in units of n
    std::int64_t checks = 0;
    std::int64_t worst_cell = -1;
};

struct MainTheoremAudit {
    double eps = 0.15;
    std::int64_t n = 0;
    std::int64_t grid_cells = 0;
    std::int64_t jump_count = 0;  // M
    double r_total = 0.0;         // R_{n,omega}(J)
    std::int64_t anomalies = 0;
    ConclusionResult growth_typical;      // I
    ConclusionResult growth_exceptional;  // II
    ConclusionResult cancellation;        // IV
    ConclusionResult distribution;        // V
    std::vector<IntervalReport> reports;

    bool all_pass() const {
        return growth_typical.pass && growth_exceptional.pass && cancellation.pass &&
               distribution.pass;
    }
};

struct AuditParams {
    std::int64_t n = 400;
    double eps = 0.15;
    double eps_prime = 0.1;
    std::int64_t grid_cells = 0;  // 0: auto, >= both the [exp(n^1/4)] rule and 8 R
    std::int64_t grid_cap = 4096;
    std::int64_t profile_samples = 800;
    std::int64_t window_samples = 400;
    std::int64_t sampled_cells = 48;   // typical cells exercised for conclusion I
    std::int64_t a_per_cell = 2;
    std::int64_t v_checks = 64;        // sampled (I, m) pairs for conclusion V
    std::uint64_t seed_block = 1;
    bool deep_traces = true;
};

MainTheoremAudit audit_main_theorem(const EnsembleSpec& spec, const OmegaStream& omega,
                                    const AuditParams& params);

// Partial sums of M_n (|J| / N(n))^d over an increasing n sequence; a
// decaying tail is the dimension-zero consistency check for the cover of the
// exceptional set.
std::vector<double> exceptional_cover_volume(std::span<const std::int64_t> m_counts,
                                             std::span<const std::int64_t> grid_cells,
                                             double j_len, double d);

}  // namespace nonstat
