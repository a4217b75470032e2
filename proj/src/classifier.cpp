#include "nonstat/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "nonstat/deep.hpp"
#include "nonstat/parallel.hpp"

namespace nonstat {

std::vector<std::int64_t> Classification::jump_cells() const {
    std::vector<std::int64_t> cells;
    for (const auto& r : reports)
        if (r.kind == IntervalKind::Jump) cells.push_back(r.i);
    return cells;
}

Classification classify_intervals(const LiftSweep& sweep, double eps_prime) {
    if (!(eps_prime > 0.0 && eps_prime < 0.5))
        throw std::invalid_argument("classify_intervals: eps' must lie in (0, 1/2)");
    Classification cls;
    cls.eps_prime = eps_prime;
    cls.n = sweep.n;
    cls.tail_window = std::max<std::int64_t>(
        5, static_cast<std::int64_t>(std::ceil(eps_prime * static_cast<double>(sweep.n))));
    const std::int64_t cells = sweep.grid.n_cells;
    cls.reports.resize(cells);

    run_indexed(static_cast<std::size_t>(cells), [&](std::size_t idx) {
        const std::int64_t i = static_cast<std::int64_t>(idx) + 1;
        IntervalReport rep;
        rep.i = i;
        std::int64_t band = 0;
        std::int64_t transit_start = -1;
        std::int64_t cand_band = 0, cand_since = -1, cand_entry = -1;
        std::int64_t last_low = 0;  // last moment with len < eps'
        const std::int64_t hold = 3;  // steps in-band before a band commits
        for (std::int64_t m = 0; m <= sweep.n; ++m) {
            const double len = sweep.at(m, i) - sweep.at(m, i - 1);
            rep.max_len = std::fmax(rep.max_len, len);
            if (rep.m0 < 0 && len > eps_prime) rep.m0 = m;
            if (len < eps_prime && rep.first_turn < 0) last_low = m;
            const auto k = static_cast<std::int64_t>(std::llround(len));
            // The settled gap contracts onto the integer from either side;
            // a small tolerance keeps fp-collapsed turns inside the band.
            const bool in_band = std::abs(len - static_cast<double>(k)) < eps_prime + 1e-9;
            if (in_band && k == band) {
                transit_start = -1;
                cand_since = -1;
            } else if (in_band) {
                // Tentative new band; commits only after `hold` steps so a
                // one-sample brush with an integer stays a transit.
                if (cand_since < 0 || k != cand_band) {
                    cand_band = k;
                    cand_since = m;
                    cand_entry = m;
                }
                if (transit_start < 0) transit_start = m;
                if (m - cand_since + 1 >= hold) {
                    if (cand_band < band && rep.anomaly_m < 0)
                        rep.anomaly_m = m;  // a settled band ran backwards
                    band = cand_band;
                    if (band >= 1 && rep.first_turn < 0) {
                        rep.first_turn = cand_entry;
                        rep.onset = last_low;
                    }
                    transit_start = -1;
                    cand_since = -1;
                }
            } else {
                cand_since = -1;
                if (transit_start < 0) transit_start = m;
            }
            if (transit_start >= 0 && m - transit_start >= cls.tail_window &&
                rep.anomaly_m < 0)
                rep.anomaly_m = m;  // excursion refused to die out
        }
        if (rep.anomaly_m >= 0) {
            rep.kind = IntervalKind::Anomaly;
        } else if (band == 0) {
            rep.kind = rep.m0 < 0 ? IntervalKind::Small : IntervalKind::OpinionChanger;
        } else {
            rep.kind = IntervalKind::Jump;
            rep.turns = band;
            rep.mbar = rep.first_turn;
        }
        cls.reports[idx] = rep;
    });
    for (const auto& r : cls.reports) {
        if (r.kind == IntervalKind::Anomaly) ++cls.anomalies;
        if (r.kind == IntervalKind::Jump) ++cls.jumps;
    }
    return cls;
}

std::int64_t choose_mbar_prime(double l_mbar, std::span<const double> l_window,
                               std::int64_t mbar, std::int64_t n) {
    for (std::int64_t m = mbar + 1; m <= n; ++m) {
        if (l_window[m - mbar - 1] > l_mbar) return m;
    }
    return n;
}

std::int64_t adjust_jump_index(const LiftSweep& sweep, std::int64_t cell, std::int64_t mbar,
                               double monotonicity_delta) {
    // Bump until the cell's image interval has cleared one full turn by the
    // monotonicity margin delta |J|/N. A settled gap can also close onto 1
    // from below (turn at the cell seam), so failing the strict margin we
    // fall back to the first settled moment. Returns -1 if nothing settles.
    const double margin = 1.0 + monotonicity_delta * sweep.grid.spacing();
    for (std::int64_t m = mbar; m < sweep.n; ++m)
        if (sweep.at(m, cell) - sweep.at(m, cell - 1) >= margin) return m;
    for (std::int64_t m = mbar; m < sweep.n; ++m)
        if (sweep.at(m, cell) - sweep.at(m, cell - 1) >= 1.0 - 0.1) return m;
    return -1;
}

namespace {

double mod1(double x) { return canonical_proj(x); }

struct AxisGapEval {
    const EnsembleSpec& spec;
    const OmegaStream& omega;
    std::int64_t mbar, mbar_prime;

    // Signed circular distance from x+(T_mbar) to x-(T_[mbar,mbar']): zero
    // exactly at alignment, continuous except for a +-1 wrap at the
    // antipode (where |G| ~ 1/2, so wrap brackets reject themselves).
    double operator()(double a) const {
        const ScaledMat head = window_product(spec, omega, a, 0, mbar);
        const ScaledMat tail = window_product(spec, omega, a, mbar, mbar_prime);
        const double diff = polar_axes(head.frame).x_plus.x - polar_axes(tail.frame).x_minus.x;
        return mod1(diff + 0.5) - 0.5;
    }
};

}  // namespace

CancellationResult find_cancellation_parameter(const EnsembleSpec& spec,
                                               const OmegaStream& omega, const LiftSweep& sweep,
                                               std::int64_t cell, std::int64_t mbar,
                                               std::int64_t mbar_prime, int deep_bits,
                                               double monotonicity_delta) {
    CancellationResult res;
    res.mbar = adjust_jump_index(sweep, cell, mbar, monotonicity_delta);
    if (res.mbar < 0 || res.mbar >= sweep.n) {
        res.failure = "not-a-jump";
        return res;
    }
    if (mbar_prime <= res.mbar) mbar_prime = res.mbar + 1;
    res.mbar_prime = std::min(mbar_prime, sweep.n);

    // The crossing lives in this cell up to a one-cell edge effect (the gap
    // can settle onto 1 from below when the turn sits at the cell seam), so
    // the search pads the cell by a neighbor on each side.
    double lo0 = std::fmax(sweep.grid.j_lo, sweep.grid.point(cell - 2));
    double hi0 = std::fmin(sweep.grid.j_hi, sweep.grid.point(cell + 1));
    AxisGapEval gap{spec, omega, res.mbar, res.mbar_prime};

    // Both windows must be uniformly hyperbolic across the search range.
    for (int probe = 0; probe <= 4; ++probe) {
        const double a = lo0 + (hi0 - lo0) * probe / 4.0;
        if (operator_norm(window_product(spec, omega, a, 0, res.mbar).frame) <= 1.0 + 1e-6 ||
            operator_norm(window_product(spec, omega, a, res.mbar, res.mbar_prime).frame) <=
                1.0 + 1e-6) {
            res.failure = "degenerate-axes";
            return res;
        }
    }

    // The image lift x~_{mbar}(a) is monotone in a and exactly computable on
    // the sweep's branch family, so the turn is pinned by bisecting it
    // against the lift level where the image meets the tail's contracted
    // axis. The axis gap G then brackets its root around the pinned point
    // (all G discontinuities jump downward, so G(lo) < 0 < G(hi) always
    // holds a genuine root).
    auto lift_at = [&](double a) { return lift_at_parameter(spec, omega, res.mbar, a); };
    const double lift_lo = lift_at(lo0);
    const double lift_hi = lift_at(hi0);
    const double pos_lo = canonical_proj(lift_lo);

    const double a_mid = 0.5 * (lo0 + hi0);
    double x_minus =
        polar_axes(window_product(spec, omega, a_mid, res.mbar, res.mbar_prime).frame).x_minus.x;

    const auto k_max = static_cast<std::int64_t>(std::floor(lift_hi - lift_lo)) + 1;
    for (std::int64_t k = 0; k <= k_max && !res.found; ++k) {
        double target = lift_lo + canonical_proj(x_minus - pos_lo) + static_cast<double>(k);
        if (target <= lift_lo || target >= lift_hi) continue;

        // Two passes: the second refreshes the slowly-moving axis estimate
        // at the pinned point.
        double a_pin = a_mid;
        for (int pass = 0; pass < 2; ++pass) {
            double lo = lo0, hi = hi0;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid == lo || mid == hi) break;
                if (lift_at(mid) < target)
                    lo = mid;
                else
                    hi = mid;
            }
            a_pin = 0.5 * (lo + hi);
            const double x_minus_here =
                polar_axes(window_product(spec, omega, a_pin, res.mbar, res.mbar_prime).frame)
                    .x_minus.x;
            const double shift = canonical_proj(x_minus_here - pos_lo) -
                                 canonical_proj(x_minus - pos_lo);
            x_minus = x_minus_here;
            target += shift > 0.5 ? shift - 1.0 : (shift < -0.5 ? shift + 1.0 : shift);
            if (target <= lift_lo || target >= lift_hi) break;
        }

        // The turn's own territory: parameters whose image lift stays
        // within ~a turn of the crossing. Dips of other turns (possibly
        // much deeper) live outside and must not capture the descent.
        auto lift_window_edge = [&](double sign) {
            double lo = a_pin, hi = sign > 0 ? hi0 : lo0;
            const double want = target + sign * 1.2;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid == lo || mid == hi) break;
                if ((lift_at(mid) - want) * sign < 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            return 0.5 * (lo + hi);
        };
        const double cap_lo = lift_window_edge(-1.0);
        const double cap_hi = lift_window_edge(1.0);

        // Descend the full-product norm dip around the pin: its flanks obey
        // D = C + log|a - a*|, so a ternary phase in doubles either reaches
        // the vertex or bottoms out on the rounding floor, in which case the
        // extended-precision descent continues from there.
        auto dip = [&](double a) {
            return window_product(spec, omega, a, 0, res.mbar_prime).log_norm();
        };
        const double ulp = std::fmax(std::abs(a_pin), 1.0) * 2.3e-16;
        double d_pin = dip(a_pin);
        double w = 64.0 * ulp;
        bool bracketed = false;
        for (; a_pin - w >= cap_lo && a_pin + w <= cap_hi; w *= 4.0) {
            if (dip(a_pin - w) > d_pin + 3.0 && dip(a_pin + w) > d_pin + 3.0) {
                bracketed = true;
                break;
            }
        }
        double lo = bracketed ? a_pin - w : cap_lo;
        double hi = bracketed ? a_pin + w : cap_hi;
        for (int it = 0; it < 120 && hi - lo > 2.0 * ulp; ++it) {
            const double p1 = lo + (hi - lo) / 3.0;
            const double p2 = hi - (hi - lo) / 3.0;
            if (dip(p1) < dip(p2))
                hi = p2;
            else
                lo = p1;
        }
        const double a_star = 0.5 * (lo + hi);
        const double g_star = std::abs(gap(a_star));
        res.axis_gap_history.push_back(g_star);

        if (g_star < 1e-10 && deep_bits <= 0) {
            res.a_cancel = a_star;
            res.final_gap = g_star;
            res.found = true;
            res.aligned = true;
            return res;
        }

        const int bits = std::max(deep_bits, 256);
        const DipDescentResult deep = deep_descend_dip(spec, omega, a_star, cap_lo, cap_hi,
                                                       res.mbar, res.mbar_prime, bits);
        if (deep.found) {
            res.a_cancel = deep.a_double;
            res.a_cancel_decimal = deep.a_decimal;
            res.final_gap = std::pow(10.0, deep.log10_gap);
            res.axis_gap_history.push_back(res.final_gap);
            res.found = true;
            res.aligned = res.final_gap < 1e-10;
            return res;
        }
    }
    // No descending dip at any wrap target: keep the last pin as the best
    // available parameter (early jump moments are insensitive to the choice).
    if (!res.found && k_max >= 0) {
        double lo = lo0, hi = hi0;
        double target = lift_lo + canonical_proj(x_minus - pos_lo);
        if (target > lift_lo && target < lift_hi) {
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid == lo || mid == hi) break;
                if (lift_at(mid) < target)
                    lo = mid;
                else
                    hi = mid;
            }
            res.a_cancel = 0.5 * (lo + hi);
            res.final_gap = std::abs(gap(res.a_cancel));
            res.found = true;
        }
    }
    if (!res.found) res.failure = "not-a-jump";
    return res;
}

namespace {

// Deterministic sub-draws for the audit's sampling decisions.
struct AuditRng {
    OmegaStream stream;
    std::int64_t counter = 0;
    double next() { return stream.uniform(counter++, 77); }
};

std::vector<double> window_trace_lognorms(const EnsembleSpec& spec, const OmegaStream& omega,
                                          double a, std::int64_t m1, std::int64_t m2) {
    std::vector<double> logs;
    logs.reserve(m2 - m1);
    ScaledMat acc;
    for (std::int64_t m = m1 + 1; m <= m2; ++m) {
        acc.frame = sample_step(spec, omega, m).proj_mat(a) * acc.frame;
        const double nrm = operator_norm(acc.frame);
        if (nrm >= 1e100) {
            acc.frame.a11 /= nrm;
            acc.frame.a12 /= nrm;
            acc.frame.a21 /= nrm;
            acc.frame.a22 /= nrm;
            acc.log_scale += std::log(nrm);
        }
        logs.push_back(acc.log_norm());
    }
    return logs;
}

}  // namespace

MainTheoremAudit audit_main_theorem(const EnsembleSpec& spec, const OmegaStream& omega,
                                    const AuditParams& params) {
    MainTheoremAudit audit;
    audit.eps = params.eps;
    audit.n = params.n;
    const std::int64_t n = params.n;

    // Grid sizing: the subexponential [exp(n^{1/4})] rule only resolves
    // individual turns once n is astronomically large; at desk scale the grid
    // is widened to ~8 cells per expected turn, measured from the endpoints.
    std::int64_t cells = params.grid_cells;
    if (cells <= 0) {
        const ParamGrid probe{spec.j_lo, spec.j_hi, 1};
        const LiftSweep ends = lift_sweep(spec, omega, probe, n);
        const double r_total = ends.at(n, 1) - ends.at(n, 0);
        cells = std::max(ParamGrid::default_cells(n, params.grid_cap),
                         std::min(params.grid_cap,
                                  (static_cast<std::int64_t>(std::ceil(8.0 * r_total)) / 64 + 1) *
                                      64));
    }
    audit.grid_cells = cells;

    const ParamGrid grid{spec.j_lo, spec.j_hi, cells};
    const LiftSweep sweep = lift_sweep(spec, omega, grid, n);
    audit.r_total = rotation_count(sweep, 0, cells, n);

    Classification cls = classify_intervals(sweep, params.eps_prime);
    audit.anomalies = cls.anomalies;
    audit.jump_count = cls.jumps;

    AuditRng rng{OmegaStream{hash_combine(omega.master_seed, 0xA0D17u)}};

    // Columns needing dense L-hat estimates: right endpoints of the sampled
    // typical cells and of every jump cell.
    std::vector<std::int64_t> typical;
    for (const auto& r : cls.reports)
        if (r.kind == IntervalKind::Small || r.kind == IntervalKind::OpinionChanger)
            typical.push_back(r.i);
    std::vector<std::int64_t> sampled_typical;
    if (!typical.empty()) {
        for (std::int64_t t = 0; t < params.sampled_cells; ++t) {
            const auto pick = static_cast<std::size_t>(rng.next() *
                                                       static_cast<double>(typical.size()));
            sampled_typical.push_back(typical[std::min(pick, typical.size() - 1)]);
        }
        std::sort(sampled_typical.begin(), sampled_typical.end());
        sampled_typical.erase(std::unique(sampled_typical.begin(), sampled_typical.end()),
                              sampled_typical.end());
    }

    std::vector<std::int64_t> columns = sampled_typical;
    for (const auto& r : cls.reports)
        if (r.kind == IntervalKind::Jump) columns.push_back(r.i);
    std::sort(columns.begin(), columns.end());
    columns.erase(std::unique(columns.begin(), columns.end()), columns.end());

    std::vector<double> col_points(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) col_points[c] = grid.point(columns[c]);
    const auto n_dense = dense_n_list(n);
    const GrowthProfile profile =
        estimate_L(spec, col_points, n_dense, params.profile_samples, params.seed_block);
    auto l_hat_at = [&](std::int64_t i, std::int64_t m) {
        const auto c = static_cast<std::size_t>(
            std::lower_bound(columns.begin(), columns.end(), i) - columns.begin());
        return profile.at(static_cast<std::size_t>(m - 1), c);
    };

    // Conclusion I: growth tracks L-hat on typical cells, every m.
    {
        ConclusionResult c;
        for (std::int64_t i : sampled_typical) {
            for (std::int64_t rep = 0; rep < params.a_per_cell; ++rep) {
                const double a = grid.point(i - 1) + grid.spacing() * rng.next();
                const CocycleTrace tr = run_trace(spec, omega, a, n);
                for (std::int64_t m = 1; m <= n; ++m) {
                    c.worst = std::fmax(c.worst, std::abs(tr.log_norms[m - 1] - l_hat_at(i, m)) /
                                                     static_cast<double>(n));
                    ++c.checks;
                }
            }
        }
        c.pass = c.worst <= params.eps;
        audit.growth_typical = c;
    }

    ConclusionResult c2, c4;
    for (auto& r : cls.reports) {
        // Multi-turn cells host several exceptional moments; psi built from
        // the first turn only describes the trace between its own turns, so
        // the cancellation conclusion is audited on single-turn cells.
        if (r.kind != IntervalKind::Jump || r.turns != 1) continue;
        const std::int64_t i = r.i;
        const std::int64_t mbar = adjust_jump_index(sweep, i, r.first_turn, 0.05);
        if (mbar < 0 || mbar >= n) continue;
        r.mbar = mbar;

        std::vector<double> l_full(n);
        for (std::int64_t m = 1; m <= n; ++m) l_full[m - 1] = l_hat_at(i, m);
        const double b_i = grid.point(i);

        // Candidate jump moments: the first excursion and the onset of the
        // final ascent. For fast-settling turns they coincide; for wandering
        // branches the trace picks out which moment the cancellation uses.
        std::vector<std::int64_t> anchors{std::min(r.m0 + cls.tail_window, n - 1)};
        if (r.onset >= 0) {
            const std::int64_t alt = std::min(r.onset + cls.tail_window, n - 1);
            if (std::abs(alt - anchors[0]) > cls.tail_window) anchors.push_back(alt);
        }

        struct AnchorData {
            std::int64_t m_psi;
            std::vector<double> l_window;
            PsiProfile psi;
        };
        std::vector<AnchorData> cands;
        double depth = 0.0;
        for (std::int64_t m_psi : anchors) {
            AnchorData cand;
            cand.m_psi = m_psi;
            const GrowthProfile win = estimate_L(
                spec, std::span<const double>(&b_i, 1), dense_n_list(n - m_psi),
                params.window_samples,
                hash_combine(params.seed_block, static_cast<std::uint64_t>(i)), m_psi);
            cand.l_window.resize(n - m_psi);
            for (std::int64_t m = m_psi + 1; m <= n; ++m)
                cand.l_window[m - m_psi - 1] = win.at(static_cast<std::size_t>(m - m_psi - 1), 0);
            cand.psi = psi_profile(m_psi, l_full, cand.l_window);
            for (std::int64_t m = 1; m <= n; ++m)
                depth = std::fmax(depth, l_full[m - 1] - cand.psi.values[m - 1]);
            cands.push_back(std::move(cand));
        }

        // Conclusion II at a sampled parameter in the cell, split at the
        // primary anchor.
        {
            const AnchorData& c0 = cands.front();
            const double a = grid.point(i - 1) + grid.spacing() * rng.next();
            const CocycleTrace head = run_trace(spec, omega, a, c0.m_psi);
            for (std::int64_t m = 1; m <= c0.m_psi; ++m) {
                const double dev =
                    std::abs(head.log_norms[m - 1] - l_full[m - 1]) / static_cast<double>(n);
                if (dev > c2.worst) {
                    c2.worst = dev;
                    c2.worst_cell = i;
                }
                ++c2.checks;
            }
            const std::vector<double> tail_logs =
                window_trace_lognorms(spec, omega, a, c0.m_psi, n);
            for (std::int64_t m = c0.m_psi + 1; m <= n; ++m) {
                const double dev =
                    std::abs(tail_logs[m - c0.m_psi - 1] - c0.l_window[m - c0.m_psi - 1]) /
                    static_cast<double>(n);
                if (dev > c2.worst) {
                    c2.worst = dev;
                    c2.worst_cell = i;
                }
                ++c2.checks;
            }
        }

        // The lemma's window split for the alignment search, via additivity.
        std::vector<double> l_search(n - mbar);
        for (std::int64_t m = mbar + 1; m <= n; ++m)
            l_search[m - mbar - 1] = std::fmax(0.0, l_full[m - 1] - l_full[mbar - 1]);
        const std::int64_t mbar_prime = choose_mbar_prime(l_full[mbar - 1], l_search, mbar, n);

        const int deep_bits = params.deep_traces ? bits_for_depth(depth + 60.0) : 0;
        const CancellationResult cancel =
            find_cancellation_parameter(spec, omega, sweep, i, mbar, mbar_prime, deep_bits);
        if (!cancel.found) continue;
        r.a_cancel = cancel.a_cancel;

        // Conclusion IV: the trace at the cancellation parameter follows psi
        // for one of the candidate jump moments.
        std::vector<double> trace_logs;
        if (params.deep_traces && !cancel.a_cancel_decimal.empty()) {
            trace_logs = deep_window_lognorms(spec, omega, cancel.a_cancel_decimal, 0, n,
                                              bits_for_depth(depth + 60.0));
        } else {
            trace_logs = window_trace_lognorms(spec, omega, cancel.a_cancel, 0, n);
        }
        double cell_worst = 1e300;
        for (const AnchorData& cand : cands) {
            double worst = 0.0;
            for (std::int64_t m = 1; m <= n; ++m)
                worst = std::fmax(worst, std::abs(trace_logs[m - 1] - cand.psi.values[m - 1]) /
                                             static_cast<double>(n));
            cell_worst = std::fmin(cell_worst, worst);
        }
        if (cell_worst > c4.worst) {
            c4.worst = cell_worst;
            c4.worst_cell = i;
        }
        c4.checks += n;
    }
    c2.pass = c2.worst <= params.eps;
    c4.pass = c4.worst <= params.eps;
    audit.growth_exceptional = c2;
    audit.cancellation = c4;

    // Conclusion V via the count behind the distribution part: the number of
    // cells in I whose image interval has completed a turn by moment m
    // tracks the rotation count R_{m}(I).
    {
        ConclusionResult c5;
        auto turns_completed = [&](std::int64_t i_lo, std::int64_t i_hi, std::int64_t m) {
            // Completed turns with multiplicity; the eps' band admits gaps
            // still settling onto the integer from below.
            std::int64_t count = 0;
            for (std::int64_t i = i_lo + 1; i <= i_hi; ++i) {
                const double len = sweep.at(m, i) - sweep.at(m, i - 1);
                count += static_cast<std::int64_t>(std::floor(len + params.eps_prime + 1e-9));
            }
            return count;
        };
        for (std::int64_t t = 0; t < params.v_checks; ++t) {
            auto i_lo = static_cast<std::int64_t>(rng.next() * static_cast<double>(cells));
            auto i_hi = static_cast<std::int64_t>(rng.next() * static_cast<double>(cells));
            if (i_lo > i_hi) std::swap(i_lo, i_hi);
            if (i_lo == i_hi) i_hi = std::min<std::int64_t>(i_hi + 1, cells);
            const auto m = 1 + static_cast<std::int64_t>(rng.next() * static_cast<double>(n - 1));
            const double r = rotation_count(sweep, i_lo, i_hi, m);
            const double dev = std::abs(static_cast<double>(turns_completed(i_lo, i_hi, m)) - r);
            c5.worst = std::fmax(c5.worst, dev / static_cast<double>(n));
            ++c5.checks;
        }
        const double dev =
            std::abs(static_cast<double>(turns_completed(0, cells, n)) - audit.r_total);
        c5.worst = std::fmax(c5.worst, dev / static_cast<double>(n));
        ++c5.checks;
        c5.pass = c5.worst <= params.eps;
        audit.distribution = c5;
    }

    audit.reports = std::move(cls.reports);
    return audit;
}

std::vector<double> exceptional_cover_volume(std::span<const std::int64_t> m_counts,
                                             std::span<const std::int64_t> grid_cells,
                                             double j_len, double d) {
    if (!(d > 0.0 && d <= 1.0))
        throw std::invalid_argument("exceptional_cover_volume: d must lie in (0, 1]");
    if (m_counts.size() != grid_cells.size())
        throw std::invalid_argument("exceptional_cover_volume: mismatched inputs");
    std::vector<double> partial(m_counts.size());
    double acc = 0;
    for (std::size_t t = 0; t < m_counts.size(); ++t) {
        acc += static_cast<double>(m_counts[t]) *
               std::pow(j_len / static_cast<double>(grid_cells[t]), d);
        partial[t] = acc;
    }
    return partial;
}

}  // namespace nonstat
