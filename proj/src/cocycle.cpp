#include "nonstat/cocycle.hpp"

#include <cmath>
#include <stdexcept>

#include "nonstat/parallel.hpp"

namespace nonstat {

std::int64_t ParamGrid::default_cells(std::int64_t n, std::int64_t cap) {
    const double raw = std::exp(std::pow(static_cast<double>(n), 0.25));
    if (!(raw < static_cast<double>(cap))) return cap;
    return std::max<std::int64_t>(static_cast<std::int64_t>(raw), 1);
}

ParamGrid ParamGrid::over(const EnsembleSpec& spec, std::int64_t n, std::int64_t cap) {
    return ParamGrid{spec.j_lo, spec.j_hi, default_cells(n, cap)};
}

namespace {
constexpr double kRescaleThreshold = 1e100;

void rescale(Mat2& frame, double& log_scale) {
    const double nrm = operator_norm(frame);
    if (nrm >= kRescaleThreshold) {
        const double inv = 1.0 / nrm;
        frame.a11 *= inv;
        frame.a12 *= inv;
        frame.a21 *= inv;
        frame.a22 *= inv;
        log_scale += std::log(nrm);
    }
}
}  // namespace

CocycleTrace run_trace(const EnsembleSpec& spec, const OmegaStream& omega, double a,
                       std::int64_t n, LiftPoint x0) {
    if (a < spec.j_lo - 1e-12 || a > spec.j_hi + 1e-12)
        throw std::domain_error("run_trace: parameter outside J");
    CocycleTrace tr;
    tr.log_norms.reserve(n);
    tr.lift_orbit.reserve(n + 1);
    tr.lift_orbit.push_back(x0);
    double lift = x0;
    for (std::int64_t m = 1; m <= n; ++m) {
        const Mat2 step = sample_step(spec, omega, m).proj_mat(a);
        tr.frame = step * tr.frame;
        rescale(tr.frame, tr.log_scale);
        tr.log_norms.push_back(tr.log_scale + std::log(operator_norm(tr.frame)));
        lift = lift_apply(step, lift);
        tr.lift_orbit.push_back(lift);
    }
    return tr;
}

ScaledMat window_product(const EnsembleSpec& spec, const OmegaStream& omega, double a,
                         std::int64_t m1, std::int64_t m2) {
    ScaledMat acc;
    for (std::int64_t m = m1 + 1; m <= m2; ++m) {
        acc.frame = sample_step(spec, omega, m).proj_mat(a) * acc.frame;
        rescale(acc.frame, acc.log_scale);
    }
    return acc;
}

namespace {

// Continues the one-step branch value c(a) = f~_{A,a}(0) from a known value
// at a_lo to a_hi. Branches differ by integers, and a nearest-integer snap
// can alias once the true motion approaches a full turn, so intervals are
// subdivided below the Lipschitz safety width before any snap is accepted.
// Both built-in families move the one-step lift at 0 by at most 1/pi per
// unit parameter (the parameter enters as a rigid rotation or through a
// single matrix entry).
double continue_branch(const EnsembleSpec& spec, const OmegaStream& omega, std::int64_t step,
                       double a_lo, double c_lo, double a_hi, int depth) {
    constexpr double kLipschitz = 0.5;
    if (kLipschitz * (a_hi - a_lo) > 0.2 && depth < 40) {
        const double mid = 0.5 * (a_lo + a_hi);
        const double c_mid = continue_branch(spec, omega, step, a_lo, c_lo, mid, depth + 1);
        return continue_branch(spec, omega, step, mid, c_mid, a_hi, depth + 1);
    }
    const double h = lift_at_zero(sample_step(spec, omega, step).proj_mat(a_hi));
    const double cand = h + std::round(c_lo - h);
    if (std::abs(cand - c_lo) <= 0.25) return cand;
    if (depth >= 40)
        throw std::runtime_error("lift branch continuation failed at step " +
                                 std::to_string(step));
    const double mid = 0.5 * (a_lo + a_hi);
    const double c_mid = continue_branch(spec, omega, step, a_lo, c_lo, mid, depth + 1);
    return continue_branch(spec, omega, step, mid, c_mid, a_hi, depth + 1);
}

template <class Visit>
void sweep_impl(const EnsembleSpec& spec, const OmegaStream& omega, const ParamGrid& grid,
                std::int64_t n, LiftPoint x0, Visit&& visit) {
    const std::int64_t cols = grid.n_cells + 1;
    std::vector<double> row(cols, x0), next(cols), branch(cols);
    visit(0, std::span<const double>(row.data(), row.size()));
    for (std::int64_t m = 1; m <= n; ++m) {
        // Sequential continuity pass along the grid, then column-parallel
        // advance; each column only reads its own previous value.
        branch[0] = lift_at_zero(sample_step(spec, omega, m).proj_mat(grid.point(0)));
        for (std::int64_t i = 1; i < cols; ++i)
            branch[i] = continue_branch(spec, omega, m, grid.point(i - 1), branch[i - 1],
                                        grid.point(i), 0);
        run_indexed(static_cast<std::size_t>(cols), [&](std::size_t i) {
            const Mat2 step = sample_step(spec, omega, m).proj_mat(grid.point(i));
            next[i] = lift_apply(step, row[i], branch[i] - 0.5);
        });
        row.swap(next);
        visit(m, std::span<const double>(row.data(), row.size()));
    }
}

}  // namespace

LiftSweep lift_sweep(const EnsembleSpec& spec, const OmegaStream& omega, const ParamGrid& grid,
                     std::int64_t n, LiftPoint x0) {
    LiftSweep sweep;
    sweep.grid = grid;
    sweep.n = n;
    sweep.values.resize(static_cast<std::size_t>(n + 1) * (grid.n_cells + 1));
    sweep_impl(spec, omega, grid, n, x0, [&](std::int64_t m, std::span<const double> row) {
        std::copy(row.begin(), row.end(),
                  sweep.values.begin() + static_cast<std::size_t>(m) * (grid.n_cells + 1));
    });
    return sweep;
}

void lift_sweep_stream(const EnsembleSpec& spec, const OmegaStream& omega,
                       const ParamGrid& grid, std::int64_t n, LiftPoint x0,
                       const std::function<void(std::int64_t, std::span<const double>)>& visit) {
    sweep_impl(spec, omega, grid, n, x0, visit);
}

double lift_at_parameter(const EnsembleSpec& spec, const OmegaStream& omega, std::int64_t m_max,
                         double a, LiftPoint x0, std::vector<double>* branches_out) {
    if (branches_out) branches_out->resize(m_max);
    double lift = x0;
    for (std::int64_t m = 1; m <= m_max; ++m) {
        const double c0 =
            lift_at_zero(sample_step(spec, omega, m).proj_mat(spec.j_lo));
        const double c = continue_branch(spec, omega, m, spec.j_lo, c0, a, 0);
        if (branches_out) (*branches_out)[m - 1] = c;
        lift = lift_apply(sample_step(spec, omega, m).proj_mat(a), lift, c - 0.5);
    }
    return lift;
}

double rotation_count(const LiftSweep& sweep, std::int64_t i, std::int64_t i_prime,
                      std::int64_t m) {
    if (i < 0 || i_prime > sweep.grid.n_cells || i > i_prime)
        throw std::invalid_argument("rotation_count: endpoints off the grid");
    if (m < 0 || m > sweep.n) throw std::invalid_argument("rotation_count: m out of range");
    return sweep.at(m, i_prime) - sweep.at(m, i);
}

std::vector<double> interval_lengths(const LiftSweep& sweep, std::int64_t m) {
    std::vector<double> lens(sweep.grid.n_cells);
    const auto r = sweep.row(m);
    for (std::int64_t i = 1; i <= sweep.grid.n_cells; ++i) lens[i - 1] = r[i] - r[i - 1];
    return lens;
}

}  // namespace nonstat
