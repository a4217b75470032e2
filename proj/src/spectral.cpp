#include "nonstat/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "nonstat/parallel.hpp"

namespace nonstat {

double TridiagOperator::spectrum_lo() const {
    double lo = diag[0];
    for (double v : diag) lo = std::fmin(lo, v);
    return lo - 2.0;
}

double TridiagOperator::spectrum_hi() const {
    double hi = diag[0];
    for (double v : diag) hi = std::fmax(hi, v);
    return hi + 2.0;
}

TridiagOperator build_operator(const EnsembleSpec& spec, const OmegaStream& omega,
                               std::int64_t first_site, std::int64_t size) {
    if (size < 1) throw std::invalid_argument("build_operator: size must be >= 1");
    TridiagOperator op;
    op.first_site = first_site;
    op.diag.resize(size);
    for (std::int64_t i = 0; i < size; ++i)
        op.diag[i] = sample_potential(spec, omega, first_site + i);
    return op;
}

std::int64_t sturm_count(const TridiagOperator& op, double x) {
    // Negative pivots of the LDL^T factorization of (T - x), with the usual
    // guard against vanishing pivots. Offdiagonals are all 1.
    const std::int64_t n = op.size();
    std::int64_t count = 0;
    double q = op.diag[0] - x;
    if (q < 0) ++count;
    for (std::int64_t i = 1; i < n; ++i) {
        double denom = q;
        if (std::abs(denom) < 1e-300) denom = denom < 0 ? -1e-300 : 1e-300;
        q = op.diag[i] - x - 1.0 / denom;
        if (q < 0) ++count;
    }
    return count;
}

namespace {

// Solves (T - lambda) x = b by LU with partial pivoting specialized to the
// tridiagonal-with-unit-offdiagonal shape; 4 bands suffice for the fill-in.
void tridiag_shifted_solve(const std::vector<double>& diag, double lambda,
                           std::vector<double>& x) {
    const std::int64_t n = static_cast<std::int64_t>(diag.size());
    std::vector<double> d0(n), d1(n > 1 ? n - 1 : 0), d2(n > 2 ? n - 2 : 0);
    std::vector<double> sub(n > 1 ? n - 1 : 0);
    for (std::int64_t i = 0; i < n; ++i) d0[i] = diag[i] - lambda;
    std::fill(d1.begin(), d1.end(), 1.0);
    std::fill(d2.begin(), d2.end(), 0.0);
    std::fill(sub.begin(), sub.end(), 1.0);
    std::vector<std::int64_t> pivoted(n, 0);

    for (std::int64_t i = 0; i + 1 < n; ++i) {
        if (std::abs(sub[i]) > std::abs(d0[i])) {
            pivoted[i] = 1;
            std::swap(d0[i], sub[i]);
            std::swap(d1[i], d0[i + 1]);
            if (i + 2 < n) std::swap(d2[i], d1[i + 1]);
            std::swap(x[i], x[i + 1]);
        }
        double piv = d0[i];
        if (std::abs(piv) < 1e-300) piv = piv < 0 ? -1e-300 : 1e-300;
        const double factor = sub[i] / piv;
        d0[i + 1] -= factor * d1[i];
        if (i + 2 < n) d1[i + 1] -= factor * d2[i];
        x[i + 1] -= factor * x[i];
    }
    for (std::int64_t i = n - 1; i >= 0; --i) {
        double v = x[i];
        if (i + 1 < n) v -= d1[i] * x[i + 1];
        if (i + 2 < n) v -= d2[i] * x[i + 2];
        double piv = d0[i];
        if (std::abs(piv) < 1e-300) piv = piv < 0 ? -1e-300 : 1e-300;
        x[i] = v / piv;
    }
}

void normalize(std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    s = std::sqrt(s);
    if (s == 0) return;
    for (double& x : v) x /= s;
}

std::vector<double> eigenvector_for(const TridiagOperator& op, double lambda,
                                    std::uint64_t salt) {
    const std::int64_t n = op.size();
    std::vector<double> v(n);
    // Reproducible pseudo-random start keeps inverse iteration off exact
    // null directions.
    for (std::int64_t i = 0; i < n; ++i)
        v[i] = bits_to_unit(mix64(salt ^ static_cast<std::uint64_t>(i + 1))) - 0.5;
    normalize(v);
    for (int it = 0; it < 3; ++it) {
        tridiag_shifted_solve(op.diag, lambda, v);
        normalize(v);
    }
    return v;
}

double residual_norm(const TridiagOperator& op, const EigenPair& p) {
    const std::int64_t n = op.size();
    double s = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        double r = (op.diag[i] - p.e) * p.phi[i];
        if (i > 0) r += p.phi[i - 1];
        if (i + 1 < n) r += p.phi[i + 1];
        s += r * r;
    }
    return std::sqrt(s);
}

std::vector<EigenPair> solve_indexed(const TridiagOperator& op, std::int64_t k_lo,
                                     std::int64_t k_hi, double abs_tol) {
    // Eigenvalues with Sturm index k in [k_lo, k_hi): bisection per index.
    const std::int64_t count = k_hi - k_lo;
    std::vector<EigenPair> pairs(count);
    const double lo0 = op.spectrum_lo(), hi0 = op.spectrum_hi();
    run_indexed(static_cast<std::size_t>(count), [&](std::size_t idx) {
        const std::int64_t k = k_lo + static_cast<std::int64_t>(idx);
        double lo = lo0, hi = hi0;
        while (hi - lo > abs_tol) {
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;  // hit double resolution
            if (sturm_count(op, mid) <= k)
                lo = mid;
            else
                hi = mid;
        }
        pairs[idx].e = 0.5 * (lo + hi);
    });
    run_indexed(static_cast<std::size_t>(count), [&](std::size_t idx) {
        pairs[idx].phi = eigenvector_for(op, pairs[idx].e, 0x9e3779b9u + idx);
    });
    // Reorthogonalize clustered eigenvectors (rare for random potentials).
    for (std::int64_t i = 1; i < count; ++i) {
        if (pairs[i].e - pairs[i - 1].e < 1e-8) {
            double dot = 0;
            for (std::int64_t m = 0; m < op.size(); ++m)
                dot += pairs[i].phi[m] * pairs[i - 1].phi[m];
            for (std::int64_t m = 0; m < op.size(); ++m)
                pairs[i].phi[m] -= dot * pairs[i - 1].phi[m];
            normalize(pairs[i].phi);
        }
    }
    for (auto& p : pairs) {
        p.center = std::max_element(p.phi.begin(), p.phi.end(),
                                    [](double a, double b) {
                                        return std::abs(a) < std::abs(b);
                                    }) -
                   p.phi.begin();
        if (residual_norm(op, p) > 1e-10 * std::fmax(1.0, std::abs(op.spectrum_hi())))
            throw std::runtime_error("eigensolve: inverse iteration did not converge near E=" +
                                     std::to_string(p.e));
    }
    return pairs;
}

}  // namespace

std::vector<EigenPair> eigensolve(const TridiagOperator& op, double abs_tol) {
    if (op.size() > 8192) throw std::invalid_argument("eigensolve: size above configured max");
    return solve_indexed(op, 0, op.size(), abs_tol);
}

std::vector<EigenPair> eigensolve_range(const TridiagOperator& op, double lo, double hi,
                                        double abs_tol) {
    const std::int64_t k_lo = sturm_count(op, lo);
    const std::int64_t k_hi = sturm_count(op, hi);
    return solve_indexed(op, k_lo, k_hi, abs_tol);
}

SuleFit sule_fit(std::span<const EigenPair> pairs, double xi, double c_budget,
                 double alpha_cap) {
    if (xi <= 0) throw std::invalid_argument("sule_fit: xi must be positive");
    SuleFit fit;
    fit.c_hat = c_budget;
    fit.alpha_hat = alpha_cap;
    const double log_c = std::log(c_budget);
    for (const auto& p : pairs) {
        const std::int64_t n = static_cast<std::int64_t>(p.phi.size());
        for (std::int64_t m = 0; m < n; ++m) {
            if (m == p.center || p.phi[m] == 0.0) continue;
            const double slack =
                log_c + xi * static_cast<double>(std::abs(p.center)) - std::log(std::abs(p.phi[m]));
            const double alpha = slack / static_cast<double>(std::abs(m - p.center));
            fit.alpha_hat = std::fmin(fit.alpha_hat, alpha);
        }
    }
    fit.residuals.reserve(pairs.size());
    for (const auto& p : pairs) {
        double worst = -std::numeric_limits<double>::infinity();
        const std::int64_t n = static_cast<std::int64_t>(p.phi.size());
        for (std::int64_t m = 0; m < n; ++m) {
            if (m == p.center || p.phi[m] == 0.0) continue;
            worst = std::fmax(worst, std::log(std::abs(p.phi[m])) +
                                         fit.alpha_hat * std::abs(m - p.center) -
                                         xi * std::abs(p.center) - log_c);
        }
        fit.residuals.push_back(worst);
    }
    return fit;
}

double eigenfunction_correlator(std::span<const EigenPair> pairs, std::int64_t q,
                                std::int64_t m) {
    double s = 0;
    for (const auto& p : pairs) s += std::abs(p.phi[q]) * std::abs(p.phi[m]);
    return s;
}

LineFit correlator_decay(std::span<const EigenPair> pairs, std::int64_t center,
                         std::int64_t d_max) {
    std::vector<double> xs, ys;
    for (std::int64_t d = 1; d <= d_max; ++d) {
        const double q = eigenfunction_correlator(pairs, center, center + d);
        if (q <= 0) continue;
        xs.push_back(static_cast<double>(d));
        ys.push_back(std::log(q));
    }
    return fit_line(xs, ys);
}

double time_evolution_probe(std::span<const EigenPair> pairs, std::int64_t q, std::int64_t m,
                            std::span<const double> t_grid) {
    double best = 0;
    for (double t : t_grid) {
        std::complex<double> amp = 0;
        for (const auto& p : pairs)
            amp += std::polar(p.phi[q] * p.phi[m], -t * p.e);
        best = std::fmax(best, std::abs(amp));
    }
    return best;
}

std::vector<double> default_t_grid() {
    std::vector<double> grid(64);
    for (int i = 0; i < 64; ++i)
        grid[i] = std::pow(10.0, -1.0 + 4.0 * static_cast<double>(i) / 63.0);
    return grid;
}

ShnolResult shnol_shooting(const EnsembleSpec& spec, const OmegaStream& omega, double e,
                           std::int64_t n) {
    if (n < 2) throw std::invalid_argument("shnol_shooting: n must be >= 2");
    ShnolResult res;
    res.log_norms.reserve(n);
    // v_m = (u_{m+1}, u_m) advanced by the transfer matrix, rescaled in log.
    double u_prev = 0.0, u_cur = 1.0, log_scale = 0.0;
    for (std::int64_t m = 1; m < n; ++m) {
        res.log_norms.push_back(log_scale +
                                0.5 * std::log(u_cur * u_cur + u_prev * u_prev));
        const double v = sample_potential(spec, omega, m);
        double u_next = (e - v) * u_cur - u_prev;
        u_prev = u_cur;
        u_cur = u_next;
        const double mag = std::fmax(std::abs(u_cur), std::abs(u_prev));
        if (mag > 1e100) {
            u_cur /= mag;
            u_prev /= mag;
            log_scale += std::log(mag);
        }
    }
    res.log_norms.push_back(log_scale + 0.5 * std::log(u_cur * u_cur + u_prev * u_prev));

    const std::int64_t len = static_cast<std::int64_t>(res.log_norms.size());
    res.min_index = std::min_element(res.log_norms.begin(), res.log_norms.end()) -
                    res.log_norms.begin();
    res.peak_index = std::max_element(res.log_norms.begin(), res.log_norms.end()) -
                     res.log_norms.begin();
    // Slope of the branch right of the minimum.
    {
        std::vector<double> xs, ys;
        for (std::int64_t m = res.min_index; m < len; ++m) {
            xs.push_back(static_cast<double>(m));
            ys.push_back(res.log_norms[m]);
        }
        if (xs.size() >= 2) res.decay_rate_forward = fit_line(xs, ys).slope;
    }
    const double peak = res.log_norms[res.peak_index];
    const double trough = res.log_norms[res.min_index];
    const bool bulk_min = res.min_index >= len / 10 && res.min_index <= (9 * len) / 10;
    const bool bulk_peak = res.peak_index >= len / 10 && res.peak_index <= (9 * len) / 10;
    if (peak - trough < 3.0)
        res.shape = ShnolShape::Flat;
    else if (bulk_peak &&
             peak > std::fmax(res.log_norms.front(), res.log_norms.back()) + 2.0)
        res.shape = ShnolShape::Peak;
    else if (bulk_min &&
             trough < std::fmin(res.log_norms.front(), res.log_norms.back()) - 2.0)
        res.shape = ShnolShape::CurvedV;
    else
        res.shape = ShnolShape::Line;
    return res;
}

std::vector<EssentialVerdict> essential_set_probe(const EnsembleSpec& spec,
                                                  const OmegaStream& omega,
                                                  std::span<const double> e_grid,
                                                  std::span<const std::int64_t> n_list) {
    if (e_grid.size() < 2) throw std::invalid_argument("essential_set_probe: grid too small");
    const std::int64_t cells = static_cast<std::int64_t>(e_grid.size()) - 1;
    const std::int64_t n_max = *std::max_element(n_list.begin(), n_list.end());

    // One streaming sweep over the exact grid points; record the rows named
    // in n_list. Non-uniform grids reuse the sweep machinery via per-cell
    // uniform grids of one cell each... simpler: march all points jointly.
    std::vector<double> lifts(e_grid.size(), 0.0), branch(e_grid.size());
    std::vector<std::vector<double>> rows;
    std::vector<double> next(e_grid.size());
    std::size_t next_record = 0;
    std::vector<std::int64_t> sorted_n(n_list.begin(), n_list.end());
    std::sort(sorted_n.begin(), sorted_n.end());
    for (std::int64_t m = 1; m <= n_max; ++m) {
        branch[0] = lift_at_zero(sample_step(spec, omega, m).proj_mat(e_grid[0]));
        for (std::size_t i = 1; i < e_grid.size(); ++i) {
            // Adjacent grid points are close enough for direct continuation;
            // the transfer family moves slowly in E at one step.
            const double h = lift_at_zero(sample_step(spec, omega, m).proj_mat(e_grid[i]));
            branch[i] = h + std::round(branch[i - 1] - h);
        }
        run_indexed(e_grid.size(), [&](std::size_t i) {
            const Mat2 step = sample_step(spec, omega, m).proj_mat(e_grid[i]);
            next[i] = lift_apply(step, lifts[i], branch[i] - 0.5);
        });
        lifts.swap(next);
        while (next_record < sorted_n.size() && sorted_n[next_record] == m) {
            rows.push_back(lifts);
            ++next_record;
        }
    }

    std::vector<EssentialVerdict> verdicts(cells);
    for (std::int64_t c = 0; c < cells; ++c) {
        auto& v = verdicts[c];
        v.e_lo = e_grid[c];
        v.e_hi = e_grid[c + 1];
        for (const auto& row : rows) v.r_values.push_back(row[c + 1] - row[c]);
        const std::size_t k = v.r_values.size();
        v.growing = k >= 2 && v.r_values[k - 1] > v.r_values[k - 2] + 2.0;
    }
    return verdicts;
}

}  // namespace nonstat
