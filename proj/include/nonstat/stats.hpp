#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nonstat/cocycle.hpp"

namespace nonstat {

// Monte Carlo estimates of L_[m0+1..m](a) = E log |T_[m0,m],a,omega| on a set
// of parameter points and step counts. Samples share omega across parameter
// points (common random numbers); the reduction runs over fixed-size sample
// chunks in index order, so results are identical for any thread count.
struct GrowthProfile {
    std::vector<double> a_points;
    std::vector<std::int64_t> n_list;
    std::int64_t m_origin = 0;
    std::int64_t samples = 0;
    std::vector<double> l_hat;   // |n_list| x |a_points|, row-major
    std::vector<double> stderr_;  // same shape

    double at(std::size_t ni, std::size_t ai) const { return l_hat[ni * a_points.size() + ai]; }
    double se(std::size_t ni, std::size_t ai) const { return stderr_[ni * a_points.size() + ai]; }
};

std::vector<std::int64_t> dense_n_list(std::int64_t n);

GrowthProfile estimate_L(const EnsembleSpec& spec, std::span<const double> a_points,
                         std::span<const std::int64_t> n_list, std::int64_t samples,
                         std::uint64_t seed_block, std::int64_t m_origin = 0,
                         bool parallel = true);

// Fitted line y = intercept + slope x with the standard error of the slope.
struct LineFit {
    double slope = 0.0, intercept = 0.0, slope_se = 0.0;
};
LineFit fit_line(std::span<const double> xs, std::span<const double> ys);

// Empirical large-deviation tails p(n) = frac{|log|T_n| - L_hat(n)| > eps n}
// plus a decay-rate fit over the resolvable part of the tail.
struct TailReport {
    std::vector<std::int64_t> n_list;
    std::vector<double> p_hat;
    double delta_hat = 0.0;  // fitted decay rate of log p vs n (0 if unfittable)
    std::int64_t samples = 0;
};

TailReport ld_tail(const EnsembleSpec& spec, double a, std::span<const std::int64_t> n_list,
                   double eps, std::int64_t samples, std::uint64_t seed_block,
                   bool parallel = true);

// Per-n modulus max_i |L(n, a_i) - L(n, a_{i-1})| / n and its trend across n.
struct EquicontinuityReport {
    std::vector<std::int64_t> n_list;
    std::vector<double> modulus;
    LineFit trend;       // modulus vs n
    bool flagged = false;  // grows with n beyond 2 slope standard errors
};

EquicontinuityReport equicontinuity_modulus(const GrowthProfile& profile);

struct AdditivityTriple {
    std::int64_t m1 = 0, m2 = 0, m3 = 0;
};

struct AdditivityReport {
    std::vector<AdditivityTriple> triples;
    std::vector<double> defect;   // L[m1,m2] + L[m2,m3] - L[m1,m3]
    std::vector<double> stderr_;  // of the defect estimator
};

AdditivityReport additivity_defect(const EnsembleSpec& spec, double a,
                                   std::span<const AdditivityTriple> triples,
                                   std::int64_t samples, std::uint64_t seed_block,
                                   bool parallel = true);

// Predicted log-norm profile at a cancellation parameter: growth until
// m_prime, then |L_{m'} - L_[m',m]|.
struct PsiProfile {
    std::int64_t m_prime = 0;
    std::vector<double> values;  // index m = 1..n
};

// l_full[m-1] = L_hat_m for m = 1..n; l_window[m - m_prime - 1] = L_hat_[m',m]
// for m = m_prime+1..n.
PsiProfile psi_profile(std::int64_t m_prime, std::span<const double> l_full,
                       std::span<const double> l_window);

}  // namespace nonstat
