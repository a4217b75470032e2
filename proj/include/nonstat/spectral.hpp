#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nonstat/cocycle.hpp"
#include "nonstat/stats.hpp"

namespace nonstat {

// Finite-volume operator u(m+1) + u(m-1) + V(m) u(m) with Dirichlet boundary,
// stored as the symmetric tridiagonal matrix (diag = V, offdiag = 1).
struct TridiagOperator {
    std::vector<double> diag;          // V(first_site) .. V(first_site+n-1)
    std::int64_t first_site = 1;       // lattice index of diag[0]

    std::int64_t size() const { return static_cast<std::int64_t>(diag.size()); }
    // Gershgorin bounds on the spectrum.
    double spectrum_lo() const;
    double spectrum_hi() const;
};

// Potentials sampled from the same stream the cocycle uses, entry for entry.
TridiagOperator build_operator(const EnsembleSpec& spec, const OmegaStream& omega,
                               std::int64_t first_site, std::int64_t size);

struct EigenPair {
    double e = 0.0;
    std::vector<double> phi;  // unit l2 norm
    std::int64_t center = 0;  // index of max |phi| within [0, n)
};

// Number of eigenvalues strictly below x (Sturm count).
std::int64_t sturm_count(const TridiagOperator& op, double x);

// All eigenvalues, ascending, by Sturm bisection to abs_tol; eigenvectors by
// inverse iteration with reorthogonalization inside clusters (gap < 1e-8).
std::vector<EigenPair> eigensolve(const TridiagOperator& op, double abs_tol = 1e-12);

// Eigenvalues restricted to [lo, hi] (same machinery, fewer bisections).
std::vector<EigenPair> eigensolve_range(const TridiagOperator& op, double lo, double hi,
                                        double abs_tol = 1e-12);

// Largest alpha such that |phi_j(m)| <= C e^{xi |c_j| - alpha |m - c_j|} with
// the budget C fixed; equivalently the binding ratio over all (j, m != c_j).
struct SuleFit {
    double alpha_hat = 0.0;
    double c_hat = 1.0;
    std::vector<double> residuals;  // per eigenfunction: max slack used (<= 0)
};

SuleFit sule_fit(std::span<const EigenPair> pairs, double xi, double c_budget = 1.0,
                 double alpha_cap = 50.0);

// Q(q, m) = sum_j |phi_j(q)| |phi_j(m)|; dominates |<delta_q, e^{-itH} delta_m>|
// for every t.
double eigenfunction_correlator(std::span<const EigenPair> pairs, std::int64_t q,
                                std::int64_t m);

// Least-squares slope of log Q(center, center + d) against d.
LineFit correlator_decay(std::span<const EigenPair> pairs, std::int64_t center,
                         std::int64_t d_max);

// max over t_grid of |sum_j e^{-i t E_j} phi_j(q) phi_j(m)|.
double time_evolution_probe(std::span<const EigenPair> pairs, std::int64_t q, std::int64_t m,
                            std::span<const double> t_grid);

std::vector<double> default_t_grid();  // 64 points log-spaced in [0.1, 1e3]

// Line: monotone growth. CurvedV: interior minimum (a decaying component
// dominates before the growth resumes). Peak: interior maximum with decay on
// both sides -- at a finite-volume eigenvalue the shooting solution IS the
// eigenfunction, so its log-profile crests at the localization center.
// Flat: bounded oscillation (elliptic energies).
enum class ShnolShape { Line, CurvedV, Peak, Flat };

// Dirichlet shooting u_{m+1} = (E - V(m)) u_m - u_{m-1}, (u_0, u_1) = (0, 1),
// with log-scale rescaling. Classifies the log |v_m| profile.
struct ShnolResult {
    std::vector<double> log_norms;  // log |v_m|, m = 0..n-1, v_m = (u_{m+1}, u_m)
    double decay_rate_forward = 0.0;  // slope of the branch right of the minimum
    std::int64_t min_index = 0;
    std::int64_t peak_index = 0;
    ShnolShape shape = ShnolShape::Line;
};

ShnolResult shnol_shooting(const EnsembleSpec& spec, const OmegaStream& omega, double e,
                           std::int64_t n);

// Rotation-count growth verdict per E-grid cell: an interval is flagged
// growing when R increases by more than the 2-turn slack between the two
// largest n in n_list.
struct EssentialVerdict {
    double e_lo = 0.0, e_hi = 0.0;
    std::vector<double> r_values;  // R_{n,omega}(I) for each n in n_list
    bool growing = false;
};

std::vector<EssentialVerdict> essential_set_probe(const EnsembleSpec& spec,
                                                  const OmegaStream& omega,
                                                  std::span<const double> e_grid,
                                                  std::span<const std::int64_t> n_list);

}  // namespace nonstat
