#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nonstat/algebra.hpp"
#include "nonstat/rng.hpp"

namespace nonstat {

// Compactly supported potential distribution with variance bounded away from
// zero (the two standing conditions on the single-site measures).
struct PotentialLaw {
    enum class Kind { Bernoulli, FiniteAtoms, Uniform };
    Kind kind = Kind::Bernoulli;
    // bernoulli(p, v0, v1): value v1 with probability p, else v0
    double p = 0.5, v0 = 0.0, v1 = 1.0;
    std::vector<double> values;   // finite_atoms
    std::vector<double> weights;  // finite_atoms, sums to 1
    double lo = 0.0, hi = 1.0;    // uniform

    static PotentialLaw bernoulli(double p, double v0, double v1);
    static PotentialLaw finite_atoms(std::vector<double> values, std::vector<double> weights);
    static PotentialLaw uniform(double lo, double hi);

    double sample(double u) const;  // u in [0,1)
    double support_bound() const;   // K with supp in [-K, K]
    double mean() const;
    double variance() const;
    void validate(double eps_var = 1e-30) const;
};

// Rule n -> PotentialLaw. "marks" installs a different law on a sparse set of
// sites (currently the perfect squares n = k^2), which is what both appendix
// constructions need.
struct PotentialRule {
    PotentialLaw base;
    bool has_marks = false;
    PotentialLaw mark_law;

    const PotentialLaw& law_at(std::int64_t n) const;
};

bool is_perfect_square(std::int64_t n);

// Where in the schedule the parameter rotation R_a enters the rotation
// family: at every step, only at step 1, only at perfect squares, or never.
enum class ParamMode { None, All, First, Squares };

struct RotationDiagonalSpec {
    std::vector<std::int64_t> n_list;  // norm-100 phase on (n_i, 2 n_i]
    bool alpha_random = true;          // false forces alpha = 0 (deterministic)
    ParamMode param_mode = ParamMode::All;

    bool norm100_phase(std::int64_t n) const;
};

enum class Family { Schrodinger, RotationDiagonal };

// Declarative description of the measure sequence {mu_n} on parametrized
// matrix maps J -> SL(2,R), plus the block size k used for the monotonicity
// and measures conditions (k = 2 for Schrodinger blocks).
struct EnsembleSpec {
    Family family = Family::Schrodinger;
    double j_lo = 0.0, j_hi = 1.0;  // parameter interval J = [b-, b+]
    int k = 2;
    PotentialRule potential;        // schrodinger
    RotationDiagonalSpec rotation;  // rotation_diagonal

    double j_len() const { return j_hi - j_lo; }
    void validate() const;

    std::string to_json() const;
    static EnsembleSpec from_json(const std::string& text);
};

EnsembleSpec bernoulli_schrodinger(double lo = -3.0, double hi = 4.0);

// One sampled step: all randomness frozen at construction, so the map
// a -> Mat2 can be evaluated at any parameter afterwards (common random
// numbers across the grid).
struct StepSample {
    Family family;
    double potential = 0.0;  // schrodinger V(n)
    double alpha = 0.0;      // rotation_diagonal angle
    double h_norm = 2.0;     // rotation_diagonal diag(h, 1/h)
    double param_coeff = 1.0;

    // The transfer form [[a - V, -1], [1, 0]] (resp. R_{ca} H R_alpha).
    Mat2 mat(double a) const;
    Mat2 dmat_da(double a) const;  // analytic parameter derivative

    // The matrix driving all projective/lift machinery. For schrodinger this
    // is the mirror conjugate diag(1,-1) mat(a) diag(1,-1) = [[a-V, 1],[-1, 0]]
    // (the form the appendix constructions use): in the counterclockwise
    // circle orientation the raw transfer family turns backwards in the
    // energy, and the conjugation restores positive monotonicity without
    // touching norms, spectra or the Dirichlet direction e1.
    Mat2 proj_mat(double a) const;
    Mat2 dproj_mat_da(double a) const;
};

StepSample sample_step(const EnsembleSpec& spec, const OmegaStream& omega, std::int64_t n);

// Sampled potential value shared bit-for-bit with the spectral operators.
double sample_potential(const EnsembleSpec& spec, const OmegaStream& omega, std::int64_t n);

// Exact E log|A_n(a)| substitute for the rotation family: the averaged
// expansion rate N(|H_n|), which bounds L within log 2. Not available for
// schrodinger (returns nullopt); there the stats module estimates.
std::optional<double> expected_step_lognorm(const EnsembleSpec& spec, std::int64_t n);

struct MonotonicityReport {
    double delta_est = 0.0;  // min of d(lift)/da over the probe set
    std::int64_t violations = 0;
};

// (B3) probe: differentiates arg(A(a) v) in lift units over sampled blocks of
// size k, a grid of parameters and directions.
MonotonicityReport check_monotonicity(const EnsembleSpec& spec, const OmegaStream& omega,
                                      int samples, int grid, int k_override = 0);

// (B2) probe: max over samples and the a-grid of max(|A(a)|, |dA/da|_F).
double check_c1_bound(const EnsembleSpec& spec, const OmegaStream& omega, int samples,
                      int grid = 16);

// Block view after grouping steps by spec.k (remainder steps stay single).
// T_n is preserved exactly: blocks are plain compositions of the same steps.
struct EnsembleBlocks {
    EnsembleSpec spec;
    int k = 1;

    std::int64_t block_count(std::int64_t n) const { return (n + k - 1) / k; }
    // Product of base steps (i-1)k+1 .. min(ik, n), rightmost applied first.
    Mat2 block_mat(const OmegaStream& omega, std::int64_t block_index, std::int64_t n,
                   double a) const;
};

EnsembleBlocks pair_into_blocks(const EnsembleSpec& spec);

}  // namespace nonstat
