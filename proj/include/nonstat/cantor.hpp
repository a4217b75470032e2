#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nonstat/algebra.hpp"

namespace nonstat {

// One side of the locally-Cantor construction at energy E: two projective
// contractions (the transfer maps at V = 0 and V = 1, or their inverses)
// with a validated trapping interval around their fixed directions.
struct CantorIFS {
    double e = 100.0;
    Mat2 map0, map1;
    double trap_lo = 0.0, trap_hi = 0.0;  // projective coordinates, no wrap
    double max_derivative = 0.0;          // sup of f' over the trap, both maps
};

struct CantorPair {
    CantorIFS k_side;  // forward maps, attracting interval
    CantorIFS c_side;  // inverse maps, repelling side
};

// Builds both dynamically-defined Cantor sets for E in [98, 102]. Throws
// std::domain_error when trap validation fails (outside the hyperbolic
// regime).
CantorPair build_cantor_pair(double e);

struct CoverInterval {
    double lo = 0.0, hi = 0.0;
    double length() const { return hi - lo; }
};

// Images of the trap under all 2^depth compositions, in symbolic (binary)
// order, outward-rounded by 1e-14 per composition so covers stay honest
// supersets.
std::vector<CoverInterval> cover(const CantorIFS& ifs, int depth);

bool cover_disjoint(std::span<const CoverInterval> boxes);

// log 2 / (mean per-level log contraction) read off covers up to depth d;
// levels below the rounding floor are excluded.
double box_dimension_estimate(const CantorIFS& ifs, int depth);

struct SurvivorCell {
    double e_lo = 0.0, e_hi = 0.0;
};

struct IntersectionResult {
    std::vector<SurvivorCell> cells;  // surviving E-cells at the final level
    std::vector<std::int64_t> level_counts;
    std::vector<double> level_widths;
    double dim_estimate = 0.0;  // survivor box-count slope over the last levels
    double k_motion_sign = 0.0;  // sign of dx/dE for K-side markers
    double c_motion_sign = 0.0;  // sign for C-side markers (expected opposite)
    bool budget_exhausted = false;
};

// Adaptive E-subdivision: a cell survives when some K-cover box, mapped
// through the impurity step and hulled over the cell's endpoints, overlaps
// the hull of some C-cover box. Hulls make every level a superset of the
// true intersection-parameter set.
IntersectionResult intersection_parameters(double e_lo, double e_hi, int cover_depth,
                                           int levels, std::int64_t cell_budget = 1 << 20);

}  // namespace nonstat
