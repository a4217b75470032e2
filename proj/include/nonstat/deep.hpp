#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nonstat/ensemble.hpp"

namespace nonstat {

// Extended-precision escape hatch. Tracing a product through a cancellation
// in doubles bottoms out ~30 log-units below the envelope (the relative
// rounding noise of the head product gets re-expanded by the tail), so the
// deep dips the cancellation produces are followed here in MPFR instead.
// Parameters cross module boundaries as decimal strings.

// Bits needed to follow a dip of the given depth in log-units.
int bits_for_depth(double depth);

// log |T_{[m1, m], a}| for m = m1+1 .. m2, computed at `bits` precision.
std::vector<double> deep_window_lognorms(const EnsembleSpec& spec, const OmegaStream& omega,
                                         const std::string& a_decimal, std::int64_t m1,
                                         std::int64_t m2, int bits);

// Descends the full-product norm dip D(a) = log |T_{mbar',a}| around a
// located turn. The flanks obey D = C + log|a - a*| (the misalignment angle
// scales the re-expanded head), so same-side pairs extrapolate the vertex
// and the descent reaches any depth the precision allows. Returns the
// deepest point found, its dip value, and the residual axis gap there.
struct DipDescentResult {
    bool found = false;
    std::string a_decimal;
    double a_double = 0.0;
    double log10_gap = 0.0;
    double dip_lognorm = 0.0;  // log |T_{mbar'}| at the returned point
};

DipDescentResult deep_descend_dip(const EnsembleSpec& spec, const OmegaStream& omega,
                                  double a_center, double cap_lo, double cap_hi,
                                  std::int64_t mbar, std::int64_t mbar_prime, int bits);

}  // namespace nonstat
