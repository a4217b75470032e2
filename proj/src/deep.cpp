#include "nonstat/deep.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <stdexcept>

namespace nonstat {

namespace {

namespace mp = boost::multiprecision;
using Big = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;

struct BigMat2 {
    Big a11, a12, a21, a22;
};

BigMat2 big_identity() { return {Big(1), Big(0), Big(0), Big(1)}; }

BigMat2 mul(const BigMat2& a, const BigMat2& b) {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
}

Big norm_of(const BigMat2& m) {
    const Big s = m.a11 * m.a11 + m.a12 * m.a12 + m.a21 * m.a21 + m.a22 * m.a22;
    const Big d = m.a11 * m.a22 - m.a12 * m.a21;
    Big disc = s * s - 4 * d * d;
    if (disc < 0) disc = 0;
    return sqrt((s + sqrt(disc)) / 2);
}

// Step matrix with the parameter applied at full working precision; the
// frozen randomness stays at its double values.
BigMat2 big_step(const StepSample& s, const Big& a) {
    if (s.family == Family::Schrodinger) {
        return {a - Big(s.potential), Big(1), Big(-1), Big(0)};
    }
    const Big ca = cos(Big(s.alpha)), sa = sin(Big(s.alpha));
    BigMat2 m{Big(s.h_norm) * ca, Big(s.h_norm) * (-sa), sa / Big(s.h_norm), ca / Big(s.h_norm)};
    if (s.param_coeff != 0.0) {
        const Big t = Big(s.param_coeff) * a;
        const Big ct = cos(t), st = sin(t);
        m = mul(BigMat2{ct, -st, st, ct}, m);
    }
    return m;
}

struct BigScaled {
    BigMat2 frame = big_identity();
    Big log_scale{0};
};

void big_advance(BigScaled& acc, const BigMat2& step, const Big& rescale_at) {
    acc.frame = mul(step, acc.frame);
    const Big nrm = norm_of(acc.frame);
    if (nrm >= rescale_at) {
        acc.frame.a11 /= nrm;
        acc.frame.a12 /= nrm;
        acc.frame.a21 /= nrm;
        acc.frame.a22 /= nrm;
        acc.log_scale += log(nrm);
    }
}

BigScaled big_window(const EnsembleSpec& spec, const OmegaStream& omega, const Big& a,
                     std::int64_t m1, std::int64_t m2, const Big& rescale_at) {
    BigScaled acc;
    for (std::int64_t m = m1 + 1; m <= m2; ++m)
        big_advance(acc, big_step(sample_step(spec, omega, m), a), rescale_at);
    return acc;
}

// Projective coordinate in [0,1) of the direction (vx, vy).
Big proj_of(const Big& vx, const Big& vy) {
    Big x = atan2(vy, vx) / boost::math::constants::pi<Big>();
    x -= floor(x);
    if (x >= 1) x -= 1;
    return x;
}

Big mod1(Big x) {
    x -= floor(x);
    if (x >= 1) x -= 1;
    return x;
}

// x+ : image direction of the most expanded input; x- : most contracted input.
Big axis_plus(const BigMat2& m) {
    const Big p = m.a11 * m.a11 + m.a21 * m.a21;
    const Big r = m.a12 * m.a12 + m.a22 * m.a22;
    const Big q = m.a11 * m.a12 + m.a21 * m.a22;
    const Big theta = atan2(2 * q, p - r) / 2;
    const Big c = cos(theta), s = sin(theta);
    return proj_of(m.a11 * c + m.a12 * s, m.a21 * c + m.a22 * s);
}

Big axis_minus(const BigMat2& m) {
    const Big p = m.a11 * m.a11 + m.a21 * m.a21;
    const Big r = m.a12 * m.a12 + m.a22 * m.a22;
    const Big q = m.a11 * m.a12 + m.a21 * m.a22;
    const Big theta = atan2(2 * q, p - r) / 2;
    return proj_of(-sin(theta), cos(theta));
}

// Signed circular distance between the two axes; zero exactly at alignment.
struct BigGap {
    const EnsembleSpec& spec;
    const OmegaStream& omega;
    std::int64_t mbar, mbar_prime;
    Big rescale_at = pow(Big(10), 80);

    Big operator()(const Big& a) const {
        const BigScaled head = big_window(spec, omega, a, 0, mbar, rescale_at);
        const BigScaled tail = big_window(spec, omega, a, mbar, mbar_prime, rescale_at);
        const Big diff = axis_plus(head.frame) - axis_minus(tail.frame);
        return mod1(diff + Big(0.5)) - Big(0.5);
    }
};

// boost counts precision in decimal digits.
unsigned digits_for_bits(int bits) {
    return static_cast<unsigned>(std::ceil(static_cast<double>(bits) * 0.30103)) + 8;
}

}  // namespace


int bits_for_depth(double depth) {
    const double d = std::fmax(depth, 0.0);
    return static_cast<int>(std::ceil(d / std::log(2.0))) + 96;
}

std::vector<double> deep_window_lognorms(const EnsembleSpec& spec, const OmegaStream& omega,
                                         const std::string& a_decimal, std::int64_t m1,
                                         std::int64_t m2, int bits) {
    Big::default_precision(digits_for_bits(bits));
    const Big a(a_decimal);
    const Big rescale_at = pow(Big(10), 80);
    std::vector<double> logs;
    logs.reserve(m2 - m1);
    BigScaled acc;
    for (std::int64_t m = m1 + 1; m <= m2; ++m) {
        big_advance(acc, big_step(sample_step(spec, omega, m), a), rescale_at);
        logs.push_back(static_cast<double>(acc.log_scale + log(norm_of(acc.frame))));
    }
    return logs;
}

DipDescentResult deep_descend_dip(const EnsembleSpec& spec, const OmegaStream& omega,
                                  double a_center, double cap_lo, double cap_hi,
                                  std::int64_t mbar, std::int64_t mbar_prime, int bits) {
    Big::default_precision(digits_for_bits(bits));
    const Big rescale_at = pow(Big(10), 80);
    auto dip = [&](const Big& a) -> Big {
        const BigScaled full = big_window(spec, omega, a, 0, mbar_prime, rescale_at);
        return full.log_scale + log(norm_of(full.frame));
    };

    DipDescentResult res;
    Big best(a_center);
    Big d_best = dip(best);

    // Bracket: widen until the norm climbs well above the dip on both
    // sides, never leaving the caller's window (the turn's own territory;
    // deeper resonances of other turns live outside it).
    Big w = Big(std::fmax(std::abs(a_center), 1.0)) * Big(1e-18);
    Big lo = best - w, hi = best + w;
    Big d_lo = dip(lo), d_hi = dip(hi);
    for (int grow = 0; grow < 80; ++grow) {
        if (d_lo > d_best + 3 && d_hi > d_best + 3) break;
        w *= 4;
        lo = best - w;
        hi = best + w;
        bool clamped = false;
        if (lo < Big(cap_lo)) {
            lo = Big(cap_lo);
            clamped = true;
        }
        if (hi > Big(cap_hi)) {
            hi = Big(cap_hi);
            clamped = true;
        }
        d_lo = dip(lo);
        d_hi = dip(hi);
        if (clamped) break;
    }

    // The flanks obey D = C + log|a - a*|, so a same-side pair extrapolates
    // the vertex: |x-a*|/|y-a*| = exp(D(x)-D(y)). Bisection-style probes
    // guard the model; stop once the dip stops deepening (floor reached).
    const Big width_floor = (hi - lo) / pow(Big(2), bits);
    Big stale_ref = d_best;
    int stale = 0;
    for (int it = 0; it < 4 * bits && hi - lo > width_floor; ++it) {
        const bool left_wider = best - lo > hi - best;
        const Big x = left_wider ? lo : hi;        // far point of the wide side
        const Big y = left_wider ? (lo + best) / 2 : (best + hi) / 2;  // nearer probe
        const Big d_y = dip(y);
        Big cand;
        if (d_y < d_best) {
            // Probe is deeper: move the center.
            if (left_wider)
                hi = best;
            else
                lo = best;
            best = y;
            d_best = d_y;
            continue;
        }
        const Big d_x = left_wider ? d_lo : d_hi;
        if (d_x > d_y) {
            const Big rho = exp(d_x - d_y);
            cand = (rho * y - x) / (rho - 1);
            if (!(cand > lo && cand < hi)) cand = (y + best) / 2;
        } else {
            cand = (y + best) / 2;
        }
        // The probe bounds the vertex on its side.
        if (left_wider) {
            lo = y;
            d_lo = d_y;
        } else {
            hi = y;
            d_hi = d_y;
        }
        const Big d_cand = dip(cand);
        if (d_cand < d_best) {
            if (cand < best) {
                hi = best;
                d_hi = d_best;
            } else {
                lo = best;
                d_lo = d_best;
            }
            best = cand;
            d_best = d_cand;
        } else if (cand < best) {
            if (cand > lo) {
                lo = cand;
                d_lo = d_cand;
            }
        } else {
            if (cand < hi) {
                hi = cand;
                d_hi = d_cand;
            }
        }
        if (it % 12 == 11) {
            if (stale_ref - d_best < 0.05) {
                ++stale;
                if (stale >= 3) break;  // dip floor reached
            } else {
                stale = 0;
            }
            stale_ref = d_best;
        }
    }

    const BigGap gap{spec, omega, mbar, mbar_prime};
    const Big g = gap(best);
    res.a_decimal = best.str(digits_for_bits(bits));
    res.a_double = static_cast<double>(best);
    res.log10_gap = g == 0 ? -320.0 : static_cast<double>(log10(abs(g)));
    res.dip_lognorm = static_cast<double>(d_best);
    res.found = true;
    return res;
}

}  // namespace nonstat
