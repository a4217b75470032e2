#include "nonstat/algebra.hpp"

#include <cmath>

namespace nonstat {

Mat2& Mat2::renormalize_det() {
    // The computed det carries an absolute error ~1e-16 * |M|^2, so the
    // correction is only trustworthy while the entries are moderate; in the
    // strongly hyperbolic regime sigma_2 is below double resolution anyway
    // and rescaling by a cancelled det would corrupt the product.
    const double s2 = a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22;
    if (s2 > 1e10) return *this;
    const double d = det();
    if (d > 0.5 && std::abs(d - 1.0) > 1e-12) {
        const double s = 1.0 / std::sqrt(d);
        a11 *= s;
        a12 *= s;
        a21 *= s;
        a22 *= s;
    }
    return *this;
}

Mat2 rotation(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return {c, -s, s, c};
}

double canonical_proj(double x) {
    double r = x - std::floor(x);
    if (r >= 1.0) r -= 1.0;  // guards against floor rounding at the seam
    return r;
}

ProjPoint direction_of(double vx, double vy) {
    return ProjPoint{canonical_proj(std::atan2(vy, vx) / M_PI)};
}

double proj_distance(ProjPoint a, ProjPoint b) {
    double d = canonical_proj(a.x - b.x);
    return std::min(d, 1.0 - d);
}

Mat2 mat_product(std::span<const Mat2> ms) {
    if (ms.empty()) throw std::invalid_argument("mat_product: empty list");
    Mat2 acc = ms[0];
    for (std::size_t i = 1; i < ms.size(); ++i) acc = acc * ms[i];
    return acc;
}

double operator_norm(const Mat2& m) {
    // Largest singular value via s = tr(M^T M) and det; exact for 2x2. The
    // entries are scaled out first so s^2 cannot overflow for large frames.
    const double mx = std::fmax(std::fmax(std::abs(m.a11), std::abs(m.a12)),
                                std::fmax(std::abs(m.a21), std::abs(m.a22)));
    if (mx == 0.0) return 0.0;
    const double b11 = m.a11 / mx, b12 = m.a12 / mx, b21 = m.a21 / mx, b22 = m.a22 / mx;
    const double s = b11 * b11 + b12 * b12 + b21 * b21 + b22 * b22;
    const double d = b11 * b22 - b12 * b21;
    const double disc = std::sqrt(std::fmax(s * s - 4.0 * d * d, 0.0));
    return mx * std::sqrt(0.5 * (s + disc));
}

PolarAxes polar_axes(const Mat2& m) {
    if (operator_norm(m) <= 1.0 + 1e-8)
        throw std::domain_error("polar_axes: matrix is numerically a rotation");
    // M^T M = [[p, q], [q, r]]; eigenvector angle of the top eigenvalue.
    const double p = m.a11 * m.a11 + m.a21 * m.a21;
    const double r = m.a12 * m.a12 + m.a22 * m.a22;
    const double q = m.a11 * m.a12 + m.a21 * m.a22;
    const double theta = 0.5 * std::atan2(2.0 * q, p - r);
    const double c = std::cos(theta), s = std::sin(theta);
    // v1 = (c, s) is the most expanded input direction; v2 = (-s, c) the most
    // contracted one. x^- = [v2], x^+ = [M v1].
    PolarAxes axes;
    axes.x_minus = direction_of(-s, c);
    double ux = c, uy = s;
    m.apply(ux, uy);
    axes.x_plus = direction_of(ux, uy);
    return axes;
}

std::pair<double, double> cancellation_norm_check(const Mat2& a, const Mat2& b,
                                                  double axis_tol) {
    const PolarAxes pa = polar_axes(a);
    const PolarAxes pb = polar_axes(b);
    const double gap = proj_distance(pa.x_plus, pb.x_minus);
    if (gap > axis_tol)
        throw std::invalid_argument("cancellation_norm_check: axis mismatch " +
                                    std::to_string(gap));
    const double na = operator_norm(a), nb = operator_norm(b);
    return {operator_norm(b * a), std::fmax(nb / na, na / nb)};
}

ProjPoint proj_apply(const Mat2& m, ProjPoint x) {
    double vx = std::cos(M_PI * x.x), vy = std::sin(M_PI * x.x);
    m.apply(vx, vy);
    return direction_of(vx, vy);
}

double lift_at_zero(const Mat2& m) {
    return canonical_proj(std::atan2(m.a21, m.a11) / M_PI);
}

LiftPoint lift_apply(const Mat2& m, LiftPoint xt) {
    // Canonical branch: f~(0) = h0 in [0,1). On [0,1) the lift increment over
    // f~(0) is exactly (h(t) - h0) mod 1 because a degree-1 homeomorphism
    // wraps once per unit interval.
    const double fl = std::floor(xt);
    const double t = xt - fl;
    const double h0 = lift_at_zero(m);
    const double ht = proj_apply(m, ProjPoint{t}).x;
    return h0 + canonical_proj(ht - h0) + fl;
}

LiftPoint lift_apply(const Mat2& m, LiftPoint xt, double base_hint) {
    const double canonical = lift_apply(m, xt);
    const double h0 = lift_at_zero(m);
    // Shift whole branches so that f~(0) lands in [base_hint, base_hint + 1).
    return canonical + std::ceil(base_hint - h0);
}

double proj_derivative(const Mat2& m, ProjPoint x) {
    double vx = std::cos(M_PI * x.x), vy = std::sin(M_PI * x.x);
    m.apply(vx, vy);
    return 1.0 / (vx * vx + vy * vy);
}

double averaged_expansion(double norm) {
    if (norm < 1.0) throw std::domain_error("averaged_expansion: norm < 1");
    return std::log(0.5 * (norm + 1.0 / norm));
}

}  // namespace nonstat
