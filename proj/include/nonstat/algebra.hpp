#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace nonstat {

// Real 2x2 unimodular matrix, the basic cocycle step. Products renormalize
// the determinant (divide by sqrt(det)) once drift exceeds 1e-12; dividing by
// a positive scalar does not change the projective action.
struct Mat2 {
    double a11 = 1, a12 = 0, a21 = 0, a22 = 1;

    double det() const { return a11 * a22 - a12 * a21; }
    double trace() const { return a11 + a22; }
    Mat2 transpose() const { return {a11, a21, a12, a22}; }
    // Unimodular inverse.
    Mat2 inverse() const { return {a22, -a12, -a21, a11}; }

    void apply(double& x, double& y) const {
        const double nx = a11 * x + a12 * y;
        const double ny = a21 * x + a22 * y;
        x = nx;
        y = ny;
    }

    Mat2& renormalize_det();

    friend Mat2 operator*(const Mat2& a, const Mat2& b) {
        Mat2 r{a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
               a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
        r.renormalize_det();
        return r;
    }
};

Mat2 rotation(double theta);
inline Mat2 diagonal(double lambda) { return {lambda, 0, 0, 1.0 / lambda}; }

// Projective coordinate on the circle of directions: x in [0,1) stands for
// the line through (cos pi*x, sin pi*x). One full projective turn = +1, so a
// vector half-turn already closes the circle.
struct ProjPoint {
    double x = 0;
};

using LiftPoint = double;

double canonical_proj(double x);                    // representative in [0,1)
ProjPoint direction_of(double vx, double vy);       // projectivize a vector
double proj_distance(ProjPoint a, ProjPoint b);     // metric on R/Z

// Ordered product, leftmost entry outermost (rightmost applied first to
// vectors). Throws std::invalid_argument on an empty list.
Mat2 mat_product(std::span<const Mat2> ms);

// Largest singular value; >= 1 for unimodular input.
double operator_norm(const Mat2& m);

struct PolarAxes {
    ProjPoint x_minus;  // most contracted input direction (largest f' point)
    ProjPoint x_plus;   // image of the most expanded input direction
};

// Closed-form singular directions from the eigenvectors of M^T M. Requires
// operator_norm(m) > 1 + 1e-8; below that the axes are meaningless.
PolarAxes polar_axes(const Mat2& m);

// Lemma-style check: with x_plus(a) == x_minus(b), returns
// (|BA|, max(|B|/|A|, |A|/|B|)). Throws if the axes differ by more than tol.
std::pair<double, double> cancellation_norm_check(const Mat2& a, const Mat2& b,
                                                  double axis_tol = 1e-9);

ProjPoint proj_apply(const Mat2& m, ProjPoint x);

// Monotone degree-1 lift of the projective action. The canonical branch has
// f~(0) in [0,1); when base_hint is supplied, the branch with
// f~(0) in [base_hint, base_hint + 1) is used instead (parameter-continuous
// tracking passes hint = c - 1/2 to center a known branch value c).
LiftPoint lift_apply(const Mat2& m, LiftPoint xt);
LiftPoint lift_apply(const Mat2& m, LiftPoint xt, double base_hint);

// Value f~(0) of the canonical branch, in [0,1).
double lift_at_zero(const Mat2& m);

// Derivative of the projective action: |v|^2 / |Mv|^2 for v in direction x.
double proj_derivative(const Mat2& m, ProjPoint x);

// log((s + 1/s)/2) for s = norm >= 1; the rotation-averaged log stretch.
// Satisfies log s - log 2 <= N <= log s.
double averaged_expansion(double norm);

}  // namespace nonstat
