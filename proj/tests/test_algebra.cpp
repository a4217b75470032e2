#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "nonstat/algebra.hpp"
#include "nonstat/rng.hpp"

using namespace nonstat;

namespace {

// Random unimodular matrix R_phi diag(l, 1/l) R_psi with bounded stretch so
// that long products stay in double range.
Mat2 random_unimodular(OmegaStream& rng, std::int64_t i, double max_log_stretch = 0.5) {
    const double phi = M_PI * rng.uniform(i, 1);
    const double psi = M_PI * rng.uniform(i, 2);
    const double l = std::exp(max_log_stretch * rng.uniform(i, 3));
    return rotation(phi) * diagonal(l) * rotation(psi);
}

}  // namespace

TEST_CASE("mat_product basics") {
    const Mat2 I;
    std::vector<Mat2> ids{I, I, I};
    const Mat2 p = mat_product(ids);
    CHECK(p.a11 == doctest::Approx(1.0));
    CHECK(p.a12 == doctest::Approx(0.0));

    std::vector<Mat2> diags{diagonal(2.0), diagonal(2.0)};
    const Mat2 d = mat_product(diags);
    CHECK(d.a11 == doctest::Approx(4.0));
    CHECK(d.a22 == doctest::Approx(0.25));

    // Hand multiplication: rot(pi/2) * [[1,1],[0,1]] = [[0,-1],[1,1]].
    std::vector<Mat2> rs{rotation(M_PI_2), Mat2{1, 1, 0, 1}};
    const Mat2 m = mat_product(rs);
    CHECK(m.a11 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(m.a12 == doctest::Approx(-1.0));
    CHECK(m.a21 == doctest::Approx(1.0));
    CHECK(m.a22 == doctest::Approx(1.0));

    CHECK_THROWS_AS(mat_product({}), std::invalid_argument);
}

TEST_CASE("operator_norm closed forms") {
    CHECK(operator_norm(Mat2{}) == doctest::Approx(1.0));
    CHECK(operator_norm(diagonal(2.0)) == doctest::Approx(2.0));
    // Eigenvalues of M^T M for [[1,-1],[1,0]] give the golden ratio.
    CHECK(operator_norm(Mat2{1, -1, 1, 0}) == doctest::Approx(0.5 * (1.0 + std::sqrt(5.0))));
}

TEST_CASE("polar axes of diagonal and rotated matrices") {
    auto ax = polar_axes(diagonal(2.0));
    CHECK(ax.x_minus.x == doctest::Approx(0.5));
    CHECK(ax.x_plus.x == doctest::Approx(0.0).epsilon(1e-12));

    ax = polar_axes(diagonal(0.5));
    CHECK(proj_distance(ax.x_minus, ProjPoint{0.0}) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(ax.x_plus.x == doctest::Approx(0.5));

    const double theta = 0.37;
    ax = polar_axes(rotation(theta) * diagonal(3.0));
    CHECK(ax.x_minus.x == doctest::Approx(0.5));
    CHECK(ax.x_plus.x == doctest::Approx(theta / M_PI));

    CHECK_THROWS_AS(polar_axes(rotation(1.0)), std::domain_error);
}

TEST_CASE("cancellation identity") {
    // diag(1/2,2) has x+ = e2 direction; diag(3,1/3) has x- = e2 direction.
    auto [lhs, rhs] = cancellation_norm_check(diagonal(0.5), diagonal(3.0));
    CHECK(lhs == doctest::Approx(1.5));
    CHECK(rhs == doctest::Approx(1.5));

    auto [l2, r2] = cancellation_norm_check(diagonal(2.0), diagonal(0.5));
    CHECK(l2 == doctest::Approx(1.0));
    CHECK(r2 == doctest::Approx(1.0));

    auto [l3, r3] = cancellation_norm_check(diagonal(0.5), rotation(M_PI_4) * diagonal(5.0));
    CHECK(l3 == doctest::Approx(2.5));
    CHECK(r3 == doctest::Approx(2.5));

    CHECK_THROWS_AS(cancellation_norm_check(diagonal(2.0), diagonal(3.0)),
                    std::invalid_argument);
}

TEST_CASE("projective action and lifts") {
    CHECK(proj_apply(Mat2{}, ProjPoint{0.3}).x == doctest::Approx(0.3));
    CHECK(proj_apply(rotation(M_PI_2), ProjPoint{0.0}).x == doctest::Approx(0.5));
    CHECK(proj_apply(diagonal(2.0), ProjPoint{0.25}).x ==
          doctest::Approx(std::atan2(0.5, 2.0) / M_PI));

    CHECK(lift_apply(Mat2{}, 1.7) == doctest::Approx(1.7));
    CHECK(lift_apply(rotation(M_PI_2), 0.9) == doctest::Approx(1.4));
    CHECK(lift_apply(diagonal(2.0), 0.0) == doctest::Approx(0.0));

    // base_hint picks the branch with f~(0) in [hint, hint+1).
    CHECK(lift_apply(rotation(M_PI_2), 0.9, 2.0) == doctest::Approx(3.4));
    CHECK(lift_apply(rotation(M_PI_2), 0.9, -3.0) == doctest::Approx(-1.6));
}

TEST_CASE("projective derivative") {
    CHECK(proj_derivative(Mat2{}, ProjPoint{0.123}) == doctest::Approx(1.0));
    CHECK(proj_derivative(diagonal(2.0), ProjPoint{0.0}) == doctest::Approx(0.25));
    CHECK(proj_derivative(diagonal(2.0), ProjPoint{0.5}) == doctest::Approx(4.0));
}

TEST_CASE("averaged expansion rate") {
    CHECK(averaged_expansion(1.0) == doctest::Approx(0.0));
    CHECK(averaged_expansion(2.0) == doctest::Approx(std::log(1.25)));
    CHECK(averaged_expansion(100.0) == doctest::Approx(std::log(50.005)));
    CHECK_THROWS_AS(averaged_expansion(0.5), std::domain_error);
}

TEST_CASE("determinant stays pinned along long products") {
    OmegaStream rng{12345};
    Mat2 acc;
    for (std::int64_t i = 0; i < 10000; ++i) {
        acc = acc * random_unimodular(rng, i, 0.01);
        CHECK(std::abs(acc.det() - 1.0) <= 1e-9);
    }
}

TEST_CASE("lift properties on random matrices and points") {
    OmegaStream rng{777};
    for (std::int64_t i = 0; i < 2000; ++i) {
        const Mat2 m = random_unimodular(rng, i);
        const double xt = 20.0 * rng.uniform(i, 7) - 10.0;

        // Lift projects onto the projective image.
        const double lifted = lift_apply(m, xt);
        const double projected = proj_apply(m, ProjPoint{canonical_proj(xt)}).x;
        CHECK(proj_distance(ProjPoint{canonical_proj(lifted)}, ProjPoint{projected}) < 1e-9);

        // Translation equivariance and monotonicity.
        CHECK(lift_apply(m, xt + 1.0) == doctest::Approx(lifted + 1.0).epsilon(1e-12));
        const double step = 1e-4 + rng.uniform(i, 8);
        CHECK(lift_apply(m, xt + step) > lifted);

        // Derivative reciprocity f'(x) * (f^-1)'(f(x)) = 1.
        const ProjPoint x{canonical_proj(xt)};
        const ProjPoint fx = proj_apply(m, x);
        const double rec = proj_derivative(m, x) * proj_derivative(m.inverse(), fx);
        CHECK(rec == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("image stays near the expanding axis") {
    // dist(f_A(x), x+(A)) <= (pi/2) (|v|/|Av|)/|A|, converted to projective
    // units (divided by pi).
    OmegaStream rng{31337};
    for (std::int64_t i = 0; i < 10000; ++i) {
        const Mat2 m = random_unimodular(rng, i, 3.0);
        if (operator_norm(m) <= 1.0 + 1e-6) continue;
        const ProjPoint x{rng.uniform(i, 9)};
        const double ratio = std::sqrt(proj_derivative(m, x));  // |v|/|Mv|
        const double bound = 0.5 * ratio / operator_norm(m);
        const double dist = proj_distance(proj_apply(m, x), polar_axes(m).x_plus);
        CHECK(dist <= bound + 1e-12);
    }
}
