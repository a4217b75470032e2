#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nonstat/ensemble.hpp"

using namespace nonstat;

TEST_CASE("step matrices take the transfer form") {
    EnsembleSpec spec = bernoulli_schrodinger();
    StepSample s;
    s.family = Family::Schrodinger;
    s.potential = 0.0;
    Mat2 m = s.mat(0.0);
    CHECK(m.a11 == 0.0);
    CHECK(m.a12 == -1.0);
    CHECK(m.a21 == 1.0);
    CHECK(m.a22 == 0.0);

    s.potential = 1.0;
    m = s.mat(3.0);
    CHECK(m.a11 == 2.0);

    StepSample r;
    r.family = Family::RotationDiagonal;
    r.alpha = 0.0;
    r.h_norm = 2.0;
    r.param_coeff = 1.0;
    m = r.mat(0.0);
    CHECK(m.a11 == doctest::Approx(2.0));
    CHECK(m.a22 == doctest::Approx(0.5));
}

TEST_CASE("replay and common random numbers") {
    const EnsembleSpec spec = bernoulli_schrodinger();
    const OmegaStream w1{987654321}, w2{987654321};
    for (std::int64_t n = -50; n <= 50; ++n) {
        const StepSample a = sample_step(spec, w1, n);
        const StepSample b = sample_step(spec, w2, n);
        CHECK(a.potential == b.potential);
        // The sampled randomness never depends on the parameter.
        CHECK(a.mat(-1.3).a11 - (-1.3) ==
              doctest::Approx(a.mat(2.9).a11 - 2.9).epsilon(1e-14));
    }
    const OmegaStream w3{987654322};
    int diffs = 0;
    for (std::int64_t n = 1; n <= 64; ++n)
        if (sample_step(spec, w1, n).potential != sample_step(spec, w3, n).potential) ++diffs;
    CHECK(diffs > 10);
}

TEST_CASE("potential law moments over many draws") {
    const EnsembleSpec spec = bernoulli_schrodinger();
    const OmegaStream omega{7};
    const std::int64_t draws = 100000;
    double sum = 0, sumsq = 0;
    for (std::int64_t n = 1; n <= draws; ++n) {
        const double v = sample_potential(spec, omega, n);
        CHECK((v == 0.0 || v == 1.0));
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / draws;
    const double var = sumsq / draws - mean * mean;
    // Within 3 standard errors of the Bernoulli(1/2) moments.
    CHECK(std::abs(mean - 0.5) < 3.0 * 0.5 / std::sqrt(double(draws)));
    CHECK(std::abs(var - 0.25) < 0.01);
}

TEST_CASE("law validation rejects degenerate inputs") {
    CHECK_THROWS(PotentialLaw::bernoulli(0.5, 1.0, 1.0).validate());
    CHECK_THROWS(PotentialLaw::uniform(2.0, 1.0).validate());
    CHECK_THROWS(PotentialLaw::finite_atoms({1.0, 2.0}, {0.6, 0.6}).validate());
    CHECK_NOTHROW(PotentialLaw::finite_atoms({0.0, 1.0, 2.0}, {0.2, 0.3, 0.5}).validate());
}

TEST_CASE("monotonicity: single schrodinger steps stall, pairs are strict") {
    EnsembleSpec spec = bernoulli_schrodinger(0.0, 1.0);
    const OmegaStream omega{11};
    const MonotonicityReport single = check_monotonicity(spec, omega, 200, 8, 1);
    CHECK(single.violations > 0);  // direction e1 is stationary for one step

    const MonotonicityReport pairs = check_monotonicity(spec, omega, 500, 8, 2);
    CHECK(pairs.violations == 0);
    CHECK(pairs.delta_est > 0.0);
}

TEST_CASE("monotonicity: rotation family turns at unit speed") {
    EnsembleSpec spec;
    spec.family = Family::RotationDiagonal;
    spec.j_lo = 0.0;
    spec.j_hi = 2.0 * M_PI;
    spec.k = 1;
    const OmegaStream omega{3};
    const MonotonicityReport rep = check_monotonicity(spec, omega, 100, 8, 1);
    CHECK(rep.violations == 0);
    CHECK(rep.delta_est == doctest::Approx(1.0 / M_PI).epsilon(1e-6));
}

TEST_CASE("C1 bounds") {
    EnsembleSpec schro = bernoulli_schrodinger(-3.0, 3.0);
    const OmegaStream omega{5};
    CHECK(check_c1_bound(schro, omega, 200) <= 5.0);

    EnsembleSpec rot;
    rot.family = Family::RotationDiagonal;
    rot.j_lo = 0;
    rot.j_hi = 2 * M_PI;
    // |A(a)| = 2 exactly (rotations preserve the norm); the derivative's
    // Frobenius norm sqrt(h^2 + 1/h^2) is what tops the C1 bound.
    CHECK(operator_norm(sample_step(rot, omega, 1).mat(0.7)) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(check_c1_bound(rot, omega, 50) == doctest::Approx(std::sqrt(4.25)).epsilon(1e-9));

    rot.rotation.n_list = {1};  // norm-100 phase covers n = 2
    EnsembleSpec rot100 = rot;
    StepSample s = sample_step(rot100, omega, 2);
    CHECK(operator_norm(s.mat(0.3)) == doctest::Approx(100.0).epsilon(1e-9));
}

TEST_CASE("blocks compose to the same product") {
    const EnsembleSpec spec = bernoulli_schrodinger();
    const OmegaStream omega{21};
    const double a = 0.7;

    auto direct = [&](std::int64_t n) {
        Mat2 acc;
        for (std::int64_t m = 1; m <= n; ++m) acc = sample_step(spec, omega, m).mat(a) * acc;
        return acc;
    };

    for (int k : {1, 2, 3}) {
        EnsembleSpec s2 = spec;
        s2.k = k;
        const EnsembleBlocks blocks = pair_into_blocks(s2);
        for (std::int64_t n : {4, 7}) {
            Mat2 acc;
            for (std::int64_t b = 1; b <= blocks.block_count(n); ++b)
                acc = blocks.block_mat(omega, b, n, a) * acc;
            const Mat2 ref = direct(n);
            CHECK(acc.a11 == doctest::Approx(ref.a11).epsilon(1e-10));
            CHECK(acc.a12 == doctest::Approx(ref.a12).epsilon(1e-10));
            CHECK(acc.a21 == doctest::Approx(ref.a21).epsilon(1e-10));
            CHECK(acc.a22 == doctest::Approx(ref.a22).epsilon(1e-10));
        }
    }
}

TEST_CASE("json round trip") {
    EnsembleSpec spec = bernoulli_schrodinger(-3, 4);
    spec.potential.has_marks = true;
    spec.potential.mark_law = PotentialLaw::bernoulli(0.5, 0.0, 100.0);
    const EnsembleSpec back = EnsembleSpec::from_json(spec.to_json());
    CHECK(back.family == Family::Schrodinger);
    CHECK(back.j_lo == spec.j_lo);
    CHECK(back.k == 2);
    CHECK(back.potential.has_marks);
    CHECK(back.potential.mark_law.v1 == 100.0);

    EnsembleSpec rot;
    rot.family = Family::RotationDiagonal;
    rot.j_lo = 0;
    rot.j_hi = 2 * M_PI;
    rot.k = 1;
    rot.rotation.n_list = {200, 1600};
    const EnsembleSpec rback = EnsembleSpec::from_json(rot.to_json());
    CHECK(rback.rotation.n_list.size() == 2);
    CHECK(rback.rotation.norm100_phase(300));
    CHECK(!rback.rotation.norm100_phase(200));
    CHECK(!rback.rotation.norm100_phase(401));

    CHECK_THROWS(EnsembleSpec::from_json("{\"family\":\"nope\",\"J\":[0,1]}"));
}

TEST_CASE("marked rule places the special law exactly on squares") {
    EnsembleSpec spec = bernoulli_schrodinger();
    spec.potential.has_marks = true;
    spec.potential.mark_law = PotentialLaw::bernoulli(0.5, 0.0, 100.0);
    const OmegaStream omega{13};
    for (std::int64_t n = 1; n <= 200; ++n) {
        const double v = sample_potential(spec, omega, n);
        if (is_perfect_square(n))
            CHECK((v == 0.0 || v == 100.0));
        else
            CHECK((v == 0.0 || v == 1.0));
    }
}
