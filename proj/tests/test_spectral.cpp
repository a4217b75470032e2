#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nonstat/spectral.hpp"

using namespace nonstat;

namespace {

TridiagOperator free_laplacian(std::int64_t n) {
    TridiagOperator op;
    op.diag.assign(n, 0.0);
    return op;
}

EnsembleSpec zero_potential_spec() {
    EnsembleSpec spec = bernoulli_schrodinger(-4, 4);
    spec.potential.base = PotentialLaw::finite_atoms({0.0, 1e-12}, {0.5, 0.5});
    return spec;
}

}  // namespace

TEST_CASE("operator construction shares the cocycle stream") {
    const EnsembleSpec spec = bernoulli_schrodinger();
    const OmegaStream omega{99};
    const TridiagOperator op = build_operator(spec, omega, 1, 50);
    for (std::int64_t i = 0; i < 50; ++i)
        CHECK(op.diag[i] == sample_potential(spec, omega, 1 + i));
}

TEST_CASE("free laplacian eigenvalues match the closed form") {
    const std::int64_t n = 100;
    const auto pairs = eigensolve(free_laplacian(n));
    REQUIRE(pairs.size() == static_cast<std::size_t>(n));
    for (std::int64_t k = 1; k <= n; ++k) {
        const double expected = 2.0 * std::cos(M_PI * (n + 1 - k) / (n + 1));
        CHECK(std::abs(pairs[k - 1].e - expected) < 1e-10);
    }
    // Eigenvectors: unit norm, orthogonal, small residual.
    double dot = 0;
    for (std::int64_t i = 0; i < n; ++i) dot += pairs[0].phi[i] * pairs[1].phi[i];
    CHECK(std::abs(dot) < 1e-8);
}

TEST_CASE("one-site operator") {
    TridiagOperator op;
    op.diag = {7.0};
    const auto pairs = eigensolve(op);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].e == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(std::abs(pairs[0].phi[0]) == doctest::Approx(1.0));
}

TEST_CASE("single impurity bound state") {
    const std::int64_t n = 801;
    TridiagOperator op = free_laplacian(n);
    op.diag[n / 2] = 100.0;
    const auto pairs = eigensolve_range(op, 98.0, 102.0);
    REQUIRE(pairs.size() == 1);
    CHECK(std::abs(pairs[0].e - std::sqrt(100.0 * 100.0 + 4.0)) < 1e-6);
    CHECK(pairs[0].center == n / 2);
}

TEST_CASE("sturm counts are exact eigenvalue counters") {
    const EnsembleSpec spec = bernoulli_schrodinger();
    const OmegaStream omega{5};
    const TridiagOperator op = build_operator(spec, omega, 1, 120);
    const auto pairs = eigensolve(op);
    for (double e : {-1.5, 0.0, 0.5, 1.2, 2.9}) {
        std::int64_t below = 0;
        for (const auto& p : pairs)
            if (p.e < e) ++below;
        CHECK(sturm_count(op, e) == below);
    }
}

TEST_CASE("trace identity and completeness") {
    const EnsembleSpec spec = bernoulli_schrodinger();
    const OmegaStream omega{31};
    const std::int64_t n = 80;
    const TridiagOperator op = build_operator(spec, omega, 1, n);
    const auto pairs = eigensolve(op);
    double e_sum = 0, v_sum = 0;
    for (const auto& p : pairs) e_sum += p.e;
    for (double v : op.diag) v_sum += v;
    CHECK(e_sum == doctest::Approx(v_sum).epsilon(1e-8));

    for (std::int64_t q : {0L, 13L, 40L}) {
        for (std::int64_t m : {0L, 13L, 71L}) {
            double s = 0;
            for (const auto& p : pairs) s += p.phi[q] * p.phi[m];
            CHECK(s == doctest::Approx(q == m ? 1.0 : 0.0).epsilon(1e-8));
        }
    }
}

TEST_CASE("sule fit limits") {
    // Delta eigenfunctions: n = 1 blocks decouple; alpha is capped.
    TridiagOperator op;
    op.diag = {5.0};
    const auto single = eigensolve(op);
    const SuleFit capped = sule_fit(single, 0.05);
    CHECK(capped.alpha_hat == doctest::Approx(50.0));

    // Extended states: the free Laplacian admits no positive decay rate.
    const auto flat = eigensolve(free_laplacian(600));
    const SuleFit fit = sule_fit(flat, 0.05);
    CHECK(fit.alpha_hat < 0.01);
    for (double r : fit.residuals) CHECK(r <= 1e-12);
}

TEST_CASE("correlator dominates the evolution amplitude") {
    const EnsembleSpec spec = bernoulli_schrodinger();
    const OmegaStream omega{41};
    const TridiagOperator op = build_operator(spec, omega, 1, 120);
    const auto pairs = eigensolve(op);
    const auto t_grid = default_t_grid();
    CHECK(t_grid.size() == 64);

    for (std::int64_t q : {10L, 60L}) {
        for (std::int64_t m : {10L, 61L, 90L}) {
            const double qv = eigenfunction_correlator(pairs, q, m);
            CHECK(time_evolution_probe(pairs, q, m, t_grid) <= qv + 1e-12);
            if (q == m) CHECK(qv >= 1.0 - 1e-10);
        }
    }
    // t = 0 checks: identity evolution.
    const double zero = 0.0;
    CHECK(time_evolution_probe(pairs, 5, 5, std::span<const double>(&zero, 1)) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(time_evolution_probe(pairs, 5, 9, std::span<const double>(&zero, 1)) ==
          doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("free laplacian correlator does not decay") {
    const std::int64_t n = 100;
    const auto pairs = eigensolve(free_laplacian(n));
    // Closed-form eigenvectors phi_k(m) = sqrt(2/(n+1)) sin(k m pi / (n+1)).
    double q_direct = 0;
    const std::int64_t q = 25, m = 75;
    for (std::int64_t k = 1; k <= n; ++k) {
        const double c = std::sqrt(2.0 / (n + 1));
        q_direct += std::abs(c * std::sin(M_PI * k * (q + 1.0) / (n + 1))) *
                    std::abs(c * std::sin(M_PI * k * (m + 1.0) / (n + 1)));
    }
    CHECK(eigenfunction_correlator(pairs, q, m) == doctest::Approx(q_direct).epsilon(1e-6));
    CHECK(q_direct > 0.1);  // no exponential decay for plane waves
}

TEST_CASE("shnol shooting shapes") {
    const EnsembleSpec zero = zero_potential_spec();
    const OmegaStream omega{3};

    const ShnolResult grow = shnol_shooting(zero, omega, 3.0, 200);
    CHECK(grow.shape == ShnolShape::Line);
    CHECK(grow.decay_rate_forward ==
          doctest::Approx(std::log(0.5 * (3.0 + std::sqrt(5.0)))).epsilon(0.02));

    const ShnolResult flat = shnol_shooting(zero, omega, 0.0, 200);
    CHECK(flat.shape == ShnolShape::Flat);
    CHECK(std::abs(flat.decay_rate_forward) < 0.02);
}

TEST_CASE("shooting at an eigenvalue crests at the localization center") {
    const EnsembleSpec spec = bernoulli_schrodinger();
    const OmegaStream omega{1234};
    const std::int64_t n = 400;
    const TridiagOperator op = build_operator(spec, omega, 1, n);
    const auto pairs = eigensolve_range(op, 0.4, 0.6);
    REQUIRE(!pairs.empty());
    // Pick the eigenpair with the most interior center.
    const EigenPair* best = &pairs[0];
    for (const auto& p : pairs)
        if (std::abs(p.center - n / 2) < std::abs(best->center - n / 2)) best = &p;
    // The shooting solution reproduces the eigenfunction, so the log profile
    // has an interior crest where the eigenfunction localizes.
    const ShnolResult res = shnol_shooting(spec, omega, best->e, n);
    CHECK(res.shape == ShnolShape::Peak);
    CHECK(std::abs(res.peak_index - best->center) <= 10);
}

TEST_CASE("essential probe verdicts") {
    const EnsembleSpec spec = bernoulli_schrodinger(-4, 5);
    const OmegaStream omega{55};
    const std::vector<double> e_grid = {-3.5, -3.0, 0.0, 0.5, 3.5, 4.5};
    const std::vector<std::int64_t> n_list = {100, 200, 400};
    const auto verdicts = essential_set_probe(spec, omega, e_grid, n_list);
    REQUIRE(verdicts.size() == 5);
    CHECK(!verdicts[0].growing);  // [-3.5, -3] holds no spectrum
    CHECK(verdicts[2].growing);   // [0, 0.5] sits inside [-2, 3]
    CHECK(!verdicts[4].growing);  // [3.5, 4.5] above the essential set
    CHECK(verdicts[0].r_values.back() < 1.0);
}
