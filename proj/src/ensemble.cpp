#include "nonstat/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace nonstat {

using nlohmann::json;

PotentialLaw PotentialLaw::bernoulli(double p, double v0, double v1) {
    PotentialLaw law;
    law.kind = Kind::Bernoulli;
    law.p = p;
    law.v0 = v0;
    law.v1 = v1;
    return law;
}

PotentialLaw PotentialLaw::finite_atoms(std::vector<double> values, std::vector<double> weights) {
    PotentialLaw law;
    law.kind = Kind::FiniteAtoms;
    law.values = std::move(values);
    law.weights = std::move(weights);
    return law;
}

PotentialLaw PotentialLaw::uniform(double lo, double hi) {
    PotentialLaw law;
    law.kind = Kind::Uniform;
    law.lo = lo;
    law.hi = hi;
    return law;
}

double PotentialLaw::sample(double u) const {
    switch (kind) {
        case Kind::Bernoulli:
            return u < p ? v1 : v0;
        case Kind::FiniteAtoms: {
            double acc = 0.0;
            for (std::size_t i = 0; i < values.size(); ++i) {
                acc += weights[i];
                if (u < acc) return values[i];
            }
            return values.back();
        }
        case Kind::Uniform:
            return lo + u * (hi - lo);
    }
    return 0.0;
}

double PotentialLaw::support_bound() const {
    switch (kind) {
        case Kind::Bernoulli:
            return std::fmax(std::abs(v0), std::abs(v1));
        case Kind::FiniteAtoms: {
            double k = 0.0;
            for (double v : values) k = std::fmax(k, std::abs(v));
            return k;
        }
        case Kind::Uniform:
            return std::fmax(std::abs(lo), std::abs(hi));
    }
    return 0.0;
}

double PotentialLaw::mean() const {
    switch (kind) {
        case Kind::Bernoulli:
            return (1.0 - p) * v0 + p * v1;
        case Kind::FiniteAtoms: {
            double m = 0.0;
            for (std::size_t i = 0; i < values.size(); ++i) m += weights[i] * values[i];
            return m;
        }
        case Kind::Uniform:
            return 0.5 * (lo + hi);
    }
    return 0.0;
}

double PotentialLaw::variance() const {
    switch (kind) {
        case Kind::Bernoulli: {
            const double d = v1 - v0;
            return p * (1.0 - p) * d * d;
        }
        case Kind::FiniteAtoms: {
            const double m = mean();
            double s = 0.0;
            for (std::size_t i = 0; i < values.size(); ++i)
                s += weights[i] * (values[i] - m) * (values[i] - m);
            return s;
        }
        case Kind::Uniform: {
            const double d = hi - lo;
            return d * d / 12.0;
        }
    }
    return 0.0;
}

void PotentialLaw::validate(double eps_var) const {
    if (kind == Kind::FiniteAtoms) {
        if (values.empty() || values.size() != weights.size())
            throw std::invalid_argument("finite_atoms: values/weights mismatch");
        double s = 0.0;
        for (double w : weights) {
            if (w < 0) throw std::invalid_argument("finite_atoms: negative weight");
            s += w;
        }
        if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("finite_atoms: weights sum != 1");
    }
    if (kind == Kind::Bernoulli && (p < 0 || p > 1))
        throw std::invalid_argument("bernoulli: p outside [0,1]");
    if (kind == Kind::Uniform && !(hi > lo)) throw std::invalid_argument("uniform: hi <= lo");
    if (!(variance() > eps_var)) throw std::invalid_argument("potential law is degenerate");
    if (!std::isfinite(support_bound())) throw std::invalid_argument("unbounded support");
}

bool is_perfect_square(std::int64_t n) {
    if (n < 1) return false;
    const auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(n))));
    for (std::int64_t k = r - 1; k <= r + 1; ++k)
        if (k >= 1 && k * k == n) return true;
    return false;
}

const PotentialLaw& PotentialRule::law_at(std::int64_t n) const {
    if (has_marks && is_perfect_square(n)) return mark_law;
    return base;
}

bool RotationDiagonalSpec::norm100_phase(std::int64_t n) const {
    for (std::int64_t ni : n_list)
        if (n > ni && n <= 2 * ni) return true;
    return false;
}

void EnsembleSpec::validate() const {
    if (!(j_hi > j_lo)) throw std::invalid_argument("parameter interval J is empty");
    if (k < 1) throw std::invalid_argument("group size k must be >= 1");
    if (family == Family::Schrodinger) {
        potential.base.validate();
        if (potential.has_marks) potential.mark_law.validate();
    }
}

EnsembleSpec bernoulli_schrodinger(double lo, double hi) {
    EnsembleSpec spec;
    spec.family = Family::Schrodinger;
    spec.j_lo = lo;
    spec.j_hi = hi;
    spec.k = 2;
    spec.potential.base = PotentialLaw::bernoulli(0.5, 0.0, 1.0);
    return spec;
}

namespace {

json law_to_json(const PotentialLaw& law) {
    switch (law.kind) {
        case PotentialLaw::Kind::Bernoulli:
            return {{"kind", "bernoulli"}, {"p", law.p}, {"v0", law.v0}, {"v1", law.v1}};
        case PotentialLaw::Kind::FiniteAtoms:
            return {{"kind", "finite_atoms"}, {"values", law.values}, {"weights", law.weights}};
        case PotentialLaw::Kind::Uniform:
            return {{"kind", "uniform"}, {"lo", law.lo}, {"hi", law.hi}};
    }
    return {};
}

PotentialLaw law_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "bernoulli")
        return PotentialLaw::bernoulli(j.at("p").get<double>(), j.at("v0").get<double>(),
                                       j.at("v1").get<double>());
    if (kind == "finite_atoms")
        return PotentialLaw::finite_atoms(j.at("values").get<std::vector<double>>(),
                                          j.at("weights").get<std::vector<double>>());
    if (kind == "uniform")
        return PotentialLaw::uniform(j.at("lo").get<double>(), j.at("hi").get<double>());
    throw std::invalid_argument("unknown potential law kind: " + kind);
}

std::string param_mode_name(ParamMode m) {
    switch (m) {
        case ParamMode::None: return "none";
        case ParamMode::All: return "all";
        case ParamMode::First: return "first";
        case ParamMode::Squares: return "squares";
    }
    return "all";
}

ParamMode param_mode_from(const std::string& s) {
    if (s == "none") return ParamMode::None;
    if (s == "all") return ParamMode::All;
    if (s == "first") return ParamMode::First;
    if (s == "squares") return ParamMode::Squares;
    throw std::invalid_argument("unknown param_mode: " + s);
}

}  // namespace

std::string EnsembleSpec::to_json() const {
    json j;
    j["family"] = family == Family::Schrodinger ? "schrodinger" : "rotation_diagonal";
    j["J"] = {j_lo, j_hi};
    j["k"] = k;
    if (family == Family::Schrodinger) {
        json laws;
        laws["base"] = law_to_json(potential.base);
        if (potential.has_marks) laws["squares"] = law_to_json(potential.mark_law);
        j["laws"] = laws;
    } else {
        j["laws"] = {{"n_list", rotation.n_list},
                     {"alpha_random", rotation.alpha_random},
                     {"param_mode", param_mode_name(rotation.param_mode)}};
    }
    return j.dump(2);
}

EnsembleSpec EnsembleSpec::from_json(const std::string& text) {
    const json j = json::parse(text);
    EnsembleSpec spec;
    const std::string fam = j.at("family").get<std::string>();
    if (fam == "schrodinger")
        spec.family = Family::Schrodinger;
    else if (fam == "rotation_diagonal")
        spec.family = Family::RotationDiagonal;
    else
        throw std::invalid_argument("unknown family: " + fam);
    spec.j_lo = j.at("J").at(0).get<double>();
    spec.j_hi = j.at("J").at(1).get<double>();
    spec.k = j.value("k", spec.family == Family::Schrodinger ? 2 : 1);
    const json laws = j.value("laws", json::object());
    if (spec.family == Family::Schrodinger) {
        if (laws.contains("base")) spec.potential.base = law_from_json(laws.at("base"));
        if (laws.contains("squares")) {
            spec.potential.has_marks = true;
            spec.potential.mark_law = law_from_json(laws.at("squares"));
        }
    } else {
        if (laws.contains("n_list"))
            spec.rotation.n_list = laws.at("n_list").get<std::vector<std::int64_t>>();
        spec.rotation.alpha_random = laws.value("alpha_random", true);
        spec.rotation.param_mode = param_mode_from(laws.value("param_mode", std::string("all")));
    }
    spec.validate();
    return spec;
}

Mat2 StepSample::mat(double a) const {
    if (family == Family::Schrodinger) {
        return Mat2{a - potential, -1.0, 1.0, 0.0};
    }
    Mat2 m = diagonal(h_norm) * rotation(alpha);
    if (param_coeff != 0.0) m = rotation(param_coeff * a) * m;
    return m;
}

Mat2 StepSample::dmat_da(double a) const {
    if (family == Family::Schrodinger) {
        return Mat2{1.0, 0.0, 0.0, 0.0};
    }
    if (param_coeff == 0.0) return Mat2{0, 0, 0, 0};
    // d/da R_{ca} = c * R_{ca + pi/2}
    const Mat2 dr = rotation(param_coeff * a + M_PI_2);
    Mat2 r = dr * diagonal(h_norm) * rotation(alpha);
    r.a11 *= param_coeff;
    r.a12 *= param_coeff;
    r.a21 *= param_coeff;
    r.a22 *= param_coeff;
    return r;
}

Mat2 StepSample::proj_mat(double a) const {
    if (family == Family::Schrodinger) return Mat2{a - potential, 1.0, -1.0, 0.0};
    return mat(a);
}

Mat2 StepSample::dproj_mat_da(double a) const {
    if (family == Family::Schrodinger) return Mat2{1.0, 0.0, 0.0, 0.0};
    return dmat_da(a);
}

StepSample sample_step(const EnsembleSpec& spec, const OmegaStream& omega, std::int64_t n) {
    StepSample s;
    s.family = spec.family;
    if (spec.family == Family::Schrodinger) {
        s.potential = spec.potential.law_at(n).sample(omega.uniform(n, 0));
        return s;
    }
    // Projectivization identifies alpha and alpha + pi, so [0, pi) suffices.
    s.alpha = spec.rotation.alpha_random ? M_PI * omega.uniform(n, 0) : 0.0;
    s.h_norm = spec.rotation.norm100_phase(n) ? 100.0 : 2.0;
    switch (spec.rotation.param_mode) {
        case ParamMode::None: s.param_coeff = 0.0; break;
        case ParamMode::All: s.param_coeff = 1.0; break;
        case ParamMode::First: s.param_coeff = n == 1 ? 1.0 : 0.0; break;
        case ParamMode::Squares: s.param_coeff = is_perfect_square(n) ? 1.0 : 0.0; break;
    }
    return s;
}

double sample_potential(const EnsembleSpec& spec, const OmegaStream& omega, std::int64_t n) {
    if (spec.family != Family::Schrodinger)
        throw std::invalid_argument("sample_potential: not a schrodinger ensemble");
    return spec.potential.law_at(n).sample(omega.uniform(n, 0));
}

std::optional<double> expected_step_lognorm(const EnsembleSpec& spec, std::int64_t n) {
    if (spec.family != Family::RotationDiagonal) return std::nullopt;
    if (spec.rotation.param_mode != ParamMode::All || !spec.rotation.alpha_random)
        return std::nullopt;
    return averaged_expansion(spec.rotation.norm100_phase(n) ? 100.0 : 2.0);
}

namespace {

// d(lift)/da of the direction of A(a) v, in projective turns per parameter
// unit. The vector-angle derivative is (w x w')/|w|^2; one turn is pi.
double arg_derivative_lift(const Mat2& m, const Mat2& dm, double vx, double vy) {
    double wx = vx, wy = vy;
    m.apply(wx, wy);
    double dx = vx, dy = vy;
    dm.apply(dx, dy);
    return (wx * dy - wy * dx) / ((wx * wx + wy * wy) * M_PI);
}

}  // namespace

MonotonicityReport check_monotonicity(const EnsembleSpec& spec, const OmegaStream& omega,
                                      int samples, int grid, int k_override) {
    const int k = k_override > 0 ? k_override : spec.k;
    MonotonicityReport rep;
    rep.delta_est = std::numeric_limits<double>::infinity();
    const int dir_grid = 32;
    for (int s = 0; s < samples; ++s) {
        std::vector<StepSample> block(k);
        for (int j = 0; j < k; ++j)
            block[j] = sample_step(spec, omega, static_cast<std::int64_t>(s) * k + j + 1);
        for (int g = 0; g <= grid; ++g) {
            const double a = spec.j_lo + (spec.j_hi - spec.j_lo) * g / std::max(grid, 1);
            // Product and its derivative by the chain rule over the block.
            Mat2 prod;  // identity
            Mat2 dprod{0, 0, 0, 0};
            for (int j = 0; j < k; ++j) {
                const Mat2 mj = block[j].proj_mat(a);
                const Mat2 dmj = block[j].dproj_mat_da(a);
                dprod = mj * dprod;
                Mat2 extra = dmj * prod;
                dprod.a11 += extra.a11;
                dprod.a12 += extra.a12;
                dprod.a21 += extra.a21;
                dprod.a22 += extra.a22;
                prod = mj * prod;
            }
            for (int d = 0; d < dir_grid; ++d) {
                const double phi = M_PI * d / dir_grid;
                double vx = std::cos(phi), vy = std::sin(phi);
                // Snap to the exact axes so stationary directions register.
                if (std::abs(vx) < 1e-15) vx = 0.0;
                if (std::abs(vy) < 1e-15) vy = 0.0;
                const double der = arg_derivative_lift(prod, dprod, vx, vy);
                rep.delta_est = std::fmin(rep.delta_est, der);
                if (der <= 0.0) ++rep.violations;
            }
        }
    }
    return rep;
}

double check_c1_bound(const EnsembleSpec& spec, const OmegaStream& omega, int samples,
                      int grid) {
    double mbar = 0.0;
    for (int s = 0; s < samples; ++s) {
        const StepSample step = sample_step(spec, omega, s + 1);
        for (int g = 0; g <= grid; ++g) {
            const double a = spec.j_lo + (spec.j_hi - spec.j_lo) * g / std::max(grid, 1);
            mbar = std::fmax(mbar, operator_norm(step.mat(a)));
            const Mat2 dm = step.dmat_da(a);
            const double fro = std::sqrt(dm.a11 * dm.a11 + dm.a12 * dm.a12 + dm.a21 * dm.a21 +
                                         dm.a22 * dm.a22);
            mbar = std::fmax(mbar, fro);
        }
    }
    return mbar;
}

Mat2 EnsembleBlocks::block_mat(const OmegaStream& omega, std::int64_t block_index,
                               std::int64_t n, double a) const {
    const std::int64_t first = (block_index - 1) * k + 1;
    const std::int64_t last = std::min<std::int64_t>(block_index * k, n);
    Mat2 prod = sample_step(spec, omega, first).mat(a);
    for (std::int64_t m = first + 1; m <= last; ++m)
        prod = sample_step(spec, omega, m).mat(a) * prod;
    return prod;
}

EnsembleBlocks pair_into_blocks(const EnsembleSpec& spec) {
    return EnsembleBlocks{spec, std::max(spec.k, 1)};
}

}  // namespace nonstat
