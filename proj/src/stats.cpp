#include "nonstat/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nonstat/parallel.hpp"

namespace nonstat {

namespace {
constexpr std::int64_t kChunk = 64;  // fixed chunking keeps reductions bit-stable
}

std::vector<std::int64_t> dense_n_list(std::int64_t n) {
    std::vector<std::int64_t> out(n);
    for (std::int64_t m = 1; m <= n; ++m) out[m - 1] = m;
    return out;
}

GrowthProfile estimate_L(const EnsembleSpec& spec, std::span<const double> a_points,
                         std::span<const std::int64_t> n_list, std::int64_t samples,
                         std::uint64_t seed_block, std::int64_t m_origin, bool parallel) {
    if (samples < 2) throw std::invalid_argument("estimate_L: need at least 2 samples");
    GrowthProfile prof;
    prof.a_points.assign(a_points.begin(), a_points.end());
    prof.n_list.assign(n_list.begin(), n_list.end());
    prof.m_origin = m_origin;
    prof.samples = samples;

    const std::size_t rows = n_list.size() * a_points.size();
    // Welford accumulators, filled in fixed sample order (chunked parallel
    // compute, sequential merge) so the result is thread-count independent
    // and free of the sum-of-squares cancellation.
    std::vector<double> mean(rows, 0.0), m2(rows, 0.0);
    std::vector<double> buffer(static_cast<std::size_t>(kChunk) * rows);
    const std::int64_t n_max = *std::max_element(n_list.begin(), n_list.end());

    for (std::int64_t chunk_lo = 0; chunk_lo < samples; chunk_lo += kChunk) {
        const std::int64_t chunk_n = std::min(kChunk, samples - chunk_lo);
        run_indexed(static_cast<std::size_t>(chunk_n) * a_points.size(), [&](std::size_t idx) {
            const std::int64_t s = chunk_lo + static_cast<std::int64_t>(idx / a_points.size());
            const std::size_t ai = idx % a_points.size();
            const OmegaStream omega = sample_stream(seed_block, s);
            const double a = a_points[ai];
            ScaledMat acc;
            std::size_t next_record = 0;
            double* out = buffer.data() + (s - chunk_lo) * rows;
            for (std::int64_t m = m_origin + 1; m <= m_origin + n_max; ++m) {
                acc.frame = sample_step(spec, omega, m).proj_mat(a) * acc.frame;
                if (operator_norm(acc.frame) >= 1e100) {
                    const double nrm = operator_norm(acc.frame);
                    const double inv = 1.0 / nrm;
                    acc.frame.a11 *= inv;
                    acc.frame.a12 *= inv;
                    acc.frame.a21 *= inv;
                    acc.frame.a22 *= inv;
                    acc.log_scale += std::log(nrm);
                }
                while (next_record < n_list.size() && n_list[next_record] == m - m_origin) {
                    out[next_record * a_points.size() + ai] = acc.log_norm();
                    ++next_record;
                }
            }
        }, parallel);
        for (std::int64_t s = 0; s < chunk_n; ++s) {
            const double* vals = buffer.data() + static_cast<std::size_t>(s) * rows;
            const double k = static_cast<double>(chunk_lo + s + 1);
            for (std::size_t r = 0; r < rows; ++r) {
                const double delta = vals[r] - mean[r];
                mean[r] += delta / k;
                m2[r] += delta * (vals[r] - mean[r]);
            }
        }
    }

    prof.l_hat.resize(rows);
    prof.stderr_.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const double var = std::fmax(0.0, m2[r] / static_cast<double>(samples - 1));
        prof.l_hat[r] = mean[r];
        prof.stderr_[r] = std::sqrt(var / static_cast<double>(samples));
    }
    return prof;
}

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
    LineFit fit;
    const std::size_t n = xs.size();
    if (n < 2) return fit;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0) return fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (n > 2) {
        double ss_res = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = ys[i] - fit.intercept - fit.slope * xs[i];
            ss_res += r * r;
        }
        fit.slope_se = std::sqrt(ss_res / static_cast<double>(n - 2) / sxx);
    }
    return fit;
}

TailReport ld_tail(const EnsembleSpec& spec, double a, std::span<const std::int64_t> n_list,
                   double eps, std::int64_t samples, std::uint64_t seed_block, bool parallel) {
    if (eps <= 0) throw std::invalid_argument("ld_tail: eps must be positive");
    TailReport rep;
    rep.n_list.assign(n_list.begin(), n_list.end());
    rep.samples = samples;

    const std::size_t cols = n_list.size();
    const std::int64_t n_max = *std::max_element(n_list.begin(), n_list.end());
    std::vector<double> vals(static_cast<std::size_t>(samples) * cols);
    run_indexed(static_cast<std::size_t>(samples), [&](std::size_t s) {
        const OmegaStream omega = sample_stream(seed_block, s);
        ScaledMat acc;
        std::size_t next = 0;
        for (std::int64_t m = 1; m <= n_max; ++m) {
            acc.frame = sample_step(spec, omega, m).proj_mat(a) * acc.frame;
            const double nrm = operator_norm(acc.frame);
            if (nrm >= 1e100) {
                const double inv = 1.0 / nrm;
                acc.frame.a11 *= inv;
                acc.frame.a12 *= inv;
                acc.frame.a21 *= inv;
                acc.frame.a22 *= inv;
                acc.log_scale += std::log(nrm);
            }
            while (next < cols && rep.n_list[next] == m) {
                vals[s * cols + next] = acc.log_norm();
                ++next;
            }
        }
    }, parallel);

    rep.p_hat.resize(cols);
    std::vector<double> fit_x, fit_y;
    for (std::size_t c = 0; c < cols; ++c) {
        double mean = 0;
        for (std::int64_t s = 0; s < samples; ++s) mean += vals[s * cols + c];
        mean /= static_cast<double>(samples);
        std::int64_t exceed = 0;
        const double threshold = eps * static_cast<double>(rep.n_list[c]);
        for (std::int64_t s = 0; s < samples; ++s)
            if (std::abs(vals[s * cols + c] - mean) > threshold) ++exceed;
        rep.p_hat[c] = static_cast<double>(exceed) / static_cast<double>(samples);
        // Below ~5 counts the empirical tail is noise; exclude from the fit.
        if (exceed >= 5) {
            fit_x.push_back(static_cast<double>(rep.n_list[c]));
            fit_y.push_back(std::log(rep.p_hat[c]));
        }
    }
    if (fit_x.size() >= 2) rep.delta_hat = -fit_line(fit_x, fit_y).slope;
    return rep;
}

EquicontinuityReport equicontinuity_modulus(const GrowthProfile& profile) {
    if (profile.a_points.size() < 2)
        throw std::invalid_argument("equicontinuity_modulus: need a grid with >= 2 points");
    EquicontinuityReport rep;
    rep.n_list = profile.n_list;
    rep.modulus.resize(profile.n_list.size());
    std::vector<double> xs(profile.n_list.size());
    for (std::size_t ni = 0; ni < profile.n_list.size(); ++ni) {
        double mod = 0.0;
        for (std::size_t ai = 1; ai < profile.a_points.size(); ++ai)
            mod = std::fmax(mod, std::abs(profile.at(ni, ai) - profile.at(ni, ai - 1)));
        rep.modulus[ni] = mod / static_cast<double>(profile.n_list[ni]);
        xs[ni] = static_cast<double>(profile.n_list[ni]);
    }
    rep.trend = fit_line(xs, rep.modulus);
    rep.flagged = rep.trend.slope > 2.0 * rep.trend.slope_se;
    return rep;
}

AdditivityReport additivity_defect(const EnsembleSpec& spec, double a,
                                   std::span<const AdditivityTriple> triples,
                                   std::int64_t samples, std::uint64_t seed_block,
                                   bool parallel) {
    AdditivityReport rep;
    rep.triples.assign(triples.begin(), triples.end());
    rep.defect.resize(triples.size());
    rep.stderr_.resize(triples.size());
    std::vector<double> vals(static_cast<std::size_t>(samples));
    for (std::size_t t = 0; t < triples.size(); ++t) {
        const auto [m1, m2, m3] = triples[t];
        if (!(0 <= m1 && m1 < m2 && m2 < m3))
            throw std::invalid_argument("additivity_defect: need m1 < m2 < m3");
        run_indexed(static_cast<std::size_t>(samples), [&](std::size_t s) {
            const OmegaStream omega = sample_stream(seed_block, s);
            const ScaledMat t12 = window_product(spec, omega, a, m1, m2);
            const ScaledMat t23 = window_product(spec, omega, a, m2, m3);
            ScaledMat t13;
            t13.frame = t23.frame * t12.frame;
            t13.log_scale = t12.log_scale + t23.log_scale;
            vals[s] = t12.log_norm() + t23.log_norm() - t13.log_norm();
        }, parallel);
        const double mean = pairwise_sum(vals) / static_cast<double>(samples);
        double var = 0;
        for (double v : vals) var += (v - mean) * (v - mean);
        var /= static_cast<double>(samples - 1);
        rep.defect[t] = mean;
        rep.stderr_[t] = std::sqrt(var / static_cast<double>(samples));
    }
    return rep;
}

PsiProfile psi_profile(std::int64_t m_prime, std::span<const double> l_full,
                       std::span<const double> l_window) {
    const std::int64_t n = static_cast<std::int64_t>(l_full.size());
    if (m_prime < 0 || m_prime > n) throw std::invalid_argument("psi_profile: m_prime range");
    if (static_cast<std::int64_t>(l_window.size()) < n - m_prime)
        throw std::invalid_argument("psi_profile: missing window estimates");
    PsiProfile psi;
    psi.m_prime = m_prime;
    psi.values.resize(n);
    const double l_mp = m_prime == 0 ? 0.0 : l_full[m_prime - 1];
    for (std::int64_t m = 1; m <= n; ++m) {
        if (m < m_prime)
            psi.values[m - 1] = l_full[m - 1];
        else
            psi.values[m - 1] = std::abs(l_mp - (m == m_prime ? 0.0 : l_window[m - m_prime - 1]));
    }
    return psi;
}

}  // namespace nonstat
