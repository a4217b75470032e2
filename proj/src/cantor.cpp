#include "nonstat/cantor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nonstat {

namespace {

Mat2 transfer(double e, double v) { return Mat2{e - v, -1.0, 1.0, 0.0}; }

// Projective coordinate of the eigendirection (lambda, 1).
double eigdir_coord(double lambda) { return canonical_proj(std::atan2(1.0, lambda) / M_PI); }

CantorIFS make_side(double e, const Mat2& m0, const Mat2& m1, double fix_a, double fix_b) {
    CantorIFS ifs;
    ifs.e = e;
    ifs.map0 = m0;
    ifs.map1 = m1;
    const double lo = std::fmin(fix_a, fix_b), hi = std::fmax(fix_a, fix_b);
    const double pad = 2.0 * (hi - lo) + 1e-9;
    ifs.trap_lo = lo - pad;
    ifs.trap_hi = hi + pad;

    // Trap validation: both maps send the trap strictly inside and contract.
    for (const Mat2* m : {&m0, &m1}) {
        for (int s = 0; s <= 8; ++s) {
            const double x = ifs.trap_lo + (ifs.trap_hi - ifs.trap_lo) * s / 8.0;
            const double der = proj_derivative(*m, ProjPoint{canonical_proj(x)});
            ifs.max_derivative = std::fmax(ifs.max_derivative, der);
        }
        const double i_lo = lift_apply(*m, ifs.trap_lo);
        const double i_hi = lift_apply(*m, ifs.trap_hi);
        // Compare in a common branch: shift the image next to the trap.
        const double shift = std::round(0.5 * (i_lo + i_hi) - 0.5 * (ifs.trap_lo + ifs.trap_hi));
        if (!(i_lo - shift > ifs.trap_lo && i_hi - shift < ifs.trap_hi))
            throw std::domain_error("cantor trap validation failed: image escapes");
    }
    if (!(ifs.max_derivative < 1.0))
        throw std::domain_error("cantor trap validation failed: not a contraction");
    return ifs;
}

}  // namespace

CantorPair build_cantor_pair(double e) {
    if (e < 98.0 || e > 102.0)
        throw std::domain_error("build_cantor_pair: E outside [98, 102]");
    CantorPair pair;
    // Attracting directions (lambda, 1) of the two hyperbolic transfer steps.
    const double l0 = 0.5 * ((e - 0.0) + std::sqrt((e - 0.0) * (e - 0.0) - 4.0));
    const double l1 = 0.5 * ((e - 1.0) + std::sqrt((e - 1.0) * (e - 1.0) - 4.0));
    pair.k_side =
        make_side(e, transfer(e, 0.0), transfer(e, 1.0), eigdir_coord(l0), eigdir_coord(l1));
    // Inverse maps attract to the repelling directions (1/lambda, 1).
    pair.c_side = make_side(e, transfer(e, 0.0).inverse(), transfer(e, 1.0).inverse(),
                            eigdir_coord(1.0 / l0), eigdir_coord(1.0 / l1));
    return pair;
}

std::vector<CoverInterval> cover(const CantorIFS& ifs, int depth) {
    if (depth < 0 || depth > 40) throw std::invalid_argument("cover: depth out of range");
    std::vector<CoverInterval> level{{ifs.trap_lo, ifs.trap_hi}};
    for (int d = 0; d < depth; ++d) {
        std::vector<CoverInterval> next;
        next.reserve(level.size() * 2);
        for (const auto& box : level) {
            for (const Mat2* m : {&ifs.map0, &ifs.map1}) {
                double lo = lift_apply(*m, box.lo);
                double hi = lift_apply(*m, box.hi);
                // Keep every box in the trap's branch window.
                const double shift =
                    std::round(0.5 * (lo + hi) - 0.5 * (ifs.trap_lo + ifs.trap_hi));
                lo -= shift;
                hi -= shift;
                // Outward rounding by a few ulps of the coordinate keeps the
                // cover an honest superset without swamping the true widths.
                const double pad =
                    4.0 * 2.220446049250313e-16 * std::fmax(std::abs(lo), std::abs(hi));
                next.push_back({lo - pad, hi + pad});
            }
        }
        level.swap(next);
    }
    return level;
}

bool cover_disjoint(std::span<const CoverInterval> boxes) {
    std::vector<CoverInterval> sorted(boxes.begin(), boxes.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const CoverInterval& a, const CoverInterval& b) { return a.lo < b.lo; });
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i].lo < sorted[i - 1].hi) return false;
    return true;
}

double box_dimension_estimate(const CantorIFS& ifs, int depth) {
    // Per-level cover totals; levels whose boxes have collapsed onto the
    // outward-rounding floor carry no contraction information and are
    // excluded from the mean.
    std::vector<double> totals(depth + 1);
    for (int d = 0; d <= depth; ++d) {
        double t = 0.0;
        for (const auto& b : cover(ifs, d)) t += b.length();
        totals[d] = t;
    }
    const double floor_scale =
        64.0 * 2.220446049250313e-16 * std::fmax(std::abs(ifs.trap_lo), std::abs(ifs.trap_hi));
    double mean = 0.0;
    int used = 0;
    for (int d = 1; d <= depth; ++d) {
        if (totals[d] < floor_scale * std::pow(2.0, d)) break;
        mean += std::log(totals[d - 1] / totals[d]) + std::log(2.0);
        ++used;
    }
    if (used == 0) {
        mean = std::log(totals[0] / totals[1]) + std::log(2.0);
        used = 1;
    }
    // totals shrink by (mean per-branch contraction)/2 per level; the box
    // count doubles, so dim = log 2 / (mean log single-branch contraction).
    return std::log(2.0) / (mean / used);
}

namespace {

struct BoxSet {
    std::vector<CoverInterval> boxes;
    std::vector<double> mids;  // canonical midpoints, for motion diagnostics
};

// K-cover boxes pushed through the impurity step at this energy.
BoxSet k_images(double e, int depth) {
    const CantorPair pair = build_cantor_pair(e);
    const Mat2 impurity = Mat2{e - 100.0, -1.0, 1.0, 0.0};
    BoxSet out;
    const auto raw = cover(pair.k_side, depth);
    out.boxes.reserve(raw.size());
    for (const auto& b : raw) {
        const double lo = lift_apply(impurity, b.lo);
        const double hi = lift_apply(impurity, b.hi);
        out.boxes.push_back({lo, hi});
        out.mids.push_back(canonical_proj(0.5 * (lo + hi)));
    }
    return out;
}

BoxSet c_boxes(double e, int depth) {
    const CantorPair pair = build_cantor_pair(e);
    BoxSet out;
    out.boxes = cover(pair.c_side, depth);
    for (const auto& b : out.boxes) out.mids.push_back(canonical_proj(0.5 * (b.lo + b.hi)));
    return out;
}

double circle_diff(double a, double b) {  // signed, in (-1/2, 1/2]
    return canonical_proj(a - b + 0.5) - 0.5;
}

bool families_overlap(const std::vector<double>& mid_a, const std::vector<double>& half_a,
                      const std::vector<double>& mid_b, const std::vector<double>& half_b) {
    for (std::size_t i = 0; i < mid_a.size(); ++i)
        for (std::size_t j = 0; j < mid_b.size(); ++j)
            if (std::abs(circle_diff(mid_a[i], mid_b[j])) <= half_a[i] + half_b[j]) return true;
    return false;
}

}  // namespace

IntersectionResult intersection_parameters(double e_lo, double e_hi, int cover_depth,
                                           int levels, std::int64_t cell_budget) {
    IntersectionResult res;
    struct Cell {
        double lo, hi;
    };
    std::vector<Cell> current{{e_lo, e_hi}};
    std::int64_t evaluated = 0;
    double k_sign_acc = 0.0, c_sign_acc = 0.0;

    for (int level = 0; level < levels; ++level) {
        std::vector<Cell> survivors;
        for (const auto& cell : current) {
            if (++evaluated > cell_budget) {
                res.budget_exhausted = true;
                break;
            }
            const BoxSet k1 = k_images(cell.lo, cover_depth);
            const BoxSet k2 = k_images(cell.hi, cover_depth);
            const BoxSet c1 = c_boxes(cell.lo, cover_depth);
            const BoxSet c2 = c_boxes(cell.hi, cover_depth);

            // Hull each symbolic box over the cell's endpoints. The
            // shortest-path arc is only the true sweep once the motion is
            // well under half a turn; coarser cells survive automatically
            // and get resolved by the subdivision.
            const std::size_t nk = k1.boxes.size(), nc = c1.boxes.size();
            std::vector<double> k_mid(nk), k_half(nk), c_mid(nc), c_half(nc);
            bool unresolved = false;
            for (std::size_t i = 0; i < nk; ++i) {
                const double move = circle_diff(k2.mids[i], k1.mids[i]);
                if (std::abs(move) > 0.25) unresolved = true;
                k_sign_acc += move;
                k_mid[i] = canonical_proj(k1.mids[i] + 0.5 * move);
                k_half[i] = 0.5 * std::abs(move) +
                            0.5 * std::fmax(k1.boxes[i].length(), k2.boxes[i].length());
            }
            for (std::size_t j = 0; j < nc; ++j) {
                const double move = circle_diff(c2.mids[j], c1.mids[j]);
                if (std::abs(move) > 0.25) unresolved = true;
                c_sign_acc += move;
                c_mid[j] = canonical_proj(c1.mids[j] + 0.5 * move);
                c_half[j] = 0.5 * std::abs(move) +
                            0.5 * std::fmax(c1.boxes[j].length(), c2.boxes[j].length());
            }
            if (unresolved || families_overlap(k_mid, k_half, c_mid, c_half))
                survivors.push_back(cell);
        }
        if (res.budget_exhausted) break;

        res.level_counts.push_back(static_cast<std::int64_t>(survivors.size()));
        res.level_widths.push_back(survivors.empty() ? 0.0 : survivors[0].hi - survivors[0].lo);
        if (survivors.empty() || level == levels - 1) {
            current.swap(survivors);
            break;
        }
        std::vector<Cell> next;
        next.reserve(survivors.size() * 2);
        for (const auto& c : survivors) {
            const double mid = 0.5 * (c.lo + c.hi);
            next.push_back({c.lo, mid});
            next.push_back({mid, c.hi});
        }
        current.swap(next);
    }

    for (const auto& c : current) res.cells.push_back({c.lo, c.hi});
    res.k_motion_sign = k_sign_acc == 0.0 ? 0.0 : (k_sign_acc > 0 ? 1.0 : -1.0);
    res.c_motion_sign = c_sign_acc == 0.0 ? 0.0 : (c_sign_acc > 0 ? 1.0 : -1.0);

    // Box-count slope over the deepest populated levels.
    std::vector<double> xs, ys;
    const std::size_t from =
        res.level_counts.size() >= 5 ? res.level_counts.size() - 5 : 0;
    for (std::size_t l = from; l < res.level_counts.size(); ++l) {
        if (res.level_counts[l] <= 0 || res.level_widths[l] <= 0) continue;
        xs.push_back(std::log(1.0 / res.level_widths[l]));
        ys.push_back(std::log(static_cast<double>(res.level_counts[l])));
    }
    if (xs.size() >= 2) {
        double sxx = 0, sxy = 0, mx = 0, my = 0;
        for (double x : xs) mx += x;
        for (double y : ys) my += y;
        mx /= static_cast<double>(xs.size());
        my /= static_cast<double>(ys.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxx += (xs[i] - mx) * (xs[i] - mx);
            sxy += (xs[i] - mx) * (ys[i] - my);
        }
        res.dim_estimate = sxx > 0 ? sxy / sxx : 0.0;
    }
    return res;
}

}  // namespace nonstat
