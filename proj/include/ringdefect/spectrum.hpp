// spectrum.hpp — spectral relations of the two-boson ring-defect problem:
// residual evaluation, Newton root finding, state enumeration by continuation
// from the free limit, root tracking along alpha, energies, and curve tracing.
//
// The spectral relations (one per particle, the second is the index swap):
//   (k1^2 - k2^2 - c^2) Re(u e^{-i k1 L}) - 2 c k1 Im(u e^{-i k1 L}) = k1^2 - k2^2 + c^2
// At c = 0 they reduce to k L = alpha +/- arccos(1/cosh eta) + 2 pi n.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "ringdefect/errors.hpp"
#include "ringdefect/tmatrix.hpp"

namespace ringdefect {

struct SystemConfig {
    double c = 0.0;  // interaction strength, 1/length
    double L = 1.0;  // ring circumference
    DefectParams defect{};
};

inline void validate(const SystemConfig& cfg) {
    validate(cfg.defect);
    if (!std::isfinite(cfg.c) || cfg.c < 0.0)
        throw invalid_parameter_error("interaction strength c must be finite and >= 0");
    if (!std::isfinite(cfg.L) || cfg.L <= 0.0)
        throw invalid_parameter_error("ring length L must be finite and > 0");
}

struct SpectralPoint {
    double k1 = 0.0;
    double k2 = 0.0;
    double residual = 0.0;  // max(|F1|, |F2|)
    std::optional<std::pair<int, int>> index{};
};

struct RootPath {
    std::vector<double> alphas;
    std::vector<SpectralPoint> points;
};

namespace detail {

// F for the (ka, kb) ordering; F2 is the same expression with swapped arguments.
inline double spectral_f(double ka, double kb, double c, double L, const cplx& u) {
    const cplx t = u * std::polar(1.0, -ka * L);
    const double d = ka * ka - kb * kb;
    return (d - c * c) * t.real() - 2.0 * c * ka * t.imag() - (d + c * c);
}

// Partial derivatives of spectral_f with respect to ka and kb.
inline std::array<double, 2> spectral_f_grad(double ka, double kb, double c, double L,
                                             const cplx& u) {
    const cplx t = u * std::polar(1.0, -ka * L);
    const double d = ka * ka - kb * kb;
    // dRe(t)/dka = L Im(t), dIm(t)/dka = -L Re(t)
    const double dfa = 2.0 * ka * t.real() + (d - c * c) * L * t.imag() - 2.0 * c * t.imag() +
                       2.0 * c * ka * L * t.real() - 2.0 * ka;
    const double dfb = 2.0 * kb * (1.0 - t.real());
    return {dfa, dfb};
}

inline double diag_guard_gap(double k1, double k2) {
    return std::abs(k1 - k2) - 1e-6 * (std::abs(k1) + std::abs(k2));
}

}  // namespace detail

// (F1, F2) of the spectral relations at (k1, k2).
inline std::pair<double, double> spectral_residual(double k1, double k2,
                                                   const SystemConfig& cfg) {
    validate(cfg);
    if (!std::isfinite(k1) || !std::isfinite(k2))
        throw invalid_parameter_error("momenta must be finite");
    const cplx u = make_defect(cfg.defect).u;
    return {detail::spectral_f(k1, k2, cfg.c, cfg.L, u),
            detail::spectral_f(k2, k1, cfg.c, cfg.L, u)};
}

// Closed-form free root k with k L = alpha + branch * arccos(1/cosh eta) + 2 pi n.
// branch is +1 or -1. Requires cfg.c == 0; throws out_of_range_error for k <= 0.
inline double free_root(const SystemConfig& cfg, int branch, int n) {
    validate(cfg);
    if (cfg.c != 0.0)
        throw invalid_parameter_error("free_root requires c = 0");
    if (branch != 1 && branch != -1)
        throw invalid_parameter_error("branch must be +1 or -1");
    const double a = std::acos(1.0 / std::cosh(cfg.defect.eta));
    const double kL = cfg.defect.alpha + branch * a + 2.0 * M_PI * n;
    if (kL <= 0.0)
        throw out_of_range_error("free root is not positive");
    return kL / cfg.L;
}

// Sorted ascending positive free roots (both branches, duplicates at eta = 0 merged).
// cfg.c is ignored; roots are those of the defect at cfg.defect for c = 0.
inline std::vector<double> free_root_list(const SystemConfig& cfg, int count) {
    validate(cfg);
    if (count < 1) throw invalid_parameter_error("count must be >= 1");
    const double a = std::acos(1.0 / std::cosh(cfg.defect.eta));
    const double alpha = cfg.defect.alpha;
    std::vector<double> ks;
    const int n_lo = static_cast<int>(std::floor((-alpha - a) / (2.0 * M_PI))) - 1;
    for (int n = n_lo; static_cast<int>(ks.size()) < count + 2; ++n) {
        for (int branch : {+1, -1}) {
            const double kL = alpha + branch * a + 2.0 * M_PI * n;
            if (kL > 1e-12) ks.push_back(kL / cfg.L);
        }
    }
    std::sort(ks.begin(), ks.end());
    std::vector<double> out;
    for (double k : ks)
        if (out.empty() || k - out.back() > 1e-12 * std::max(1.0, k)) out.push_back(k);
    if (static_cast<int>(out.size()) > count) out.resize(count);
    return out;
}

// Damped Newton iteration on (F1, F2). Iterates are kept in the open quadrant
// k1, k2 > 0 and away from the spurious diagonal family: for c > 0 the
// diagonal solves nothing, and at c = 0 it is the degenerate factor of the
// relations, so off-diagonal seeds must not terminate there. A seed already on
// the diagonal at c = 0 is a fixed point and is returned as such.
inline SpectralPoint find_root(double seed_k1, double seed_k2, const SystemConfig& cfg,
                               double tol = 1e-10) {
    validate(cfg);
    if (!std::isfinite(seed_k1) || !std::isfinite(seed_k2))
        throw invalid_parameter_error("seeds must be finite");
    if (!(tol > 0.0)) throw invalid_parameter_error("tol must be > 0");
    const cplx u = make_defect(cfg.defect).u;
    const int max_iter = 100;
    double k1 = seed_k1, k2 = seed_k2;
    double f1 = detail::spectral_f(k1, k2, cfg.c, cfg.L, u);
    double f2 = detail::spectral_f(k2, k1, cfg.c, cfg.L, u);
    double res = std::max(std::abs(f1), std::abs(f2));
    const bool guard = cfg.c > 0.0 || detail::diag_guard_gap(seed_k1, seed_k2) >= 0.0;
    for (int it = 0; it < max_iter; ++it) {
        if (res < tol) return SpectralPoint{k1, k2, res, std::nullopt};
        const auto g1 = detail::spectral_f_grad(k1, k2, cfg.c, cfg.L, u);
        const auto g2 = detail::spectral_f_grad(k2, k1, cfg.c, cfg.L, u);
        // J = [df1/dk1 df1/dk2; df2/dk1 df2/dk2]
        const double j11 = g1[0], j12 = g1[1], j21 = g2[1], j22 = g2[0];
        const double det = j11 * j22 - j12 * j21;
        const double scale = std::max({std::abs(j11), std::abs(j12), std::abs(j21),
                                       std::abs(j22), 1e-300});
        if (std::abs(det) < 1e-14 * scale * scale)
            throw singular_step_error("singular Jacobian in find_root");
        const double d1 = (-f1 * j22 + f2 * j12) / det;
        const double d2 = (-f2 * j11 + f1 * j21) / det;
        double lam = 1.0;
        bool stepped = false;
        while (lam > 1e-9) {
            const double n1 = k1 + lam * d1;
            const double n2 = k2 + lam * d2;
            if (n1 <= 0.0 || n2 <= 0.0 || (guard && detail::diag_guard_gap(n1, n2) < 0.0)) {
                lam *= 0.5;
                continue;
            }
            const double nf1 = detail::spectral_f(n1, n2, cfg.c, cfg.L, u);
            const double nf2 = detail::spectral_f(n2, n1, cfg.c, cfg.L, u);
            const double nres = std::max(std::abs(nf1), std::abs(nf2));
            if (nres < res || lam <= 2e-9) {
                k1 = n1; k2 = n2; f1 = nf1; f2 = nf2; res = nres;
                stepped = true;
                break;
            }
            lam *= 0.5;
        }
        if (!stepped) break;
    }
    if (res < tol) return SpectralPoint{k1, k2, res, std::nullopt};
    throw convergence_error("find_root did not converge", k1, k2, res);
}

namespace detail {

// Continue a root from c_from (where (k1, k2) solves the relations) to c_to.
// Recursive bisection of the interval on failure, up to `depth` levels.
inline SpectralPoint continue_segment(double k1, double k2, double c_from, double c_to,
                                      const SystemConfig& cfg, double tol, int depth) {
    SystemConfig step_cfg = cfg;
    step_cfg.c = c_to;
    try {
        return find_root(k1, k2, step_cfg, tol);
    } catch (const error&) {
        if (depth <= 0) throw;
        const double mid = 0.5 * (c_from + c_to);
        SpectralPoint half = continue_segment(k1, k2, c_from, mid, cfg, tol, depth - 1);
        return continue_segment(half.k1, half.k2, mid, c_to, cfg, tol, depth - 1);
    }
}

// Continue the (i, j) free-root seed from c = 0 to cfg.c. Geometric steps,
// denser near zero; diagonal seeds are unfolded at the first step.
inline SpectralPoint continue_pair(const SystemConfig& cfg, int i, int j, double tol = 1e-10,
                                   int steps = 20) {
    SystemConfig free_cfg = cfg;
    free_cfg.c = 0.0;
    const auto roots = free_root_list(free_cfg, std::max(i, j));
    double k1 = roots[i - 1];
    double k2 = roots[j - 1];
    if (cfg.c == 0.0) {
        auto [f1, f2] = spectral_residual(k1, k2, free_cfg);
        SpectralPoint p{k1, k2, std::max(std::abs(f1), std::abs(f2)),
                        std::make_pair(i, j)};
        return p;
    }
    constexpr double ratio = 0.7;
    std::vector<double> cs(steps);
    for (int m = 0; m < steps; ++m) cs[m] = cfg.c * std::pow(ratio, steps - 1 - m);
    if (i == j) {
        const double d0 = std::sqrt(2.0 * cs.front() / cfg.L);
        k1 -= d0;
        k2 += d0;
    }
    try {
        double c_prev = 0.0;
        SpectralPoint p{k1, k2, 0.0, std::nullopt};
        for (double c_next : cs) {
            p = continue_segment(p.k1, p.k2, c_prev, c_next, cfg, tol, 8);
            c_prev = c_next;
        }
        p.index = std::make_pair(i, j);
        return p;
    } catch (const error& e) {
        throw enumeration_error("continuation lost state (" + std::to_string(i) + "," +
                                    std::to_string(j) + "): " + e.what(),
                                i, j);
    }
}

}  // namespace detail

// All states (i, j) with 1 <= i, j <= max_index, seeded from the free roots and
// continued in c. Keys are (i, j); every value satisfies residual < 1e-10.
inline std::map<std::pair<int, int>, SpectralPoint> enumerate_states(const SystemConfig& cfg,
                                                                     int max_index) {
    validate(cfg);
    if (max_index < 1) throw invalid_parameter_error("max_index must be >= 1");
    std::map<std::pair<int, int>, SpectralPoint> out;
    for (int i = 1; i <= max_index; ++i)
        for (int j = 1; j <= max_index; ++j)
            out[{i, j}] = detail::continue_pair(cfg, i, j);
    return out;
}

// Track the (i, j) root along an alpha grid. Predictor shifts both momenta by
// d(alpha)/L (exact in the free limit); failed steps trigger local grid
// refinement up to 8 halvings before a path_error is raised.
inline RootPath track_alpha(std::pair<int, int> state, const SystemConfig& cfg,
                            const std::vector<double>& alpha_grid) {
    validate(cfg);
    if (alpha_grid.size() < 1) throw invalid_parameter_error("alpha grid is empty");
    if (std::abs(alpha_grid.front() - cfg.defect.alpha) >
        1e-12 * (1.0 + std::abs(cfg.defect.alpha)))
        throw invalid_parameter_error("alpha grid must start at cfg.defect.alpha");
    bool increasing = true, decreasing = true, constant = true;
    for (std::size_t m = 1; m < alpha_grid.size(); ++m) {
        const double d = alpha_grid[m] - alpha_grid[m - 1];
        if (d <= 0.0) increasing = false;
        if (d >= 0.0) decreasing = false;
        if (d != 0.0) constant = false;
    }
    if (!constant && !increasing && !decreasing)
        throw invalid_parameter_error("alpha grid must be strictly monotone");

    RootPath path;
    path.alphas = alpha_grid;
    path.points.reserve(alpha_grid.size());
    SpectralPoint cur = detail::continue_pair(cfg, state.first, state.second);
    path.points.push_back(cur);

    // Newton-solve at alpha, refining the step from alpha_prev on failure.
    std::function<SpectralPoint(const SpectralPoint&, double, double, int)> advance =
        [&](const SpectralPoint& from, double alpha_prev, double alpha,
            int depth) -> SpectralPoint {
        SystemConfig c2 = cfg;
        c2.defect.alpha = alpha;
        const double da = alpha - alpha_prev;
        try {
            return find_root(from.k1 + da / cfg.L, from.k2 + da / cfg.L, c2);
        } catch (const path_error&) {
            throw;
        } catch (const error& e) {
            if (depth <= 0)
                throw path_error("alpha continuation failed at alpha = " +
                                     std::to_string(alpha) + ": " + e.what(),
                                 alpha);
            const double mid = 0.5 * (alpha_prev + alpha);
            SpectralPoint half = advance(from, alpha_prev, mid, depth - 1);
            return advance(half, mid, alpha, depth - 1);
        }
    };

    for (std::size_t m = 1; m < alpha_grid.size(); ++m) {
        cur = advance(cur, alpha_grid[m - 1], alpha_grid[m], 8);
        cur.index = std::make_pair(state.first, state.second);
        path.points.push_back(cur);
    }
    return path;
}

// E = (k1^2 + k2^2) / 2.
inline double energy(const SpectralPoint& p) { return 0.5 * (p.k1 * p.k1 + p.k2 * p.k2); }

enum class CurveFamily { horizontal, vertical };

struct Polyline {
    int branch_id = 0;
    std::vector<std::array<double, 2>> points;  // (k1, k2)
};

namespace detail {

// Roots of F1(., k_row) = 0 in k (fixed second argument), scan + bisection.
inline std::vector<double> scan_roots_f1(double k_row, double k_min, double k_max, double step,
                                         const SystemConfig& cfg, const cplx& u) {
    std::vector<double> roots;
    double prev_k = k_min;
    double prev_f = spectral_f(prev_k, k_row, cfg.c, cfg.L, u);
    for (double k = k_min + step; k <= k_max + 0.5 * step; k += step) {
        const double f = spectral_f(k, k_row, cfg.c, cfg.L, u);
        if (prev_f == 0.0) roots.push_back(prev_k);
        else if (prev_f * f < 0.0) {
            double lo = prev_k, hi = k, flo = prev_f;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = spectral_f(mid, k_row, cfg.c, cfg.L, u);
                if (flo * fm <= 0.0) hi = mid;
                else { lo = mid; flo = fm; }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_k = k;
        prev_f = f;
    }
    return roots;
}

}  // namespace detail

// Polylines of the F1 = 0 family ("vertical" curves; the horizontal family is
// the coordinate transpose). Rows k2 = const are scanned for k1 roots and
// chained across rows; branches split where the chain jumps by more than
// 3 * step. At c = 0 the family degenerates to vertical lines at the free
// roots plus the diagonal, which are emitted analytically.
inline std::vector<Polyline> curve_samples(const SystemConfig& cfg, CurveFamily family,
                                           double k_min, double k_max, double step) {
    validate(cfg);
    if (!(step > 0.0)) throw invalid_parameter_error("step must be > 0");
    if (!(k_min >= 0.0) || !std::isfinite(k_max))
        throw invalid_parameter_error("window must lie in [0, k_max]");
    std::vector<Polyline> out;
    if (k_max <= k_min) return out;

    if (cfg.c == 0.0) {
        SystemConfig free_cfg = cfg;
        free_cfg.c = 0.0;
        int id = 0;
        std::vector<double> grid;
        for (double k = k_min; k <= k_max + 0.5 * step; k += step) grid.push_back(k);
        for (double r : free_root_list(free_cfg, 64)) {
            if (r < k_min || r > k_max) continue;
            Polyline line;
            line.branch_id = id++;
            for (double k2 : grid) line.points.push_back({r, k2});
            out.push_back(std::move(line));
        }
        Polyline diag;
        diag.branch_id = id++;
        for (double k : grid) diag.points.push_back({k, k});
        out.push_back(std::move(diag));
    } else {
        const cplx u = make_defect(cfg.defect).u;
        std::vector<Polyline> open;
        int next_id = 0;
        for (double k2 = k_min; k2 <= k_max + 0.5 * step; k2 += step) {
            const auto ks = detail::scan_roots_f1(k2, k_min, k_max, step, cfg, u);
            std::vector<bool> used(open.size(), false);
            std::vector<Polyline> still_open;
            std::vector<std::pair<double, int>> assignments;  // (k1, branch or -1)
            for (double k1 : ks) {
                int best = -1;
                double best_d = 3.0 * step;
                for (std::size_t b = 0; b < open.size(); ++b) {
                    if (used[b]) continue;
                    const double d = std::abs(open[b].points.back()[0] - k1);
                    if (d < best_d) { best_d = d; best = static_cast<int>(b); }
                }
                if (best >= 0) used[best] = true;
                assignments.push_back({k1, best});
            }
            for (std::size_t b = 0; b < open.size(); ++b)
                if (!used[b]) out.push_back(std::move(open[b]));  // branch ended
            std::vector<Polyline> next_open;
            for (auto [k1, b] : assignments) {
                if (b < 0) {
                    Polyline line;
                    line.branch_id = next_id++;
                    line.points.push_back({k1, k2});
                    next_open.push_back(std::move(line));
                } else {
                    open[b].points.push_back({k1, k2});
                    next_open.push_back(std::move(open[b]));
                }
            }
            open = std::move(next_open);
        }
        for (auto& line : open) out.push_back(std::move(line));
        std::sort(out.begin(), out.end(),
                  [](const Polyline& a, const Polyline& b) { return a.branch_id < b.branch_id; });
    }

    if (family == CurveFamily::horizontal)
        for (auto& line : out)
            for (auto& pt : line.points) std::swap(pt[0], pt[1]);
    return out;
}

}  // namespace ringdefect
