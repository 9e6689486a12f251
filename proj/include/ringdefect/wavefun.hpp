// wavefun.hpp — two-particle Bethe wavefunctions for a spectral root.
//
// On the ordered wedge 0 <= x1 <= x2 < L the state is the eight-term sum over
// sign pairs (s1, s2) of
//   s_e(q1,q2) A(q1,q2) e^{i(q1 x1 + q2 x2)} + s_sigma(q1,q2) A(q1,q2) e^{i(q2 x1 + q1 x2)}
// with q1 = s1 k1, q2 = s2 k2 and the contact factors
//   s_e = 1 + ic/(q1 - q2),  s_sigma = 1 + ic/(q2 - q1).
// Bosonic symmetry extends it to x1 > x2. The base amplitudes are the
// nullspace direction of the seam boundary system; it degenerates exactly on
// the spectral variety, which cross-validates the spectral relations against
// the boundary conditions.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "ringdefect/errors.hpp"
#include "ringdefect/spectrum.hpp"
#include "ringdefect/tmatrix.hpp"

namespace ringdefect {

enum class Permutation { identity, transposition };

// Contact scattering factor for the signed momentum pair (q1, q2).
inline cplx scattering_factor(Permutation perm, double q1, double q2, double c) {
    if (c > 0.0 && std::abs(q1 - q2) < 1e-12 * (std::abs(q1) + std::abs(q2)))
        throw degenerate_momenta_error("coincident momenta in scattering factor");
    if (c == 0.0) return cplx(1.0, 0.0);
    const double d = (perm == Permutation::identity) ? (q1 - q2) : (q2 - q1);
    return cplx(1.0, c / d);
}

// Base amplitudes indexed by sign pair: 0:(+,+) 1:(+,-) 2:(-,+) 3:(-,-).
struct AmplitudeSet {
    std::array<cplx, 4> base{};
    double consistency_residual = 0.0;  // sigma_min / sigma_max of the seam system
};

struct WedgeTerm {
    cplx coef;
    double p, q;  // psi += coef * exp(i (p x1 + q x2)) on x1 <= x2
};

struct Wavefunction {
    SpectralPoint point;
    SystemConfig cfg;
    AmplitudeSet amplitudes;
    double norm = 0.0;                 // L2 norm of the unit-amplitude state
    std::array<WedgeTerm, 8> terms{};  // normalized wedge expansion
};

namespace detail {

inline int amp_index(int s1, int s2) { return (s1 > 0 ? 0 : 2) + (s2 > 0 ? 0 : 1); }

// Seam boundary system over the four base amplitudes: the two transfer-matrix
// relations of the defect (one per particle) with the matrix applied on the
// resolved orientation, plus the second spectator-sign copy for particle 1.
// Six rows; rank 3 exactly where both spectral relations vanish.
inline Eigen::Matrix<cplx, 6, 4> seam_matrix(double k1, double k2, const SystemConfig& cfg) {
    const TransferMatrix m = make_defect(cfg.defect);
    const double c = cfg.c;
    const cplx e1p = std::polar(1.0, k1 * cfg.L), e1m = std::conj(e1p);
    const cplx e2p = std::polar(1.0, k2 * cfg.L), e2m = std::conj(e2p);
    auto se = [c](double a, double b) { return scattering_factor(Permutation::identity, a, b, c); };
    auto ss = [c](double a, double b) { return scattering_factor(Permutation::transposition, a, b, c); };

    Eigen::Matrix<cplx, 6, 4> A = Eigen::Matrix<cplx, 6, 4>::Zero();
    int r = 0;
    for (int s2 : {+1, -1}) {  // particle 1 across the seam, spectator q2 = s2 k2
        const double q2 = s2 * k2;
        const int ip = amp_index(+1, s2), im = amp_index(-1, s2);
        A(r, ip) = m.u * se(k1, q2) - e1p * ss(k1, q2);
        A(r, im) = m.v * se(-k1, q2);
        A(r + 1, ip) = std::conj(m.v) * se(k1, q2);
        A(r + 1, im) = std::conj(m.u) * se(-k1, q2) - e1m * ss(-k1, q2);
        r += 2;
    }
    {  // particle 2 across the seam, spectator q1 = +k1
        const double q1 = k1;
        const int ip = amp_index(+1, +1), im = amp_index(+1, -1);
        A(r, ip) = m.u * ss(q1, k2) - e2p * se(q1, k2);
        A(r, im) = m.v * ss(q1, -k2);
        A(r + 1, ip) = std::conj(m.v) * ss(q1, k2);
        A(r + 1, im) = std::conj(m.u) * ss(q1, -k2) - e2m * se(q1, -k2);
    }
    return A;
}

// Unnormalized wedge expansion for base amplitudes `a`.
inline std::array<WedgeTerm, 8> wedge_expansion(double k1, double k2, double c,
                                                const std::array<cplx, 4>& a) {
    std::array<WedgeTerm, 8> t{};
    int n = 0;
    for (int s1 : {+1, -1})
        for (int s2 : {+1, -1}) {
            const double q1 = s1 * k1, q2 = s2 * k2;
            const cplx amp = a[amp_index(s1, s2)];
            t[n++] = {scattering_factor(Permutation::identity, q1, q2, c) * amp, q1, q2};
            t[n++] = {scattering_factor(Permutation::transposition, q1, q2, c) * amp, q2, q1};
        }
    return t;
}

inline cplx wedge_value(const std::array<WedgeTerm, 8>& terms, double x1, double x2) {
    cplx s = 0.0;
    for (const auto& t : terms) s += t.coef * std::polar(1.0, t.p * x1 + t.q * x2);
    return s;
}

// phi1(z) = (e^z - 1)/z, series near zero.
inline cplx phi1(const cplx& z) {
    if (std::abs(z) < 0.5) {
        cplx sum = 1.0, term = 1.0;
        for (int n = 2; n <= 22; ++n) {
            term *= z / static_cast<double>(n);
            sum += term;
        }
        return sum;
    }
    return (std::exp(z) - 1.0) / z;
}

// g_m(z) = int_0^1 t^m e^{z t} dt.
inline cplx moment_g(int m, const cplx& z) {
    if (std::abs(z) < 0.5) {
        cplx sum = 0.0, pow = 1.0;
        double fact = 1.0;
        for (int j = 0; j <= 24; ++j) {
            if (j > 0) {
                pow *= z;
                fact *= j;
            }
            sum += pow / (fact * (m + j + 1));
        }
        return sum;
    }
    cplx g = (std::exp(z) - 1.0) / z;
    for (int mm = 1; mm <= m; ++mm) g = (std::exp(z) - static_cast<double>(mm) * g) / z;
    return g;
}

}  // namespace detail

// int_0^L dx2 e^{i q2 x2} int_0^{x2} dx1 e^{i q1 x1}, closed form with series
// kernels near the removable singularities.
inline cplx triangle_integral(double q1, double q2, double L) {
    if (!(L > 0.0)) throw invalid_parameter_error("L must be > 0");
    const cplx i(0.0, 1.0);
    if (std::abs(q1 * L) < 1e-3) {
        // T = sum_{n>=0} (i q1)^n / (n+1)! * L^{n+2} g_{n+1}(i q2 L)
        const cplx z2 = i * q2 * L;
        cplx sum = 0.0, pref = L * L;
        double fact = 1.0;  // (n+1)!
        for (int n = 0; n <= 5; ++n) {
            fact *= (n + 1);
            sum += pref / fact * detail::moment_g(n + 1, z2);
            pref *= i * q1 * L;
        }
        return sum;
    }
    auto E = [&](double q) { return L * detail::phi1(i * q * L); };
    return (E(q1 + q2) - E(q2)) / (i * q1);
}

// <a|b> over [0,L)^2 via the wedge expansion: twice the single-wedge integral.
inline cplx inner_product(const Wavefunction& a, const Wavefunction& b) {
    if (a.cfg.L != b.cfg.L) throw config_error("inner_product: mismatched ring length L");
    cplx s = 0.0;
    for (const auto& ta : a.terms)
        for (const auto& tb : b.terms)
            s += std::conj(ta.coef) * tb.coef *
                 triangle_integral(tb.p - ta.p, tb.q - ta.q, a.cfg.L);
    return 2.0 * s;
}

// Builds the normalized state at a converged spectral point. The amplitude set
// is the right singular direction of the smallest singular value of the seam
// system, gauge-fixed so the largest-magnitude amplitude is real positive.
inline Wavefunction build_state(const SpectralPoint& p, const SystemConfig& cfg) {
    validate(cfg);
    const Eigen::Matrix<cplx, 6, 4> A = detail::seam_matrix(p.k1, p.k2, cfg);
    Eigen::JacobiSVD<Eigen::Matrix<cplx, 6, 4>> svd(A, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();

    Wavefunction w;
    w.point = p;
    w.cfg = cfg;

    double entry_scale = 0.0;
    for (int r = 0; r < 6; ++r)
        for (int col = 0; col < 4; ++col) entry_scale = std::max(entry_scale, std::abs(A(r, col)));

    if (sv(0) < 1e-12 * std::max(1.0, entry_scale)) {
        // Fully degenerate seam system (free ring, eta = 0, c = 0 at a root):
        // every amplitude set solves it; return the travelling-wave corner.
        w.amplitudes.base = {cplx(1.0, 0.0), 0.0, 0.0, 0.0};
        w.amplitudes.consistency_residual = 0.0;
    } else {
        const double ratio = sv(3) / sv(0);
        w.amplitudes.consistency_residual = ratio;
        if (ratio >= 1e-8)
            throw not_a_spectral_root_error(
                "boundary system has no nullspace at (k1, k2); sigma_min/sigma_max = " +
                    std::to_string(ratio),
                ratio);
        Eigen::Vector4cd vec = svd.matrixV().col(3);
        int imax = 0;
        for (int m = 1; m < 4; ++m)
            if (std::abs(vec(m)) > std::abs(vec(imax))) imax = m;
        vec *= std::polar(1.0, -std::arg(vec(imax)));  // canonical gauge
        vec.normalize();
        for (int m = 0; m < 4; ++m) w.amplitudes.base[m] = vec(m);
    }

    w.terms = detail::wedge_expansion(p.k1, p.k2, cfg.c, w.amplitudes.base);
    Wavefunction raw = w;
    raw.norm = 1.0;
    const cplx n2 = inner_product(raw, raw);
    if (!(n2.real() > 0.0) || !std::isfinite(n2.real()))
        throw error("state has non-positive L2 norm");
    w.norm = std::sqrt(n2.real());
    for (auto& t : w.terms) t.coef /= w.norm;
    return w;
}

// Pointwise evaluation on [0, L)^2 with bosonic extension across the diagonal.
inline cplx evaluate(const Wavefunction& w, double x1, double x2) {
    const double L = w.cfg.L;
    if (!(x1 >= 0.0 && x1 < L && x2 >= 0.0 && x2 < L))
        throw domain_error("coordinates outside [0, L)");
    if (x1 > x2) std::swap(x1, x2);
    return detail::wedge_value(w.terms, x1, x2);
}

// Multiplies the state by a unit phase (gauge transformation).
inline Wavefunction apply_gauge(const Wavefunction& w, const cplx& phase) {
    Wavefunction out = w;
    const cplx unit = phase / std::abs(phase);
    for (auto& a : out.amplitudes.base) a *= unit;
    for (auto& t : out.terms) t.coef *= unit;
    return out;
}

namespace detail {

inline std::vector<std::pair<double, double>> gauss_legendre(int n) {
    std::vector<std::pair<double, double>> nw(n);
    for (int i = 0; i < n; ++i) {
        // Newton from the Chebyshev-like initial guess
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nw[i] = {0.5 * (1.0 - x), 1.0 / ((1.0 - x * x) * pp * pp)};  // mapped to [0,1]
    }
    return nw;
}

inline cplx wedge_quadrature(const Wavefunction& a, const Wavefunction& b, int order) {
    const double L = a.cfg.L;
    const auto nw = gauss_legendre(order);
    cplx acc = 0.0;
    for (const auto& [t2, w2] : nw) {
        const double x2 = L * t2;
        for (const auto& [t1, w1] : nw) {
            const double x1 = x2 * t1;
            acc += w2 * w1 * (L * L * t2) * std::conj(wedge_value(a.terms, x1, x2)) *
                   wedge_value(b.terms, x1, x2);
        }
    }
    return 2.0 * acc;
}

}  // namespace detail

// Gauss-Legendre oracle for inner_product: tensor quadrature on the wedge,
// evaluated at the given order and at twice the order as a convergence check.
inline cplx inner_product_quadrature(const Wavefunction& a, const Wavefunction& b, int order) {
    if (order < 8) throw invalid_parameter_error("quadrature order must be >= 8");
    if (a.cfg.L != b.cfg.L) throw config_error("inner_product_quadrature: mismatched L");
    const cplx coarse = detail::wedge_quadrature(a, b, order);
    const cplx fine = detail::wedge_quadrature(a, b, 2 * order);
    // States are unit-normalized, so the overlap scale is bounded by 1.
    const double rel = std::abs(fine - coarse) / std::max(std::abs(fine), 1.0);
    if (rel > 1e-6)
        throw oracle_unreliable_error("quadrature did not converge under order doubling", rel);
    return fine;
}

}  // namespace ringdefect
