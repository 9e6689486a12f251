// tmatrix.hpp — SU(1,1) transfer matrices for the localized ring defect.
//
// A transfer matrix is stored as the pair (u, v); the implied 2x2 matrix is
//   ( u       v  )
//   ( conj(v) conj(u) )
// with |u|^2 - |v|^2 = 1. The defect is the product of a transmitted-phase
// factor diag(e^{i a}, e^{-i a}) and a barrier factor
// (cosh eta, i sinh eta; -i sinh eta, cosh eta), multiplied in that order.
// The factor order defines the orientation of the ring and is part of the
// public contract.

#pragma once

#include <cmath>
#include <complex>

#include "ringdefect/errors.hpp"

namespace ringdefect {

using cplx = std::complex<double>;

struct DefectParams {
    double eta = 0.0;    // barrier strength, >= 0
    double alpha = 0.0;  // transmitted-wave phase shift, radians
};

struct TransferMatrix {
    cplx u{1.0, 0.0};
    cplx v{0.0, 0.0};
};

inline void validate(const DefectParams& p) {
    if (!std::isfinite(p.eta) || !std::isfinite(p.alpha))
        throw invalid_parameter_error("defect parameters must be finite");
    if (p.eta < 0.0)
        throw invalid_parameter_error("eta must be non-negative");
}

// |u|^2 - |v|^2 - 1; zero for exact group elements. Accumulated in extended
// precision so the measurement does not add cancellation noise of its own.
inline double group_residual(const TransferMatrix& m) {
    const long double ur = m.u.real(), ui = m.u.imag();
    const long double vr = m.v.real(), vi = m.v.imag();
    return static_cast<double>(ur * ur + ui * ui - vr * vr - vi * vi - 1.0L);
}

namespace detail {

inline long double stored_group_residual(const double c[4]) {
    const long double ur = c[0], ui = c[1], vr = c[2], vi = c[3];
    return ur * ur + ui * ui - vr * vr - vi * vi - 1.0L;
}

}  // namespace detail

// Phase factor times barrier factor: u = e^{i a} cosh(eta), v = i e^{i a} sinh(eta).
// Components are formed in extended precision; a one-ulp neighborhood search
// then picks the rounding that minimizes the stored group residual, which for
// eta ~ 5 would otherwise sit at the component-rounding floor ~2e-12.
inline TransferMatrix make_defect(const DefectParams& p) {
    validate(p);
    const long double eta = p.eta, alpha = p.alpha;
    const long double C = std::cosh(eta), S = std::sinh(eta);
    const long double ca = std::cos(alpha), sa = std::sin(alpha);
    double comp[4] = {static_cast<double>(C * ca), static_cast<double>(C * sa),
                      static_cast<double>(-S * sa), static_cast<double>(S * ca)};
    double best[4] = {comp[0], comp[1], comp[2], comp[3]};
    long double best_res = std::fabs(detail::stored_group_residual(comp));
    if (best_res > 1e-15L) {
        const double inf = std::numeric_limits<double>::infinity();
        double cand[4];
        for (int mask = 0; mask < 81; ++mask) {
            int digits = mask;
            for (int i = 0; i < 4; ++i) {
                const int d = digits % 3;
                digits /= 3;
                cand[i] = (d == 0) ? comp[i]
                                   : std::nextafter(comp[i], d == 1 ? inf : -inf);
            }
            const long double r = std::fabs(detail::stored_group_residual(cand));
            if (r < best_res) {
                best_res = r;
                for (int i = 0; i < 4; ++i) best[i] = cand[i];
            }
        }
    }
    return TransferMatrix{cplx(best[0], best[1]), cplx(best[2], best[3])};
}

// Matrix product m1 * m2, re-expressed as a (u, v) pair.
inline TransferMatrix compose(const TransferMatrix& m1, const TransferMatrix& m2) {
    return TransferMatrix{m1.u * m2.u + m1.v * std::conj(m2.v),
                          m1.u * m2.v + m1.v * std::conj(m2.u)};
}

// Transmission coefficient 1/|u|, in (0, 1].
inline double transmission(const TransferMatrix& m) {
    return 1.0 / std::abs(m.u);
}

}  // namespace ringdefect
