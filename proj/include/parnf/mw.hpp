#ifndef PARNF_MW_HPP
#define PARNF_MW_HPP

// Real-analytic surfaces with a complex tangent and their involution
// triples: a surface M = {w = F(z, zbar)} with a nondegenerate (Bishop)
// complex tangent at the origin complexifies to a holomorphic surface in
// C^2 x C^2 carrying two deck involutions tau1, tau2 of the coordinate
// projections and an antiholomorphic involution rho exchanging them.  This
// header holds the shared types of that correspondence, the coefficient
// conjugation operators used to keep all arithmetic holomorphic, and the
// Bishop-invariant-to-multiplier map.

#include <cmath>
#include <limits>

#include "parnf/errors.hpp"
#include "parnf/reversible.hpp"
#include "parnf/series.hpp"

namespace parnf {

// ---------------------------------------------------------------------------
// coefficient conjugation (bar-notation): fbar(x) := conj(f(conj(x)))

inline TS conj_series(const TS& f) {
    TS r(f.N);
    for (auto& [m, v] : f.c) r.c[m] = std::conj(v);
    return r;
}

inline FD conj_diffeo(const FD& f) { return FD{conj_series(f.comp1), conj_series(f.comp2)}; }

// ---------------------------------------------------------------------------
// domain types

// complexified surface  {w1 = F(z1, w1-dual)}: the defining series
// F = gamma^{-1} z1 w1 + z1^2 + w1^2 + h.o.t. in the complexified
// variables (z1, w1); gamma = infinity is encoded by gamma_inv = 0
struct Surface {
    TS F;
    double gamma_inv = 1.0;
};

// Moser-Webster triple: two holomorphic involutions and the antiholomorphic
// involution rho(xi) = G(conj(xi)), stored through its holomorphic series G
struct MWTriple {
    FD tau1, tau2;
    FD rho_bar; // the series G
};

struct SurfaceClass {
    FormalClass base;
    int sign = +1;          // the choice in c = sign * 2ip
    bool P_real = false;    // reduced polynomial has real coefficients
    bool mu_imaginary = false; // residue jets are purely imaginary
};

// ---------------------------------------------------------------------------
// multiplier of the complexified quadric

// smallest q <= pmax with lambda^q = 1 (0 when lambda is not a root of
// unity of order <= pmax within the tolerance)
inline int root_of_unity_order(cplx lambda, int pmax = 64, double tol = 1e-9) {
    if (std::abs(std::abs(lambda) - 1.0) > tol) return 0;
    double arg = std::arg(lambda);
    for (int q = 1; q <= pmax; ++q) {
        double t = arg * q / (2.0 * M_PI);
        if (std::abs(t - std::round(t)) * 2.0 * M_PI / q < tol) return q;
    }
    return 0;
}

struct BishopMultiplier {
    cplx lambda, lambda_inv;
    int p = 0; // order of lambda as a root of unity; 0 when not a root of unity
};

// multiplier pair of the deck composition tau1 o tau2 of the quadric:
// lambda + lambda^{-1} = gamma^{-2} - 2
inline BishopMultiplier bishop_to_lambda(double gamma) {
    if (!(gamma > 0.0)) throw DomainError("bishop_to_lambda: gamma must be positive");
    double ginv = std::isinf(gamma) ? 0.0 : 1.0 / gamma;
    double t = ginv * ginv - 2.0;
    // roots of lambda^2 - t lambda + 1 = 0; for t in [-2,2] they lie on the
    // unit circle and the branch with nonnegative imaginary part is reported
    cplx disc = std::sqrt(cplx(t * t - 4.0, 0.0));
    cplx l1 = (cplx(t) + disc) / 2.0, l2 = (cplx(t) - disc) / 2.0;
    BishopMultiplier out;
    out.lambda = (l1.imag() >= -1e-15) ? l1 : l2;
    out.lambda_inv = cplx(1.0) / out.lambda;
    out.p = root_of_unity_order(out.lambda);
    return out;
}

} // namespace parnf

#endif
