#ifndef PARNF_REVERSIBLE_HPP
#define PARNF_REVERSIBLE_HPP

// Formal classification of reversible parabolic diffeomorphisms of (C^2,0)
// with a Morse-type first integral.  Pipeline:
//   linear_normalize : straighten the involution to the coordinate swap
//                      sigma, the integral to h = xi1*xi2, and the linear
//                      part of phi to Lambda (diagonal or -sigma);
//   prepare          : averaging + radial correction making phi linear
//                      modulo its fixed-point ideal;
//   ideal_generator  : multiplicity s and distinguished polynomial P of the
//                      fixed-point divisor;
//   formal/prepared_generator : infinitesimal generator of phi^p in the
//                      form h^s P/(Q + P*Rhat) E, with dual-route checks;
//   normal_form      : canonical invariants (case, p, k, s, c, P_nf, mu)
//                      via rescaling, the leaf-wise flow removing the
//                      u-dependence of Q at h=0, and the homological
//                      parameter flow reducing Q to a constant.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "parnf/series.hpp"
#include "parnf/series1.hpp"
#include "parnf/symmetric.hpp"

namespace parnf {

using TS = TruncSeries2<cplx>;
using TS1 = TruncSeries1<cplx>;
using FD = FormalDiffeo<cplx>;
using VF = FormalVectorField<cplx>;
using SS = SymSeries<cplx>;

enum class CaseTag { O, A, B, C };
enum class VariableKind { U, Utilde };

struct ReversiblePair {
    FD phi, tau;
    TS H;
};

struct PreparedPair {
    FD phi;          // tau = sigma and H = h in these coordinates
    int p = 1;       // order of the linear part Lambda
    bool minus_sigma = false;
    cplx lambda{1.0, 0.0}; // diagonal eigenvalue (unused when minus_sigma)
};

struct LinearNormalized {
    PreparedPair pair; // candidate: linear data fixed, ideal not yet prepared
    FD transform;      // composite change of variables applied to the input
};

struct WeierstrassPoly {
    int k = 0;                               // degree in its variable
    VariableKind kind = VariableKind::U;     // U: u=xi1^p+xi2^p; Utilde: utilde=(xi1+xi2)^2
    std::vector<TS1> coeffs;                 // P_0 .. P_{k-1}; leading term monic
};

struct PreparedGenerator {
    WeierstrassPoly P;
    SS Q;           // polynomial part, degree < deg P in the division variable
    TS Rhat;
    TS1 mu_jets;    // diagonal re-expansion of Rhat
    int s = 0;
    int k_times_p = 0;
};

struct FormalClass {
    CaseTag tag = CaseTag::O;
    int p = 1;
    int k2 = 0; // twice the degree k of P_nf (odd in case C, where k = ktilde + 1/2)
    int s = 0;
    cplx c{0.0, 0.0};
    WeierstrassPoly P_nf;
    TS1 mu_jets;
    cplx lambda{1.0, 0.0};
    bool minus_sigma = false;
    int symmetry_order = 0; // candidate root-of-unity scalings: Z_{2kp+4s}
};

// ---------------------------------------------------------------------------
// small helpers

namespace detail {

inline TS compose_sigma(const TS& f) {
    TS r(f.N);
    for (auto& [m, v] : f.c) r.c[{m.second, m.first}] = v;
    return r;
}

// f(lambda xi1, lambda^{-1} xi2)
inline TS compose_diag(const TS& f, cplx lambda) {
    TS r(f.N);
    for (auto& [m, v] : f.c) {
        cplx w = v * std::pow(lambda, m.first - m.second);
        if (w != cplx(0.0)) r.c[m] = w;
    }
    return r;
}

// f((-xi2, -xi1)) — composition with Lambda = -sigma
inline TS compose_minus_sigma(const TS& f) {
    TS r(f.N);
    for (auto& [m, v] : f.c) {
        cplx w = ((m.first + m.second) % 2) ? -v : v;
        r.c[{m.second, m.first}] = w;
    }
    return r;
}

inline TS compose_lambda(const TS& f, const PreparedPair& pp, int j) {
    if (pp.minus_sigma) {
        if (((j % 2) + 2) % 2 == 0) return f;
        return compose_minus_sigma(f);
    }
    return compose_diag(f, std::pow(pp.lambda, j));
}

inline FD lambda_diffeo(const PreparedPair& pp, int order) {
    if (pp.minus_sigma)
        return FD::linear(cplx(0.0), cplx(-1.0), cplx(-1.0), cplx(0.0), order);
    return FD::linear(pp.lambda, cplx(0.0), cplx(0.0), cplx(1.0) / pp.lambda, order);
}

// (1 + n)^alpha for a series n with n(0) = 0, via the binomial series
inline TS pow_unit2(const TS& q, double alpha) {
    if (std::abs(q.get(0, 0) - cplx(1.0)) > 1e-12)
        throw DomainError("pow_unit2: series must have constant term 1");
    TS n = q - TS::constant(cplx(1.0), q.N);
    TS r = TS::constant(cplx(1.0), q.N), term = TS::constant(cplx(1.0), q.N);
    for (int m = 1; m <= q.N; ++m) {
        term = cplx((alpha - (m - 1)) / m) * (term * n);
        if (term.is_zero()) break;
        r = r + term;
    }
    return r;
}

// log(1 + A) for A with A(0) = 0
inline TS log1p_series(const TS& A) {
    if (std::abs(A.get(0, 0)) > 1e-12) throw DomainError("log1p_series: A(0) must vanish");
    TS r(A.N), term = A;
    for (int m = 1; m <= A.N; ++m) {
        if (term.is_zero()) break;
        r = r + cplx((m % 2) ? 1.0 / m : -1.0 / m) * term;
        term = term * A;
    }
    return r;
}

// multiplicity of h = xi1*xi2 dividing f (relative threshold in floating mode)
inline int h_multiplicity(TS& f, double tol) {
    int s = 0;
    double scale = std::max(f.norm(), 1e-300);
    while (!f.is_zero()) {
        bool divisible = true;
        for (auto& [m, v] : f.c)
            if ((m.first == 0 || m.second == 0) && std::abs(v) > tol * scale) {
                divisible = false;
                break;
            }
        if (!divisible) break;
        TS g(f.N);
        for (auto& [m, v] : f.c)
            if (m.first >= 1 && m.second >= 1) g.c[{m.first - 1, m.second - 1}] = v;
        f = std::move(g);
        ++s;
    }
    return s;
}

// diagonal re-expansion mu(h) = sum_m r_{mm} h^m of a series
inline TS1 diagonal_jets(const TS& R) {
    TS1 mu(R.N / 2);
    for (auto& [m, v] : R.c)
        if (m.first == m.second) mu.set(m.first, mu.get(m.first) + v);
    return mu;
}

} // namespace detail

// ---------------------------------------------------------------------------
// linear normalization (involution -> sigma, integral -> h, linear part -> Lambda)

inline LinearNormalized linear_normalize(const ReversiblePair& pair, double tol = 1e-8) {
    int N = pair.H.N;
    FD phi = pair.phi, tau = pair.tau;
    TS H = pair.H;
    double scale = std::max({phi.comp1.norm(), H.norm(), 1.0});

    { // validate the defining relations
        FD tt = compose(tau, tau);
        if ((tt.comp1 - TS::xi1(N)).norm() > tol * scale ||
            (tt.comp2 - TS::xi2(N)).norm() > tol * scale)
            throw DomainError("linear_normalize: tau is not an involution");
        FD lhs = compose(tau, compose(phi, tau));
        FD rhs = invert_diffeo(phi);
        if ((lhs.comp1 - rhs.comp1).norm() > 1e3 * tol * scale)
            throw DomainError("linear_normalize: tau does not reverse phi");
        if ((compose(H, phi) - H).norm() > tol * scale)
            throw DomainError("linear_normalize: H is not a first integral of phi");
        if ((compose(H, tau) - H).norm() > tol * scale)
            throw DomainError("linear_normalize: H is not tau-invariant");
        if (std::abs(H.get(0, 0)) > tol * scale || std::abs(H.get(1, 0)) > tol * scale ||
            std::abs(H.get(0, 1)) > tol * scale)
            throw DomainError("linear_normalize: H must have a critical point at 0");
    }

    FD total = FD::identity(N);
    auto apply = [&](const FD& T) {
        FD Tinv = invert_diffeo(T);
        phi = compose(T, compose(phi, Tinv));
        tau = compose(T, compose(tau, Tinv));
        H = compose(H, Tinv);
        total = compose(T, total);
    };

    // 1) linear part of tau -> sigma
    {
        std::array<cplx, 4> T = tau.linear_part(); // row-major [a b; c d]
        bool is_sigma = std::abs(T[0]) < tol && std::abs(T[3]) < tol &&
                        std::abs(T[1] - cplx(1.0)) < tol && std::abs(T[2] - cplx(1.0)) < tol;
        if (!is_sigma) {
            cplx tr = T[0] + T[3], det = T[0] * T[3] - T[1] * T[2];
            if (std::abs(tr) > tol || std::abs(det + cplx(1.0)) > tol)
                throw DomainError("linear_normalize: linear part of tau is not a reflection");
            // eigenvectors for +1 and -1: (T - (-1)I)v ~ +1 eigenvector etc.
            auto col = [&](cplx shift) -> std::array<cplx, 2> {
                // a nonzero column of T + shift*I
                std::array<cplx, 2> c0{T[0] + shift, T[2]}, c1{T[1], T[3] + shift};
                double n0 = std::abs(c0[0]) + std::abs(c0[1]);
                double n1 = std::abs(c1[0]) + std::abs(c1[1]);
                return (n0 >= n1) ? c0 : c1;
            };
            std::array<cplx, 2> vp = col(cplx(1.0));  // (T+I) column -> eigenvector for +1
            std::array<cplx, 2> vm = col(cplx(-1.0)); // (T-I) column -> eigenvector for -1
            // Cinv maps (1,1) -> vp, (1,-1) -> vm
            std::array<cplx, 4> Cinv{(vp[0] + vm[0]) / 2.0, (vp[0] - vm[0]) / 2.0,
                                     (vp[1] + vm[1]) / 2.0, (vp[1] - vm[1]) / 2.0};
            cplx dC = Cinv[0] * Cinv[3] - Cinv[1] * Cinv[2];
            if (std::abs(dC) < tol)
                throw DomainError("linear_normalize: degenerate eigenbasis of tau");
            apply(FD::linear(Cinv[3] / dC, -Cinv[1] / dC, -Cinv[2] / dC, Cinv[0] / dC, N));
        }
        // 2) averaging: Psi = (id + sigma.tau)/2 conjugates tau to sigma exactly
        FD psi{cplx(0.5) * (TS::xi1(N) + tau.comp2), cplx(0.5) * (TS::xi2(N) + tau.comp1)};
        apply(psi);
        if ((tau.comp1 - TS::xi2(N)).norm() > 1e3 * tol * scale)
            throw InternalConsistencyError("linear_normalize: involution averaging failed");
        tau = FD::sigma(N); // snap
    }

    bool minus_sigma = false;
    cplx lambda(1.0, 0.0);
    // 3) classify and straighten the linear part A of phi
    {
        std::array<cplx, 4> A = phi.linear_part();
        cplx tr = A[0] + A[3], det = A[0] * A[3] - A[1] * A[2];
        cplx disc = std::sqrt(tr * tr - 4.0 * det);
        cplx e1 = (tr + disc) / 2.0, e2 = (tr - disc) / 2.0;
        bool offdiag_small = std::abs(A[1]) < tol && std::abs(A[2]) < tol;
        if (std::abs(e1 - e2) > 1e-6) {
            if (std::abs(e1 - cplx(1.0)) < tol && std::abs(e2 + cplx(1.0)) < tol) {
                // eigenvalues {1,-1}: theory forces A = -sigma
                if (std::abs(A[0]) > 1e3 * tol || std::abs(A[1] + cplx(1.0)) > 1e3 * tol ||
                    std::abs(A[2] + cplx(1.0)) > 1e3 * tol)
                    throw DomainError("linear_normalize: linear part with eigenvalues {1,-1} is not -sigma");
                minus_sigma = true;
            } else if (!offdiag_small) {
                // diagonalize with columns (v, sigma v) to stay sigma-equivariant
                std::array<cplx, 2> v{A[1], e1 - A[0]};
                if (std::abs(v[0]) + std::abs(v[1]) < tol) v = {e1 - A[3], A[2]};
                std::array<cplx, 4> Pinv{v[0], v[1], v[1], v[0]}; // columns v, sigma v
                cplx dP = Pinv[0] * Pinv[3] - Pinv[1] * Pinv[2];
                if (std::abs(dP) < 1e-12)
                    throw DomainError("linear_normalize: cannot diagonalize linear part sigma-equivariantly");
                apply(FD::linear(Pinv[3] / dP, -Pinv[1] / dP, -Pinv[2] / dP, Pinv[0] / dP, N));
                A = phi.linear_part();
                lambda = A[0];
            } else {
                lambda = A[0];
            }
        } else {
            // equal eigenvalues: must be A = +-I
            if (!offdiag_small || std::abs(A[0] - A[3]) > tol)
                throw DomainError("linear_normalize: non-diagonalizable linear part");
            lambda = A[0];
            if (std::abs(lambda - cplx(1.0)) > tol && std::abs(lambda + cplx(1.0)) > tol)
                throw DomainError("linear_normalize: linear part +-I expected");
        }
    }

    // 4) quadratic part of H -> h (sigma-equivariant, commutes with Lambda)
    {
        cplx alpha = H.get(2, 0), beta = H.get(1, 1), alpha2 = H.get(0, 2);
        if (std::abs(alpha - alpha2) > 1e3 * tol * scale)
            throw InternalConsistencyError("linear_normalize: H quadratic part is not sigma-invariant");
        if (std::abs(beta * beta - 4.0 * alpha * alpha2) < tol * scale)
            throw DomainError("linear_normalize: degenerate quadratic part of H");
        cplx cH; // quadratic part becomes cH * h; absorbed by scaling xi -> sqrt(cH) xi
        if (std::abs(alpha) <= 1e-10 * std::max(1.0, std::abs(beta))) {
            cH = beta;
        } else {
            // pick b with alpha*b^2 + beta*b + alpha = 0 so that H o L kills xi1^2, xi2^2
            cplx disc = std::sqrt(beta * beta - 4.0 * alpha * alpha);
            cplx b1 = (-beta + disc) / (2.0 * alpha), b2 = (-beta - disc) / (2.0 * alpha);
            cplx b = (std::abs(b1) <= std::abs(b2)) ? b1 : b2;
            if (std::abs(b * b - cplx(1.0)) < tol)
                throw DomainError("linear_normalize: degenerate quadratic part of H (b^2=1)");
            apply(invert_diffeo(FD::linear(cplx(1.0), b, b, cplx(1.0), N)));
            cH = H.get(1, 1);
        }
        cplx a = std::sqrt(cH);
        apply(FD::linear(a, cplx(0.0), cplx(0.0), a, N));
    }

    // 5) sigma-equivariant Morse reduction: kill H - h degree by degree
    for (int d = 3; d <= N; ++d) {
        TS dev = (H - TS::h(N)).homogeneous(d);
        if (dev.norm() <= 1e-13 * scale) continue;
        // solve xi2*V1 + xi1*(V1 o sigma) = dev for homogeneous V1 of degree d-1
        TS V1(N);
        for (auto& [m, v] : dev.c) {
            int m1 = m.first, m2 = m.second;
            if (m1 < m2) continue; // handle each sigma-orbit once
            if (m2 == 0) {
                V1.add_to(0, m1 - 1, v); // from the xi1*(V1 o sigma) term
            } else if (m1 == m2) {
                V1.add_to(m1, m2 - 1, v / 2.0);
            } else {
                V1.add_to(m1, m2 - 1, v / 2.0);
                V1.add_to(m2, m1 - 1, v / 2.0);
            }
        }
        FD psi{TS::xi1(N) + V1, TS::xi2(N) + detail::compose_sigma(V1)};
        apply(psi);
    }
    if ((H - TS::h(N)).norm() > 1e-7 * scale)
        throw InternalConsistencyError("linear_normalize: Morse reduction did not converge");

    // 6) order p of the linear part
    int p = 1;
    if (minus_sigma) {
        p = 2;
        lambda = cplx(1.0, 0.0);
    } else {
        bool found = false;
        for (int q = 1; q <= 64; ++q)
            if (std::abs(std::pow(lambda, q) - cplx(1.0)) < 1e-6) {
                p = q;
                found = true;
                break;
            }
        if (!found)
            throw DomainError("linear_normalize: linear part is not of finite order (not parabolic)");
        // snap lambda to the exact root of unity
        double ang = std::arg(lambda);
        long r = std::lround(ang * p / (2.0 * M_PI));
        lambda = std::exp(cplx(0.0, 2.0 * M_PI * double(r) / double(p)));
        TS c1 = phi.comp1, c2 = phi.comp2;
        c1.set(1, 0, lambda);
        c2.set(0, 1, cplx(1.0) / lambda);
        phi = FD{c1, c2};
    }

    LinearNormalized out;
    out.pair = PreparedPair{phi, p, minus_sigma, lambda};
    out.transform = total;
    return out;
}

// ---------------------------------------------------------------------------
// Jordan-like decomposition phi = phi_s o phi_u

inline std::pair<FD, FD> jordan_decompose(const FD& phi, int p) {
    FD phip = iterate(phi, p);
    if (!phip.tangent_to_identity(1e-8))
        throw DomainError("jordan_decompose: phi^p is not tangent to the identity");
    VF X = log_diffeo(phip);
    X.x1 = cplx(1.0 / p) * X.x1;
    X.x2 = cplx(1.0 / p) * X.x2;
    if (X.eform) X.g = cplx(1.0 / p) * X.g;
    FD phi_u = exp_flow(VF::from_components(X.x1, X.x2));
    FD phi_s = compose(phi, invert_diffeo(phi_u));
    return {phi_s, phi_u};
}

// ---------------------------------------------------------------------------
// prepare: averaging making phi linear modulo the fixed-point ideal

inline PreparedPair prepare(const LinearNormalized& cand) {
    PreparedPair pp = cand.pair;
    int N = pp.phi.comp1.N, p = pp.p;
    for (int pass = 0; pass < 12; ++pass) {
        FD phi = pp.phi, phiinv = invert_diffeo(phi);
        // iterates phi^j and phi^{-j}, j = 1..p
        std::vector<FD> fwd(p + 1, FD::identity(N)), bwd(p + 1, FD::identity(N));
        for (int j = 1; j <= p; ++j) {
            fwd[j] = compose(phi, fwd[j - 1]);
            bwd[j] = compose(phiinv, bwd[j - 1]);
        }
        TS a1(N), a2(N);
        for (int j = 1; j <= p; ++j) {
            // Lambda^j o phi^{-j} + Lambda^{-j} o phi^{j}
            auto lin_after = [&](const FD& F, int jj) {
                FD L = pp.minus_sigma
                           ? ((((jj % 2) + 2) % 2 == 0) ? FD::identity(N)
                                                        : FD::linear(cplx(0.0), cplx(-1.0),
                                                                     cplx(-1.0), cplx(0.0), N))
                           : FD::linear(std::pow(pp.lambda, jj), cplx(0.0), cplx(0.0),
                                        std::pow(pp.lambda, -jj), N);
                return compose(L, F);
            };
            FD u = lin_after(bwd[j], j), v = lin_after(fwd[j], -j);
            a1 = a1 + u.comp1 + v.comp1;
            a2 = a2 + u.comp2 + v.comp2;
        }
        FD psi{cplx(1.0 / (2.0 * p)) * a1, cplx(1.0 / (2.0 * p)) * a2};
        // radial correction restoring h
        FD psiinv = invert_diffeo(psi);
        TS htilde = compose(TS::h(N), psiinv);
        TS q = divide_exact(htilde, TS::h(N), 1e-8);
        TS r = detail::pow_unit2(q, 0.5);
        FD rad{r * TS::xi1(N), r * TS::xi2(N)};
        FD T = compose(rad, psi), Tinv = invert_diffeo(T);
        FD newphi = compose(T, compose(pp.phi, Tinv));
        double change = (newphi.comp1 - pp.phi.comp1).norm() + (newphi.comp2 - pp.phi.comp2).norm();
        pp.phi = newphi;
        if (change < 1e-12) break;
    }
    // sanity: h is preserved, sigma still reverses phi
    double scale = std::max(1.0, pp.phi.comp1.norm());
    if ((compose(TS::h(N), pp.phi) - TS::h(N)).norm() > 1e-7 * scale)
        throw InternalConsistencyError("prepare: h is not preserved");
    FD lhs = compose(FD::sigma(N), compose(pp.phi, FD::sigma(N)));
    FD rhs = invert_diffeo(pp.phi);
    if ((lhs.comp1 - rhs.comp1).norm() > 1e-6 * scale)
        throw InternalConsistencyError("prepare: reversibility lost");
    return pp;
}

// ---------------------------------------------------------------------------
// fixed-point ideal data

struct IdealData {
    bool case_O = false;
    int s = 0;
    int K = 0;  // degree of P in the division variable (k for case B, kp odd for case C)
    int xw = 1; // weight of the division variable (p for case B, 1 for case C)
    SS P;       // distinguished polynomial (in u for case B, odd in w for case C)
    WeierstrassPoly P_report;
};

namespace detail {

inline FD lift(const FD& f, int order) {
    return FD{f.comp1.retruncate(order), f.comp2.retruncate(order)};
}

// project an E-form coefficient onto exact (sigma, Lambda)-invariance, so the
// field g*E is a genuine reversible integrable field at every computed degree
// (the discarded parts are numerical noise for a valid input)
inline TS project_invariant(const TS& g, int p, bool minus_sigma) {
    TS r(g.N);
    for (auto& [m, v] : g.c) {
        if (minus_sigma) {
            if ((m.first + m.second) % 2 == 0) continue; // g is odd when Lambda = -sigma
        } else {
            if ((((m.first - m.second) % p) + p) % p != 0) continue;
        }
        r.c[m] = v;
    }
    TS sym(g.N);
    for (auto& [m, v] : r.c) sym.add_to(m.second, m.first, v);
    return cplx(0.5) * (r + sym);
}

// truncate reported jets to the level actually determined by an order-N input:
// a coefficient of x^j in h^s(...) is determined to h-order (N - 2s - xw*j)/2
inline TS1 determined(const TS1& jet, int N, int s, int xw, int j) {
    int lvl = (N - 2 * s - xw * j) / 2;
    return jet.retruncate(std::max(lvl, 0));
}

inline void truncate_report(WeierstrassPoly& P, int N, int s, int xw) {
    int step = (P.kind == VariableKind::Utilde) ? 2 * xw : xw;
    int off = (P.kind == VariableKind::Utilde) ? xw : 0;
    for (size_t j = 0; j < P.coeffs.size(); ++j)
        P.coeffs[j] = determined(P.coeffs[j], N, s, 1, (int)j * step + off);
}

inline WeierstrassPoly report_poly(const SS& P, int K, bool minus_sigma) {
    WeierstrassPoly out;
    if (!minus_sigma) {
        out.k = K;
        out.kind = VariableKind::U;
        for (int j = 0; j < K; ++j) out.coeffs.push_back(P.coeff_jet(j));
    } else {
        // odd polynomial in w: report the coefficients of Ptilde(utilde,h)
        out.k = (K - 1) / 2;
        out.kind = VariableKind::Utilde;
        for (int j = 0; j < out.k; ++j) out.coeffs.push_back(P.coeff_jet(2 * j + 1));
    }
    return out;
}

// symmetrized ideal generator f2 of Lemma P, and the raw f
inline std::pair<TS, TS> ideal_f2(const PreparedPair& pp) {
    int N = pp.phi.comp1.N, p = pp.p;
    FD phip = iterate(pp.phi, p);
    TS d1 = phip.comp1 - TS::xi1(N);
    TS f = d1.div_monomial(1, 0);
    TS f1 = cplx(0.5) * (f + compose_sigma(f));
    TS f2(N);
    if (!pp.minus_sigma) {
        for (int j = 0; j < p; ++j) f2 = f2 + compose_lambda(f1, pp, j);
        f2 = cplx(1.0 / p) * f2;
    } else {
        f2 = cplx(0.5) * (f1 - compose_minus_sigma(f1));
    }
    return {f2, f};
}

} // namespace detail

inline IdealData ideal_generator(const PreparedPair& pp) {
    int N = pp.phi.comp1.N;
    PreparedPair lifted{detail::lift(pp.phi, N + 2), pp.p, pp.minus_sigma, pp.lambda};
    FD phip = iterate(lifted.phi, pp.p);
    IdealData out;
    double scale = std::max(1.0, pp.phi.comp1.norm());
    if ((phip.comp1 - TS::xi1(N + 2)).norm() < 1e-10 * scale &&
        (phip.comp2 - TS::xi2(N + 2)).norm() < 1e-10 * scale) {
        out.case_O = true;
        return out;
    }
    auto [f2, f] = detail::ideal_f2(lifted);
    TS g2 = f2;
    out.s = detail::h_multiplicity(g2, 1e-9);
    out.xw = pp.minus_sigma ? 1 : pp.p;
    SS gs = to_symmetric(g2.chop(1e-11), out.xw);
    auto [P, W] = weierstrass_prepare(gs);
    out.K = P.degx();
    out.P = P;
    out.P_report = detail::report_poly(P, out.K, pp.minus_sigma);
    detail::truncate_report(out.P_report, N - 1, out.s, out.xw);
    return out;
}

// ---------------------------------------------------------------------------
// infinitesimal generator of phi^p and its prepared form

inline VF formal_generator(const PreparedPair& pp) {
    int N = pp.phi.comp1.N;
    FD phip = iterate(pp.phi, pp.p);
    VF X = log_diffeo(phip);

    // cross-check against the closed form  f * log(1+E.f)/(E.f) * E
    IdealData id = ideal_generator(pp);
    if (!id.case_O) {
        TS f = (phip.comp1 - TS::xi1(N)).div_monomial(1, 0);
        TS Ef = lie_derivative(VF::E(N), f);
        // log(1+Ef)/Ef expanded directly: sum_m (-1)^m Ef^m/(m+1)
        TS ratio(N), pw = TS::constant(cplx(1.0), N);
        for (int m = 0; m <= N; ++m) {
            ratio = ratio + cplx((m % 2 ? -1.0 : 1.0) / (m + 1)) * pw;
            if (pw.is_zero()) break;
            pw = pw * Ef;
        }
        TS closed = f * ratio;
        // the E-form of X is only determined to degree N-1 by components
        TS gen = X.to_eform(1e-6);
        TS diff = (gen - closed).retruncate(N - 1);
        // the disagreement must be divisible by h^s P^2
        TS den = id.P.to_xi();
        den = den * den;
        for (int i = 0; i < id.s; ++i) den = den.mul_monomial(1, 1);
        if (diff.norm() > 1e-9 * std::max(1.0, gen.norm())) {
            try {
                (void)divide_exact(diff.chop(1e-12), den, 1e-4);
            } catch (const DomainError&) {
                throw InternalConsistencyError(
                    "formal_generator: closed form disagrees with log beyond h^s P^2");
            }
        }
    }
    return X;
}

namespace detail {

// extraction of (s, P, Q, Rhat, mu, c) from an E-form generator coefficient g
struct GenData {
    int s = 0, K = 0, xw = 1;
    SS P, Q, Rhat;
    TS1 mu;
    cplx c{0.0};
    TS g; // the E-form coefficient it was extracted from
    bool zero = false;
};

inline GenData extract_generator_data(const TS& g_in, int xw) {
    GenData out;
    out.xw = xw;
    out.g = g_in;
    int N = g_in.N;
    if (g_in.norm() < 1e-13) {
        out.zero = true;
        return out;
    }
    TS gh = g_in;
    out.s = h_multiplicity(gh, 1e-9);
    SS gs = to_symmetric(gh, xw);
    auto [P, W] = weierstrass_prepare(gs);
    out.K = P.degx();
    out.P = P;
    // Uhat = h^s P / g = 1/W  (sigma- and Lambda-invariant unit); inverting
    // the Weierstrass unit avoids a global division by g
    TS U = W.to_xi().inv();
    SS Us = to_symmetric(U, xw);
    if (out.K == 0) {
        out.Q = SS::constant(Us.coeff_jet(0).get(0), N, xw);
        out.Rhat = Us;
    } else {
        auto [Q, R] = weierstrass_divide(Us, P);
        out.Q = Q;
        out.Rhat = R;
    }
    out.mu = diagonal_jets(out.Rhat.to_xi());
    cplx q00 = out.Q.coeff_jet(0).get(0);
    if (std::abs(q00) < 1e-10)
        throw DomainError("generator extraction: Q(0,0) = 0");
    out.c = cplx(1.0) / q00;
    return out;
}

} // namespace detail

inline PreparedGenerator prepared_generator(const PreparedPair& pp) {
    int N0 = pp.phi.comp1.N;
    int N = N0 + 4; // internal padding: all degrees <= N0 stay exact
    VF X = formal_generator(pp); // includes the closed-form consistency check
    TS g = detail::project_invariant(X.to_eform(1e-6).retruncate(N0 - 1), pp.p, pp.minus_sigma)
               .retruncate(N);
    int xw = pp.minus_sigma ? 1 : pp.p;
    detail::GenData gd = detail::extract_generator_data(g, xw);
    if (gd.zero) throw DomainError("prepared_generator: case O has no prepared generator");

    // dual route for Q: symmetrized logarithmic formula, reduced mod P
    if (gd.K > 0) {
        FD phip = iterate(pp.phi, pp.p);
        TS d1 = phip.comp1 - TS::xi1(N0);
        TS den = gd.P.to_xi().mul_monomial(1, 0);
        for (int i = 0; i < gd.s; ++i) den = den.mul_monomial(1, 1);
        TS ftilde = divide_exact(d1, den, 1e-7);
        TS EP = lie_derivative(VF::E(N), gd.P.to_xi());
        for (int i = 0; i < gd.s; ++i) EP = EP.mul_monomial(1, 1); // h^s E.P
        TS A1 = ftilde * EP;
        TS A2 = cplx(-1.0) * (detail::compose_sigma(ftilde) * EP);
        TS Qx = cplx(0.5) * (divide_exact(EP, detail::log1p_series(A1), 1e-6) -
                             divide_exact(EP, detail::log1p_series(A2), 1e-6));
        // the chop is relative to the norm of Qx, whose coefficients can span
        // many orders of magnitude; keep it near machine precision so the
        // O(1) low-degree jets survive for steeply growing series
        SS Qs = to_symmetric(Qx.chop(1e-13), 1);
        // reduce mod P in the weight-1 representation
        SS P1 = gd.P;
        if (xw != 1) {
            SS u1 = to_symmetric(power_sum<cplx>(xw, N), 1);
            SS acc = SS::zero(N, 1);
            for (int j = gd.P.degx(); j >= 0; --j) {
                acc = acc * u1;
                TS1 jet = gd.P.coeff_jet(j);
                for (int b = 0; b <= jet.N; ++b)
                    if (std::abs(jet.get(b)) > 0) acc = acc.with_monomial(0, b, jet.get(b));
            }
            P1 = acc;
        }
        auto [Q2, R2] = weierstrass_divide(Qs, P1);
        SS Q1 = gd.Q;
        if (xw != 1) Q1 = to_symmetric(gd.Q.to_xi(), 1);
        // compare only jets determined by the order-N0 input
        for (int j = 0; j <= std::max(Q1.degx(), Q2.degx()); ++j) {
            int lvl = std::max((N0 - 2 - 2 * gd.s - xw * gd.K - j) / 2, 0);
            TS1 dj = (Q2.coeff_jet(j) - Q1.coeff_jet(j)).retruncate(lvl);
            if (dj.norm() > 1e-5 * std::max(1.0, 1.0 / std::abs(gd.c)))
                throw InternalConsistencyError("prepared_generator: Q dual-route mismatch");
        }
    }

    PreparedGenerator out;
    out.P = detail::report_poly(gd.P, gd.K, pp.minus_sigma);
    detail::truncate_report(out.P, N0 - 1, gd.s, xw);
    out.Q = gd.Q;
    for (int j = 0; j <= out.Q.degx(); ++j)
        out.Q.set_jet(j, detail::determined(out.Q.coeff_jet(j), N0 - 2 - xw * gd.K, gd.s, 1, j * xw));
    out.Rhat = gd.Rhat.to_xi().retruncate(std::max(N0 - 2 - 2 * gd.s - 2 * xw * gd.K, 0));
    out.mu_jets = gd.mu.retruncate(std::max((N0 - 2 - 2 * gd.s - 2 * xw * gd.K) / 2, 0));
    out.s = gd.s;
    out.k_times_p = gd.K * gd.xw;
    return out;
}

// ---------------------------------------------------------------------------
// canonicalization machinery

namespace detail {

// polynomial in t with TruncSeries2 coefficients (for the nonautonomous flow)
struct TPoly {
    std::vector<TS> c; // c[j] = coefficient of t^j
    int N;
    explicit TPoly(int order) : N(order) {}
    static TPoly from(const TS& f) {
        TPoly r(f.N);
        r.c.push_back(f);
        return r;
    }
    void trim() {
        while (!c.empty() && c.back().is_zero()) c.pop_back();
    }
    friend TPoly operator+(const TPoly& a, const TPoly& b) {
        TPoly r(std::min(a.N, b.N));
        r.c.resize(std::max(a.c.size(), b.c.size()), TS(r.N));
        for (size_t j = 0; j < r.c.size(); ++j) {
            TS s(r.N);
            if (j < a.c.size()) s = s + a.c[j];
            if (j < b.c.size()) s = s + b.c[j];
            r.c[j] = s;
        }
        r.trim();
        return r;
    }
    friend TPoly operator*(const TPoly& a, const TPoly& b) {
        TPoly r(std::min(a.N, b.N));
        if (a.c.empty() || b.c.empty()) return r;
        r.c.resize(a.c.size() + b.c.size() - 1, TS(r.N));
        for (size_t i = 0; i < a.c.size(); ++i) {
            if (a.c[i].is_zero()) continue;
            for (size_t j = 0; j < b.c.size(); ++j) r.c[i + j] = r.c[i + j] + a.c[i] * b.c[j];
        }
        r.trim();
        return r;
    }
    TPoly integrate_t() const { // \int_0^t
        TPoly r(N);
        r.c.resize(c.size() + 1, TS(N));
        for (size_t j = 0; j < c.size(); ++j) r.c[j + 1] = cplx(1.0 / double(j + 1)) * c[j];
        r.trim();
        return r;
    }
    TS at_one() const {
        TS r(N);
        for (auto& f : c) r = r + f;
        return r;
    }
};

// evaluate a series f at a t-dependent tangent-to-identity substitution
inline TPoly compose_tp(const TS& f, const TPoly& g1, const TPoly& g2) {
    int N = std::min({f.N, g1.N, g2.N});
    std::vector<TPoly> p1, p2; // cached powers
    p1.push_back(TPoly::from(TS::constant(cplx(1.0), N)));
    p2.push_back(TPoly::from(TS::constant(cplx(1.0), N)));
    auto pw = [&](std::vector<TPoly>& cache, const TPoly& base, int k) -> const TPoly& {
        while ((int)cache.size() <= k) cache.push_back(cache.back() * base);
        return cache[k];
    };
    TPoly r(N);
    for (auto& [m, v] : f.c) {
        TPoly term = pw(p1, g1, m.first) * pw(p2, g2, m.second);
        for (auto& coef : term.c) coef = v * coef;
        r = r + term;
    }
    return r;
}

// time-1 map of the nonautonomous field  dxi/dt = W(t, xi), W = sum_j t^j Wj
// with each Wj of order >= 2 in xi (Picard iteration, order gain per step)
inline FD nonautonomous_time1(const std::vector<std::pair<TS, TS>>& W, int N) {
    TPoly f1 = TPoly::from(TS::xi1(N)), f2 = TPoly::from(TS::xi2(N));
    for (int it = 0; it < N; ++it) {
        TPoly a1(N), a2(N);
        for (size_t j = 0; j < W.size(); ++j) {
            TPoly w1 = compose_tp(W[j].first, f1, f2);
            TPoly w2 = compose_tp(W[j].second, f1, f2);
            // multiply by t^j
            w1.c.insert(w1.c.begin(), j, TS(N));
            w2.c.insert(w2.c.begin(), j, TS(N));
            a1 = a1 + w1;
            a2 = a2 + w2;
        }
        TPoly n1 = TPoly::from(TS::xi1(N)) + a1.integrate_t();
        TPoly n2 = TPoly::from(TS::xi2(N)) + a2.integrate_t();
        double change = 0;
        {
            TS d1 = n1.at_one() - f1.at_one(), d2 = n2.at_one() - f2.at_one();
            change = d1.norm() + d2.norm();
        }
        f1 = n1;
        f2 = n2;
        if (change == 0.0) break;
    }
    return FD{f1.at_one(), f2.at_one()};
}

// jet-coefficient linear solve A(h) x = b(h), order by order in h
inline std::vector<TS1> solve_jet_system(const std::vector<std::vector<TS1>>& A,
                                         const std::vector<TS1>& b, int horder) {
    int n = (int)b.size();
    // invert A0 by Gaussian elimination
    std::vector<std::vector<cplx>> M(n, std::vector<cplx>(2 * n, cplx(0.0)));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) M[i][j] = A[i][j].get(0);
        M[i][n + i] = cplx(1.0);
    }
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
        if (std::abs(M[piv][col]) < 1e-12)
            throw NumericalError("homological solve: singular leading matrix");
        std::swap(M[piv], M[col]);
        cplx d = M[col][col];
        for (int j = 0; j < 2 * n; ++j) M[col][j] /= d;
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            cplx f = M[r][col];
            if (f == cplx(0.0)) continue;
            for (int j = 0; j < 2 * n; ++j) M[r][j] -= f * M[col][j];
        }
    }
    // x_m = A0^{-1} (b_m - sum_{i>=1} A_i x_{m-i})
    std::vector<TS1> x(n, TS1(horder));
    for (int m = 0; m <= horder; ++m) {
        std::vector<cplx> rhs(n, cplx(0.0));
        for (int i = 0; i < n; ++i) {
            rhs[i] = b[i].get(m);
            for (int j = 0; j < n; ++j)
                for (int ord = 1; ord <= m; ++ord) rhs[i] -= A[i][j].get(ord) * x[j].get(m - ord);
        }
        for (int i = 0; i < n; ++i) {
            cplx xi(0.0);
            for (int j = 0; j < n; ++j) xi += M[i][n + j] * rhs[j];
            x[i].set(m, x[i].get(m) + xi);
        }
    }
    return x;
}

// one evaluation of the homological right-hand side: given y (jets, size K+1,
// P = (1+y_K)u^K + y_{K-1}u^{K-1} + ... + y_0) and fixed z (jets, z_j for
// j=1..K-1), q0 = Q_0(h) jets, solve for omega (size K+1)
inline std::vector<TS1> homological_omega(const std::vector<TS1>& y, const std::vector<TS1>& z,
                                          const TS1& q0, double t, int K, int hq, int horder) {
    int n = 2 * K;
    std::vector<std::vector<TS1>> A(n, std::vector<TS1>(n, TS1(horder)));
    std::vector<TS1> b(n, TS1(horder));
    auto Pj = [&](int j) {
        TS1 r = y[j].retruncate(horder);
        if (j == K) r.set(0, r.get(0) + cplx(1.0));
        return r;
    };
    TS1 zero(horder);
    auto Zi = [&](int i) { return (i >= 1 && i <= K - 1) ? z[i].retruncate(horder) : zero; };
    // columns 0..K: omega_j;  columns K+1..2K-1: g_a (a = 0..K-2)
    // equations: coefficients of u^0..u^{2K-1}
    // (Q_0(h) + tZ) * Omega
    TS1 q0j = q0.retruncate(horder);
    for (int j = 0; j <= K; ++j) {
        A[j][j] = A[j][j] + q0j;
        for (int i = 1; i <= K - 1; ++i)
            if (i + j < n) A[i + j][j] = A[i + j][j] + cplx(t) * Zi(i);
    }
    // G-terms: for column a (unknown g_a): P_j [ (j-a-1) u^{a+j+1} - 4 h^q (j-a) u^{a+j-1} ]
    TS1 h4(horder);
    if (hq <= horder) h4.set(hq, cplx(4.0));
    for (int a = 0; a <= K - 2; ++a) {
        int colidx = K + 1 + a;
        for (int j = 0; j <= K; ++j) {
            TS1 pj = Pj(j);
            if (pj.is_zero()) continue;
            int r1 = a + j + 1;
            if (r1 < n) A[r1][colidx] = A[r1][colidx] + cplx(double(j - a - 1)) * pj;
            int r2 = a + j - 1;
            if (r2 >= 0 && r2 < n) A[r2][colidx] = A[r2][colidx] - (cplx(double(j - a)) * (h4 * pj));
        }
    }
    // b = Z*P
    for (int i = 1; i <= K - 1; ++i) {
        TS1 zi = Zi(i);
        if (zi.is_zero()) continue;
        for (int j = 0; j <= K; ++j) {
            if (i + j >= n) continue;
            b[i + j] = b[i + j] + zi * Pj(j);
        }
    }
    std::vector<TS1> x = solve_jet_system(A, b, horder);
    return std::vector<TS1>(x.begin(), x.begin() + K + 1);
}

} // namespace detail

// ---------------------------------------------------------------------------
// canonical normal form

namespace detail {

// leaf-wise flow of the Q0 lemma removing the u-dependence of Q at h = 0
inline TS q0_flow(const TS& g, const GenData& gd, int p_for_E) {
    int N = g.N;
    int K = gd.K, xw = gd.xw;
    // numerator  N(u) = sum_{j=1}^{K-1} Q_j(0)/(K-j) u^{j-1}
    // denominator D(t,u) = [Q(0,0) + mu(0) u^K] + t [Q(u,0) - Q(0,0)]
    TS u = (xw == 1) ? (TS::xi1(N) + TS::xi2(N)) : power_sum<cplx>(xw, N);
    TS numer(N), D1(N);
    TS D0 = TS::constant(gd.Q.coeff_jet(0).get(0), N);
    {
        TS upow = TS::constant(cplx(1.0), N);
        for (int j = 1; j <= K; ++j) {
            upow = upow * u;
            if (j <= K - 1) {
                cplx qj = gd.Q.coeff_jet(j).get(0);
                D1 = D1 + qj * upow; // part of Q(u,0) - Q(0,0)
            }
        }
        D0 = D0 + gd.mu.get(0) * upow; // + mu(0) u^K
        TS up = TS::constant(cplx(1.0), N);
        for (int j = 1; j <= K - 1; ++j) {
            cplx qj = gd.Q.coeff_jet(j).get(0);
            numer = numer + (qj / double(K - j)) * up;
            up = up * u;
        }
    }
    // factor (1/p)(xi1^p - xi2^p) of the field, whose square is u^2 - 4h^q up
    // to the 1/p^2 normalization matching du/dt along the flow
    TS v(N);
    if (xw == 1) {
        v = TS::xi1(N) - TS::xi2(N);
    } else {
        v.add_to(xw, 0, cplx(1.0 / xw));
        v.add_to(0, xw, cplx(-1.0 / xw));
    }
    // W(t, xi) = numer/(D0 + t D1) * v * E  as E-form; expand 1/(D0 + t D1)
    TS D0inv = D0.inv();
    std::vector<std::pair<TS, TS>> W;
    TS base = numer * v * D0inv;
    TS ratio = D1 * D0inv;
    TS term = base;
    for (int j = 0; j <= N; ++j) {
        TS gj = term;
        if (gj.is_zero() && j > 0) break;
        W.push_back({gj * TS::xi1(N), cplx(-1.0) * (gj * TS::xi2(N))});
        term = cplx(-1.0) * (term * ratio);
    }
    FD flow = nonautonomous_time1(W, N);
    // Psi = xi o exp(-Y)|_{t=1}: try both orientations, keep the one that
    // shrinks the u-dependence of Q(.,0)
    auto qdev = [&](const TS& gg) {
        GenData d2 = extract_generator_data(gg, xw);
        double dev = 0;
        for (int j = 1; j < d2.K; ++j) dev += std::abs(d2.Q.coeff_jet(j).get(0));
        return dev;
    };
    VF X = VF::from_eform(g);
    TS cand1 = pushforward(flow, X).to_eform(1e-6);
    TS cand2 = pushforward(invert_diffeo(flow), X).to_eform(1e-6);
    return (qdev(cand1) <= qdev(cand2)) ? cand1 : cand2;
}

// homological parameter flow: integrate dy/dt = omega from t=1 to t=0
inline std::vector<TS1> homological_flow(const GenData& gd, int hq, int horder) {
    int K = gd.K;
    TS1 q0 = gd.Q.coeff_jet(0).retruncate(horder);
    std::vector<TS1> z(K, TS1(horder));
    for (int j = 1; j <= K - 1; ++j) {
        TS1 qj = gd.Q.coeff_jet(j).retruncate(horder);
        z[j] = qj; // Q_j(h); vanishes at h=0 after the leaf-wise step
    }
    std::vector<TS1> y(K + 1, TS1(horder));
    for (int j = 0; j < K; ++j) y[j] = gd.P.coeff_jet(j).retruncate(horder);
    // RK4 from t=1 to t=0
    int steps = 40;
    double dt = -1.0 / steps;
    double t = 1.0;
    auto rhs = [&](double tt, const std::vector<TS1>& yy) {
        return homological_omega(yy, z, q0, tt, K, hq, horder);
    };
    auto axpy = [&](const std::vector<TS1>& base, double fac, const std::vector<TS1>& d) {
        std::vector<TS1> r = base;
        for (int i = 0; i <= K; ++i) r[i] = r[i] + cplx(fac) * d[i];
        return r;
    };
    for (int sstep = 0; sstep < steps; ++sstep) {
        auto k1 = rhs(t, y);
        auto k2 = rhs(t + dt / 2, axpy(y, dt / 2, k1));
        auto k3 = rhs(t + dt / 2, axpy(y, dt / 2, k2));
        auto k4 = rhs(t + dt, axpy(y, dt, k3));
        for (int i = 0; i <= K; ++i)
            y[i] = y[i] + cplx(dt / 6.0) * (k1[i] + cplx(2.0) * k2[i] + cplx(2.0) * k3[i] + k4[i]);
        t += dt;
    }
    return y;
}

// full canonicalization of an E-form generator with h-multiplicity s >= 0.
// The coefficient g is only determined to total degree Ndet (padding above
// that keeps intermediate arithmetic exact); all deviation measures and all
// constructed transformations use determined jets only.  Every step is an
// h-preserving change of variables: once the preparation step has fixed
// h = xi1*xi2, further rescalings xi -> rho(h) xi would reparametrize the
// leaves and corrupt the residue series mu, so the u-coefficient Q_0(h) of
// the Weierstrass remainder is left as a free unit series (only its constant
// term, 1/c, is normalized by the monic gauge of P).  Returns the final
// extraction (Q reduced to Q_0(h), R reduced to its diagonal mu) in gd.
inline GenData canonicalize(TS g, int xw, int p_for_E, int Ndet, int max_rounds = 40) {
    int N = g.N;
    GenData gd = extract_generator_data(g, xw);
    if (gd.zero || gd.K == 0) return gd; // k=0 handled by caller
    // weighted determinacy: the Weierstrass unit W of g/h^s is determined to
    // weighted degree D - xw K (D = Ndet - 2s), hence so are Uhat = 1/W and
    // its remainder Q; the quotient Rhat loses another xw K.  The boundary
    // jet is excluded as it sits at the floating-point noise floor.
    auto qlvl = [&](const GenData& d, int j) {
        return std::max((Ndet - 1 - 2 * d.s - xw * (d.K + j)) / 2, 0);
    };
    for (int round = 0; round < max_rounds; ++round) {
        gd = extract_generator_data(g, xw);
        double tolq = 1e-8 * std::max(1.0, 1.0 / std::abs(gd.c));
        // deviation measures over determined jets
        double dev_u0 = 0; // u-dependence of Q at h=0
        for (int j = 1; j < gd.K; ++j) dev_u0 += std::abs(gd.Q.coeff_jet(j).get(0));
        double dev_z = 0; // remaining u-dependence of Q
        for (int j = 1; j < gd.K; ++j) dev_z += gd.Q.coeff_jet(j).retruncate(qlvl(gd, j)).norm();
        int rdeg = std::max(Ndet - 1 - 2 * gd.s - 2 * xw * gd.K, 0);
        int mu_lvl = std::max((Ndet - 1 - 2 * gd.s - 2 * xw * gd.K) / 2, 0);
        TS1 mu_det = gd.mu.retruncate(mu_lvl);
        double dev_offdiag = (gd.Rhat.to_xi() -
                              [&] {
                                  TS d(N);
                                  for (int b = 0; b <= mu_det.N && 2 * b <= N; ++b)
                                      if (std::abs(mu_det.get(b)) > 0) d.add_to(b, b, mu_det.get(b));
                                  return d;
                              }())
                                 .retruncate(rdeg)
                                 .norm();
        if (dev_u0 < tolq && dev_z < tolq && dev_offdiag < 1e-8) break;

        if (dev_u0 >= tolq) {
            g = q0_flow(g, gd, p_for_E);
            continue;
        }
        // homological parameter flow removes Z; rebuild from (P_nf, Q_0, mu),
        // restricted to determined jets so the rebuilt g is an exact model
        GenData gdd = gd;
        for (int j = 0; j <= gd.K; ++j)
            gdd.P.set_jet(j, gd.P.coeff_jet(j).retruncate(qlvl(gd, j)));
        for (int j = 0; j < gd.K; ++j)
            gdd.Q.set_jet(j, gd.Q.coeff_jet(j).retruncate(qlvl(gd, j)));
        gdd.mu = mu_det;
        int horder = (N - xw * gd.K) / 2;
        int hq = (xw == 1) ? 1 : xw; // power of h in v^2 = u^2 - 4h^q
        std::vector<TS1> y = homological_flow(gdd, hq, horder);
        SS Pnf(N, xw);
        for (int j = 0; j < gd.K; ++j) Pnf.set_jet(j, y[j]);
        TS1 lead = y[gd.K];
        lead.set(0, lead.get(0) + cplx(1.0));
        Pnf.set_jet(gd.K, lead);
        // D = Q_0(h) + mu * Pnf
        TS1 q0_det = gd.Q.coeff_jet(0).retruncate(qlvl(gd, 0));
        SS D = SS::zero(N, xw);
        for (int b = 0; b <= q0_det.N && 2 * b <= N; ++b)
            if (std::abs(q0_det.get(b)) > 0) D = D.with_monomial(0, b, q0_det.get(b));
        SS mus = SS::zero(N, xw);
        for (int b = 0; b <= mu_det.N && 2 * b <= N; ++b)
            if (std::abs(mu_det.get(b)) > 0) mus = mus.with_monomial(0, b, mu_det.get(b));
        D = D + mus * Pnf;
        TS num = Pnf.to_xi();
        for (int i = 0; i < gd.s; ++i) num = num.mul_monomial(1, 1);
        g = divide_exact(num, D.to_xi(), 1e-8);
        continue;
    }
    // final consistency on determined jets
    gd = extract_generator_data(g, xw);
    double tolq = 1e-7;
    for (int j = 1; j < gd.K; ++j)
        if (gd.Q.coeff_jet(j).retruncate(qlvl(gd, j)).norm() >
            tolq * std::max(1.0, 1.0 / std::abs(gd.c)))
            throw NumericalError("canonicalize: Q did not reduce to Q_0(h)");
    return gd;
}

} // namespace detail

inline FormalClass normal_form(const ReversiblePair& pair) {
    LinearNormalized ln = linear_normalize(pair);
    PreparedPair pp = prepare(ln);
    int N0 = pp.phi.comp1.N;
    int N = N0 + 8; // internal padding so repeated E-form round trips stay exact to N0
    FormalClass out;
    out.p = pp.p;
    out.lambda = pp.lambda;
    out.minus_sigma = pp.minus_sigma;

    FD phip = iterate(pp.phi, pp.p);
    double scale = std::max(1.0, pp.phi.comp1.norm());
    if ((phip.comp1 - TS::xi1(N0)).norm() < 1e-10 * scale &&
        (phip.comp2 - TS::xi2(N0)).norm() < 1e-10 * scale) {
        out.tag = CaseTag::O;
        return out;
    }

    VF X = log_diffeo(phip);
    TS g = detail::project_invariant(X.to_eform(1e-6).retruncate(N0 - 1), pp.p, pp.minus_sigma)
               .retruncate(N);
    int xw = pp.minus_sigma ? 1 : pp.p;
    detail::GenData gd0 = detail::extract_generator_data(g, xw);
    out.s = gd0.s;

    if (gd0.K == 0) {
        // case A: X = h^s / Rhat E; c = 1/mu(0) after tangent-to-id rescaling
        out.tag = CaseTag::A;
        if (gd0.s < 1) throw InternalConsistencyError("normal_form: k=0 with s=0 for a parabolic map");
        out.c = cplx(1.0) / gd0.mu.get(0);
        out.k2 = 0;
        out.mu_jets = TS1(std::max((N0 - 2 * out.s) / 2, 0));
        out.P_nf = WeierstrassPoly{0, VariableKind::U, {}};
        out.symmetry_order = 4 * out.s;
        return out;
    }

    detail::GenData gd = detail::canonicalize(g, xw, pp.p, N0 - 1);
    out.tag = pp.minus_sigma ? CaseTag::C : CaseTag::B;
    out.k2 = pp.minus_sigma ? gd.K : 2 * gd.K;
    out.c = gd.c;
    int mu_lvl = std::max((N0 - 2 - 2 * gd.s - 2 * xw * gd.K) / 2, 0);
    out.mu_jets = gd.mu.retruncate(mu_lvl);
    if (pp.minus_sigma) {
        // mu vanishes identically in case C
        if (out.mu_jets.norm() > 1e-6 * std::max(1.0, std::abs(gd.c)))
            throw InternalConsistencyError("normal_form: nonzero mu in the -sigma branch");
        out.mu_jets = TS1(mu_lvl);
    }
    out.P_nf = detail::report_poly(gd.P, gd.K, pp.minus_sigma);
    detail::truncate_report(out.P_nf, N0 - 2 - xw * gd.K, gd.s, xw);
    out.symmetry_order = 2 * gd.K * xw + 4 * out.s;
    return out;
}

// ---------------------------------------------------------------------------
// classification of reversible integrable vector fields (Lambda = id, w-variable)

struct VFClass {
    enum Kind { Zero, UnitJet, PureMonomial, Polynomial } kind = Zero;
    cplx c{0.0}, a{0.0};
    int n = 0, s = 0, k = 0;
    WeierstrassPoly P_nf;
    TS1 mu_jets;
};

inline VFClass classify_vector_field(const VF& X_in) {
    int N0 = X_in.x1.N;
    int N = N0 + 8;
    TS g = X_in.to_eform(1e-8); // throws if X.h != 0
    // sigma^* X = -X  <=>  g o sigma = g
    if ((detail::compose_sigma(g) - g).norm() > 1e-8 * std::max(1.0, g.norm()))
        throw DomainError("classify_vector_field: field is not reversed by sigma");
    g = detail::project_invariant(g, 1, false).retruncate(N);
    VFClass out;
    if (g.norm() < 1e-13) return out;
    detail::GenData gd0 = detail::extract_generator_data(g, 1);
    out.s = gd0.s;
    if (gd0.K == 0) {
        TS1 Ginv = gd0.mu.inv(); // X = h^s/Rhat E; report jets of 1/mu(h)
        out.c = Ginv.get(0);
        if (out.s >= 1) {
            out.kind = VFClass::PureMonomial; // c h^s E
            return out;
        }
        out.kind = VFClass::UnitJet; // (c + a h^n) E
        for (int b = 1; b <= Ginv.N; ++b)
            if (std::abs(Ginv.get(b)) > 1e-11 * std::max(1.0, std::abs(out.c))) {
                out.n = b;
                out.a = Ginv.get(b);
                break;
            }
        return out;
    }
    detail::GenData gd = detail::canonicalize(g, 1, 1, N0 - 1);
    out.kind = VFClass::Polynomial;
    out.k = gd.K;
    out.c = gd.c;
    out.mu_jets = gd.mu.retruncate(std::max((N0 - 2 - 2 * gd.s - 2 * gd.K) / 2, 0));
    out.P_nf = detail::report_poly(gd.P, gd.K, false);
    detail::truncate_report(out.P_nf, N0 - 2 - gd.K, gd.s, 1);
    return out;
}

} // namespace parnf

#endif
