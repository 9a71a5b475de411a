#ifndef PARNF_EXAMPLES_HPP
#define PARNF_EXAMPLES_HPP

// Fixture generators: model maps and normal-form maps realized from their
// classification data, the local monodromy data of the Painleve VI
// character variety at a fixed point, and the algebraic involution triple
// whose normalizing series diverges (no periodic leaves off h = 0).

#include <array>
#include <cmath>
#include <vector>

#include "parnf/errors.hpp"
#include "parnf/mw.hpp"
#include "parnf/reversible.hpp"

namespace parnf {

namespace detail {

inline cplx unit_root(int num, int den) {
    return std::exp(cplx(0.0, 2.0 * M_PI * num / den));
}

// model generator coefficient  g = c h^s P / (1 + c mu P)  in the division
// variable of weight xw (u = xi1^p + xi2^p, or u = xi1 + xi2 when xw = 1)
inline TS model_generator(int xw, int s, cplx c, const std::vector<TS1>& P_jets, const TS1& mu,
                          int N) {
    int K = (int)P_jets.size(); // jets P_0..P_{K-1}; leading term monic
    SS P = SS::zero(N, xw);
    for (int j = 0; j < K; ++j) P.set_jet(j, P_jets[j]);
    P = P.with_monomial(K, 0, cplx(1.0));
    SS D = SS::constant(cplx(1.0), N, xw);
    SS mus = SS::zero(N, xw);
    for (int b = 0; b <= mu.N; ++b)
        if (std::abs(mu.get(b)) > 0) mus = mus.with_monomial(0, b, mu.get(b));
    D = D + (c * (mus * P));
    TS num = c * P.to_xi();
    for (int i = 0; i < s; ++i) num = num.mul_monomial(1, 1);
    return divide_exact(num, D.to_xi(), 1e-10);
}

inline FD linear_part_of_class(const FormalClass& cls, int N) {
    if (cls.minus_sigma || cls.tag == CaseTag::C)
        return FD::linear(cplx(0.0), cplx(-1.0), cplx(-1.0), cplx(0.0), N);
    cplx l = cls.lambda;
    if (cls.p > 1 && std::abs(l - cplx(1.0)) < 1e-12) l = unit_root(1, cls.p);
    return FD::linear(l, cplx(0.0), cplx(0.0), cplx(1.0) / l, N);
}

inline ReversiblePair realize_class(const FormalClass& cls, const TS1& mu, int N) {
    if (cls.p < 1) throw DomainError("make_model: invalid order p");
    FD lin = linear_part_of_class(cls, N);
    if (cls.tag == CaseTag::O) {
        if (cls.k2 != 0 || cls.s != 0 || std::abs(cls.c) > 0)
            throw DomainError("make_model: case O admits no generator data");
        return ReversiblePair{lin, FD::sigma(N), TS::h(N)};
    }
    TS g(N);
    if (cls.tag == CaseTag::A) {
        if (cls.k2 != 0) throw DomainError("make_model: case A requires k = 0");
        if (cls.s < 1) throw DomainError("make_model: case A requires s >= 1");
        g.add_to(cls.s, cls.s, cls.c); // c h^s
    } else {
        bool ms = (cls.tag == CaseTag::C);
        int xw = ms ? 1 : cls.p;
        // in case C the polynomial is odd, P(u,h) = u Ptilde(u^2,h), and the
        // class stores the jets of Ptilde; expand back to jets in u
        std::vector<TS1> P_jets;
        if (ms) {
            if (cls.k2 % 2 == 0) throw DomainError("make_model: case C requires odd k2");
            P_jets.assign(cls.k2, TS1(0));
            for (int j = 0; j < (int)cls.P_nf.coeffs.size(); ++j)
                P_jets[2 * j + 1] = cls.P_nf.coeffs[j];
        } else {
            if (cls.k2 % 2 != 0 || cls.k2 < 2)
                throw DomainError("make_model: case B requires even k2 >= 2");
            P_jets = cls.P_nf.coeffs;
            P_jets.resize(cls.k2 / 2, TS1(0));
        }
        g = model_generator(xw, cls.s, cls.c, P_jets, mu, N);
    }
    VF X = VF::from_eform(cplx(1.0 / cls.p) * g);
    return ReversiblePair{compose(lin, exp_flow(X)), FD::sigma(N), TS::h(N)};
}

} // namespace detail

// model map of a formal class: phi = Lambda o exp((1/p) c h^s P E), tau =
// sigma, H = xi1 xi2 (the mu-free representative of the class)
inline ReversiblePair make_model(const FormalClass& cls, int N = 12) {
    return detail::realize_class(cls, TS1(0), N);
}

// mu-corrected normal form: phi = Lambda o exp((1/p) c h^s P/(1+ c mu P) E)
inline ReversiblePair make_normal_form(const FormalClass& cls, int N = 12) {
    if (cls.tag == CaseTag::C && cls.mu_jets.norm() > 0)
        throw DomainError("make_normal_form: mu vanishes identically in case C");
    return detail::realize_class(cls, cls.mu_jets, N);
}

// ---------------------------------------------------------------------------
// local monodromy of Painleve VI on its character variety

// character variety F(x) = x1 x2 x3 + x1^2 + x2^2 + x3^2
//                          - theta1 x1 - theta2 x2 - theta3 x3 + theta4;
// the monodromy pair (tau_i, tau_j) fixes x_k and a fixed point x* solves
// F_i(x*) = F_j(x*) = F(x*) = 0
struct PainleveConfig {
    std::array<cplx, 4> theta{};
    int k = 3;    // index of the fixed coordinate (1, 2 or 3)
    cplx x_star;  // value of x_k at the fixed point
};

struct PainleveLocalData {
    cplx lambda;                        // multiplier, lambda + 1/lambda = -2 + x_k*^2
    int p = 0;                          // order of lambda as a root of unity (0: none)
    cplx c_tilde;                       // (lambda - 1/lambda) c~ = -2 x_k* / F_k(x*)
    int s = 1;                          // h-multiplicity (always 1 here)
    cplx Fk_star;                       // transversality value F_k(x*)
    std::array<cplx, 3> fixed_point{};  // x* = (alpha_i, alpha_j, x_k*) in 1,2,3 order
    std::array<std::array<cplx, 2>, 2> tau_i{}, tau_j{}; // linear pair in (y_i, y_j)
    TS H; // first integral y_i y_j x_k* + y_i^2 + y_j^2
};

inline PainleveLocalData painleve(const PainleveConfig& cfg) {
    if (cfg.k < 1 || cfg.k > 3) throw DomainError("painleve: k must be 1, 2 or 3");
    int k = cfg.k - 1;
    int i = (k + 1) % 3, j = (k + 2) % 3;
    cplx ti = cfg.theta[i], tj = cfg.theta[j], tk = cfg.theta[k], t4 = cfg.theta[3];
    cplx xk = cfg.x_star;
    if (std::abs(xk - cplx(2.0)) < 1e-12 || std::abs(xk + cplx(2.0)) < 1e-12)
        throw DomainError("painleve: x_k* = +-2 is excluded");
    // coordinates of the fixed point: the simultaneous zero of F_i, F_j on
    // the line x_k = x_k*
    cplx ai = (tj * xk - 2.0 * ti) / (xk * xk - 4.0);
    cplx aj = (ti * xk - 2.0 * tj) / (xk * xk - 4.0);
    std::array<cplx, 3> x{};
    x[i] = ai, x[j] = aj, x[k] = xk;
    auto F = [&](const std::array<cplx, 3>& v) {
        return v[0] * v[1] * v[2] + v[0] * v[0] + v[1] * v[1] + v[2] * v[2] -
               cfg.theta[0] * v[0] - cfg.theta[1] * v[1] - cfg.theta[2] * v[2] + t4;
    };
    cplx Fval = F(x);
    if (std::abs(Fval) > 1e-9)
        throw DomainError("painleve: x* does not lie on the character variety");
    cplx Fk = x[i] * x[j] + 2.0 * xk - tk;
    if (std::abs(Fk) < 1e-12) throw DomainError("painleve: F_k(x*) = 0 (singular point)");

    PainleveLocalData out;
    out.fixed_point = x;
    out.Fk_star = Fk;
    cplx tr = xk * xk - 2.0; // trace of the linear part of tau_i o tau_j
    cplx disc = std::sqrt(tr * tr - 4.0);
    cplx l1 = (tr + disc) / 2.0, l2 = (tr - disc) / 2.0;
    out.lambda = (l1.imag() >= -1e-15) ? l1 : l2;
    out.p = root_of_unity_order(out.lambda);
    out.s = 1;
    out.c_tilde = (-2.0 * xk / Fk) / (out.lambda - cplx(1.0) / out.lambda);
    // tau_i: y_i -> -y_i - y_j x_k;  tau_j: y_j -> -y_j - y_i x_k
    out.tau_i[0] = {cplx(-1.0), -xk};
    out.tau_i[1] = {cplx(0.0), cplx(1.0)};
    out.tau_j[0] = {cplx(1.0), cplx(0.0)};
    out.tau_j[1] = {-xk, cplx(-1.0)};
    out.H = TS(2);
    out.H.add_to(1, 1, xk);
    out.H.add_to(2, 0, cplx(1.0));
    out.H.add_to(0, 2, cplx(1.0));
    return out;
}

// ---------------------------------------------------------------------------
// divergent example: triple with no periodic leaves off h = 0

// whether the parameter a degenerates the construction: the return map at
// the leaf end xi = (infinity, 0) is xi_1^{-1/2} -> (a/abar) xi_1^{-1/2} +
// h.o.t., and a/abar = 1 (a real) keeps a fixed direction on every leaf
inline bool divergent_degenerate(cplx a) {
    if (std::abs(a) < 1e-15) return true;
    return std::abs(a / std::conj(a) - cplx(1.0)) < 1e-12;
}

// triple (tau1, tau2, rho) built from the unipotent rational shear psi:
// tau1 = phi^(1/2) o sigma, tau2 = sigma o phi^(1/2) with phi^(1/2) =
// sigma psi sigma o psi^(-1) and alpha(h) = lambda^(1/2) e^(i h^s); the
// composition tau1 o tau2 is formally of the k = 0 type with the given s
inline MWTriple divergent_example(cplx lambda, int s, cplx a, int N = 12) {
    if (std::abs(std::abs(lambda) - 1.0) > 1e-12)
        throw DomainError("divergent_example: lambda must lie on the unit circle");
    if (s < 1) throw DomainError("divergent_example: s >= 1 required");
    // alpha^(+-1/2) = lambda^(+-1/4) e^(+-i h^s / 2) as series in h
    auto alpha_pow = [&](double w) { // alpha(h)^w
        cplx lw = std::exp(cplx(0.0, std::arg(lambda) / 2.0) * w);
        TS r(N), term = TS::constant(cplx(1.0), N);
        cplx ih(0.0, w);
        for (int n = 0; n * 2 * s <= N; ++n) {
            r = r + term;
            TS hpow = term;
            for (int q = 0; q < s; ++q) hpow = hpow.mul_monomial(1, 1);
            term = (ih / double(n + 1)) * hpow;
            if (term.is_zero()) break;
        }
        return lw * r;
    };
    TS am = alpha_pow(-0.5), ap = alpha_pow(0.5);
    TS hs = TS::constant(cplx(1.0), N);
    for (int q = 0; q < s; ++q) hs = hs.mul_monomial(1, 1);
    cplx ab = std::conj(a);
    TS one = TS::constant(cplx(1.0), N);
    TS psi1 = ((am + (a * hs) * TS::xi1(N)) * (one + (ab * hs) * (am * TS::xi2(N))).inv()) *
              TS::xi1(N);
    TS psi2 = ((ap + (ab * hs) * TS::xi2(N)) * (one + (a * hs) * (ap * TS::xi1(N))).inv()) *
              TS::xi2(N);
    FD psi{psi1, psi2};
    FD psibar{detail::compose_sigma(psi.comp2), detail::compose_sigma(psi.comp1)}; // sigma psi sigma
    FD half = compose(psibar, invert_diffeo(psi));
    MWTriple out;
    out.tau1 = compose(half, FD::sigma(N));
    out.tau2 = compose(FD::sigma(N), half);
    out.rho_bar = FD::identity(N);
    return out;
}

} // namespace parnf

#endif
