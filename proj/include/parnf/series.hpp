#ifndef PARNF_SERIES_HPP
#define PARNF_SERIES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "scalar.hpp"
#include "series1.hpp"

namespace parnf {

inline constexpr int default_order = 12;

// Truncated bivariate power series in (xi1, xi2), total degree <= trunc_order.
// Canonical form: no stored zero coefficients, no stored exponents above the cap.
template <class S>
struct TruncSeries2 {
    using traits = scalar_traits<S>;
    using key = std::pair<int, int>;

    std::map<key, S> c;
    int N = default_order;

    TruncSeries2() = default;
    explicit TruncSeries2(int order) : N(order) {}

    static TruncSeries2 zero(int order) { return TruncSeries2(order); }
    static TruncSeries2 constant(const S& v, int order) {
        TruncSeries2 r(order);
        r.set(0, 0, v);
        return r;
    }
    static TruncSeries2 monomial(int m1, int m2, const S& v, int order) {
        TruncSeries2 r(order);
        r.set(m1, m2, v);
        return r;
    }
    static TruncSeries2 xi1(int order) { return monomial(1, 0, traits::from_int(1), order); }
    static TruncSeries2 xi2(int order) { return monomial(0, 1, traits::from_int(1), order); }
    // h = xi1*xi2
    static TruncSeries2 h(int order) { return monomial(1, 1, traits::from_int(1), order); }

    S get(int m1, int m2) const {
        auto it = c.find({m1, m2});
        return it == c.end() ? S{} : it->second;
    }
    void set(int m1, int m2, const S& v) {
        if (m1 < 0 || m2 < 0) throw DomainError("TruncSeries2: negative exponent");
        if (m1 + m2 > N) return;
        if (traits::is_zero(v))
            c.erase({m1, m2});
        else
            c[{m1, m2}] = v;
    }
    void add_to(int m1, int m2, const S& v) { set(m1, m2, get(m1, m2) + v); }

    void canon() {
        for (auto it = c.begin(); it != c.end();) {
            if (it->first.first + it->first.second > N || traits::is_zero(it->second))
                it = c.erase(it);
            else
                ++it;
        }
    }
    bool is_zero() const { return c.empty(); }
    // lowest total degree of a nonzero term, N+1 when zero
    int order0() const {
        int o = N + 1;
        for (auto& [m, v] : c) o = std::min(o, m.first + m.second);
        return o;
    }
    double norm() const {
        double m = 0;
        for (auto& [k, v] : c) m = std::max(m, traits::abs(v));
        return m;
    }
    // drop floating noise below a relative threshold (no-op for exact scalars)
    TruncSeries2 chop(double eps) const {
        if constexpr (traits::exact) return *this;
        TruncSeries2 r(N);
        double th = eps * std::max(norm(), 1e-300);
        for (auto& [m, v] : c)
            if (traits::abs(v) > th) r.c[m] = v;
        return r;
    }
    TruncSeries2 retruncate(int order) const {
        TruncSeries2 r(order);
        for (auto& [m, v] : c)
            if (m.first + m.second <= order) r.c[m] = v;
        return r;
    }

    TruncSeries2 pow_int(int k) const {
        TruncSeries2 r = TruncSeries2::constant(traits::from_int(1), N);
        for (int i = 0; i < k; ++i) r = r * (*this);
        return r;
    }

    friend TruncSeries2 operator+(const TruncSeries2& a, const TruncSeries2& b) {
        TruncSeries2 r = a.retruncate(std::min(a.N, b.N));
        for (auto& [m, v] : b.c) r.add_to(m.first, m.second, v);
        return r;
    }
    friend TruncSeries2 operator-(const TruncSeries2& a, const TruncSeries2& b) {
        TruncSeries2 r = a.retruncate(std::min(a.N, b.N));
        for (auto& [m, v] : b.c) r.add_to(m.first, m.second, -v);
        return r;
    }
    friend TruncSeries2 operator-(const TruncSeries2& a) {
        TruncSeries2 r = a;
        for (auto& [m, v] : r.c) v = -v;
        return r;
    }
    friend TruncSeries2 operator*(const TruncSeries2& a, const TruncSeries2& b) {
        TruncSeries2 r(std::min(a.N, b.N));
        for (auto& [ma, va] : a.c)
            for (auto& [mb, vb] : b.c) {
                int m1 = ma.first + mb.first, m2 = ma.second + mb.second;
                if (m1 + m2 <= r.N) r.add_to(m1, m2, va * vb);
            }
        return r;
    }
    friend TruncSeries2 operator*(const S& s, const TruncSeries2& a) {
        TruncSeries2 r(a.N);
        if (traits::is_zero(s)) return r;
        for (auto& [m, v] : a.c) r.c[m] = s * v;
        r.canon();
        return r;
    }

    TruncSeries2 deriv(int var) const { // var: 1 or 2
        TruncSeries2 r(N);
        for (auto& [m, v] : c) {
            int e = (var == 1) ? m.first : m.second;
            if (e == 0) continue;
            if (var == 1)
                r.add_to(m.first - 1, m.second, traits::from_int(e) * v);
            else
                r.add_to(m.first, m.second - 1, traits::from_int(e) * v);
        }
        return r;
    }

    // multiply by xi1^a xi2^b
    TruncSeries2 mul_monomial(int a, int b) const {
        TruncSeries2 r(N);
        for (auto& [m, v] : c)
            r.set(m.first + a, m.second + b, v);
        return r;
    }
    // exact division by xi1^a xi2^b
    TruncSeries2 div_monomial(int a, int b) const {
        TruncSeries2 r(N);
        for (auto& [m, v] : c) {
            if (m.first < a || m.second < b)
                throw DomainError("TruncSeries2: not divisible by the requested monomial");
            r.c[{m.first - a, m.second - b}] = v;
        }
        return r;
    }

    // reciprocal of a unit (nonzero constant term)
    TruncSeries2 inv() const {
        S c0 = get(0, 0);
        if (traits::is_zero(c0)) throw DomainError("TruncSeries2: not a unit");
        TruncSeries2 v = *this;
        v.set(0, 0, S{});
        S c0i = traits::from_int(1) / c0;
        // 1/(c0+v) = c0i * sum (-v/c0)^n
        TruncSeries2 r = constant(c0i, N), t = constant(c0i, N);
        TruncSeries2 mvc = (-c0i) * v;
        for (int n = 1; n <= N && !t.is_zero(); ++n) {
            t = t * mvc;
            r = r + t;
        }
        return r;
    }

    cplx eval(cplx z1, cplx z2) const {
        cplx acc = 0;
        for (auto& [m, v] : c)
            acc += traits::to_cplx(v) * std::pow(z1, m.first) * std::pow(z2, m.second);
        return acc;
    }

    // the homogeneous part of total degree d
    TruncSeries2 homogeneous(int d) const {
        TruncSeries2 r(N);
        for (auto& [m, v] : c)
            if (m.first + m.second == d) r.c[m] = v;
        return r;
    }

    friend bool operator==(const TruncSeries2& a, const TruncSeries2& b) {
        return a.c == b.c; // canonical form makes this meaningful
    }
};

// ---------------------------------------------------------------------------
// exact division of truncated series
// ---------------------------------------------------------------------------

namespace detail {

// divide homogeneous bivariate forms: num (degree dn) / den (degree dd),
// writing forms as univariate polynomials via xi1^i xi2^(d-i) <-> z^i.
template <class S>
std::vector<S> divide_forms(const std::vector<S>& num, const std::vector<S>& den, double tol,
                            double scale) {
    using tr = scalar_traits<S>;
    int dn = (int)num.size() - 1, dd = (int)den.size() - 1;
    // strip trailing-z zeros of den (powers of xi1 dividing it); zero entries
    // are judged relative to the layer itself, not the global scale, so that
    // large numerators cannot mask a genuine pivot
    double dscale = 0;
    for (auto& v : den) dscale = std::max(dscale, tr::abs(v));
    int lo = 0, hi = dd;
    while (lo <= dd && tr::abs(den[lo]) <= tol * dscale) ++lo;
    while (hi >= lo && tr::abs(den[hi]) <= tol * dscale) --hi;
    if (lo > hi) throw DomainError("divide_forms: zero divisor form");
    // num must vanish below z^lo and above z^(dn-(dd-hi))
    std::vector<S> q(dn - dd + 1, S{});
    std::vector<S> r = num;
    // power-series style division by unit part starting at z^lo
    S piv = den[lo];
    for (int j = lo; j + (dd - lo) <= dn && j - lo <= dn - dd; ++j) {
        S qc = r[j] / piv;
        q[j - lo] = qc;
        if (tr::is_zero(qc)) continue;
        for (int i = lo; i <= hi; ++i) r[j + i - lo] = r[j + i - lo] - qc * den[i];
    }
    double rn = 0;
    for (auto& v : r) rn = std::max(rn, tr::abs(v));
    if (rn > tol * std::max(scale, 1.0))
        throw DomainError("TruncSeries2: series not divisible (homogeneous remainder)");
    return q;
}

} // namespace detail

// exact division num/den of truncated series; den != 0.  The result is the
// unique series q of order N - ord(den) with den*q = num (error when no such
// q exists at truncation order).
template <class S>
TruncSeries2<S> divide_exact(const TruncSeries2<S>& num, const TruncSeries2<S>& den,
                             double tol = 1e-9) {
    using tr = scalar_traits<S>;
    if (den.is_zero()) throw DomainError("divide_exact: division by zero series");
    if (num.is_zero()) return TruncSeries2<S>(num.N);
    int delta = den.order0();
    int Nq = std::min(num.N, den.N) - delta;
    if (num.order0() < delta) throw DomainError("divide_exact: numerator order too low");
    double scale = std::max(num.norm(), den.norm());
    if constexpr (tr::exact) tol = 0.0;

    // den split into homogeneous layers den_delta, den_{delta+1}, ...
    auto form_of = [](const TruncSeries2<S>& f, int d) {
        std::vector<S> v(d + 1, S{});
        for (auto& [m, x] : f.c)
            if (m.first + m.second == d) v[m.first] = x;
        return v;
    };
    std::vector<S> den0 = form_of(den, delta);
    TruncSeries2<S> q(std::min(num.N, den.N));
    TruncSeries2<S> residual = num.retruncate(q.N + 0);
    for (int r = 0; r <= Nq; ++r) {
        // residual layer at degree r+delta must equal den0 * q_r
        std::vector<S> rhs = form_of(residual, r + delta);
        std::vector<S> qr = detail::divide_forms(rhs, den0, tol, scale);
        bool any = false;
        TruncSeries2<S> qpart(q.N);
        for (int i = 0; i < (int)qr.size(); ++i)
            if (!tr::is_zero(qr[i])) {
                qpart.set(i, r - i, qr[i]);
                any = true;
            }
        if (any) {
            q = q + qpart;
            residual = residual - den * qpart;
        }
    }
    // any surviving residual of degree <= N (degrees above Nq+delta are
    // unconstrained only beyond the truncation cap of den*q)
    double rn = 0;
    for (auto& [m, v] : residual.c)
        if (m.first + m.second <= Nq + delta) rn = std::max(rn, tr::abs(v));
    if (rn > tol * std::max(scale, 1.0))
        throw DomainError("divide_exact: not divisible at truncation order");
    return q;
}

// ---------------------------------------------------------------------------
// diffeomorphisms
// ---------------------------------------------------------------------------

template <class S>
struct FormalDiffeo {
    using TS = TruncSeries2<S>;
    using traits = scalar_traits<S>;

    TS comp1, comp2;

    FormalDiffeo() = default;
    FormalDiffeo(TS a, TS b) : comp1(std::move(a)), comp2(std::move(b)) {
        if (!traits::is_zero(comp1.get(0, 0)) || !traits::is_zero(comp2.get(0, 0)))
            throw DomainError("FormalDiffeo: components must vanish at 0");
    }
    int order() const { return std::min(comp1.N, comp2.N); }

    static FormalDiffeo identity(int order) {
        return {TS::xi1(order), TS::xi2(order)};
    }
    static FormalDiffeo linear(const S& a11, const S& a12, const S& a21, const S& a22,
                               int order) {
        TS c1(order), c2(order);
        c1.set(1, 0, a11);
        c1.set(0, 1, a12);
        c2.set(1, 0, a21);
        c2.set(0, 1, a22);
        return {c1, c2};
    }
    static FormalDiffeo sigma(int order) { // the swap (xi2, xi1)
        return {TS::xi2(order), TS::xi1(order)};
    }

    std::array<S, 4> linear_part() const { // row-major (a11,a12,a21,a22)
        return {comp1.get(1, 0), comp1.get(0, 1), comp2.get(1, 0), comp2.get(0, 1)};
    }
    bool tangent_to_identity(double tol = 1e-9) const {
        auto L = linear_part();
        S one = traits::from_int(1);
        return traits::abs(L[0] - one) <= tol && traits::abs(L[1]) <= tol &&
               traits::abs(L[2]) <= tol && traits::abs(L[3] - one) <= tol;
    }
};

// f composed with a diffeo (or any constant-free pair of series)
template <class S>
TruncSeries2<S> compose(const TruncSeries2<S>& f, const TruncSeries2<S>& g1,
                        const TruncSeries2<S>& g2) {
    using tr = scalar_traits<S>;
    if (!tr::is_zero(g1.get(0, 0)) || !tr::is_zero(g2.get(0, 0)))
        throw DomainError("compose: substituted series must vanish at 0");
    int order = std::min({f.N, g1.N, g2.N});
    int M1 = 0, M2 = 0;
    for (auto& [m, v] : f.c) M1 = std::max(M1, m.first), M2 = std::max(M2, m.second);
    std::vector<TruncSeries2<S>> p1(M1 + 1), p2(M2 + 1);
    p1[0] = TruncSeries2<S>::constant(tr::from_int(1), order);
    for (int i = 1; i <= M1; ++i) p1[i] = p1[i - 1] * g1.retruncate(order);
    p2[0] = p1[0];
    for (int i = 1; i <= M2; ++i) p2[i] = p2[i - 1] * g2.retruncate(order);
    TruncSeries2<S> r(order);
    for (auto& [m, v] : f.c) r = r + v * (p1[m.first] * p2[m.second]);
    return r;
}

template <class S>
TruncSeries2<S> compose(const TruncSeries2<S>& f, const FormalDiffeo<S>& phi) {
    return compose(f, phi.comp1, phi.comp2);
}

template <class S>
FormalDiffeo<S> compose(const FormalDiffeo<S>& f, const FormalDiffeo<S>& g) { // f after g
    return {compose(f.comp1, g), compose(f.comp2, g)};
}

template <class S>
FormalDiffeo<S> iterate(const FormalDiffeo<S>& f, int n) {
    FormalDiffeo<S> r = FormalDiffeo<S>::identity(f.order());
    for (int i = 0; i < n; ++i) r = compose(f, r);
    return r;
}

template <class S>
FormalDiffeo<S> invert_diffeo(const FormalDiffeo<S>& phi) {
    using tr = scalar_traits<S>;
    auto L = phi.linear_part();
    S det = L[0] * L[3] - L[1] * L[2];
    if (tr::abs(det) < 1e-14) throw DomainError("invert_diffeo: singular linear part");
    int order = phi.order();
    S di = tr::from_int(1) / det;
    FormalDiffeo<S> Linv = FormalDiffeo<S>::linear(di * L[3], -(di * L[1]), -(di * L[2]),
                                                   di * L[0], order);
    // psi_{n+1} = Linv ( id - NL(psi_n) ), gains one correct degree each pass
    FormalDiffeo<S> nl = phi;
    nl.comp1.set(1, 0, S{}), nl.comp1.set(0, 1, S{});
    nl.comp2.set(1, 0, S{}), nl.comp2.set(0, 1, S{});
    FormalDiffeo<S> psi = Linv;
    FormalDiffeo<S> id = FormalDiffeo<S>::identity(order);
    for (int n = 2; n <= order; ++n) {
        FormalDiffeo<S> corr{id.comp1 - compose(nl.comp1, psi), id.comp2 - compose(nl.comp2, psi)};
        psi = compose(Linv, corr);
    }
    return psi;
}

// ---------------------------------------------------------------------------
// vector fields
// ---------------------------------------------------------------------------

// A formal vector field; optionally tagged as g*E with E = xi1 d1 - xi2 d2.
template <class S>
struct FormalVectorField {
    using TS = TruncSeries2<S>;

    TS x1, x2;       // components (always valid)
    bool eform = false;
    TS g;            // E-form coefficient when eform

    FormalVectorField() = default;
    static FormalVectorField from_components(TS a, TS b) {
        FormalVectorField r;
        r.x1 = std::move(a);
        r.x2 = std::move(b);
        return r;
    }
    static FormalVectorField from_eform(const TS& gg) {
        FormalVectorField r;
        r.g = gg;
        r.eform = true;
        r.x1 = gg.mul_monomial(1, 0);
        r.x2 = -(gg.mul_monomial(0, 1));
        return r;
    }
    static FormalVectorField zero(int order) {
        return from_eform(TS::zero(order));
    }
    static FormalVectorField E(int order) {
        return from_eform(TS::constant(scalar_traits<S>::from_int(1), order));
    }
    int order() const { return std::min(x1.N, x2.N); }
    bool is_zero() const { return x1.is_zero() && x2.is_zero(); }

    // interpret as E-form; errors when the field is not parallel to E
    TS to_eform(double tol = 1e-9) const {
        if (eform) return g;
        TS gg = divide_exact(x1, TS::xi1(x1.N), tol);
        TS back = -(gg.mul_monomial(0, 1));
        if (!(back - x2).chop(tol).is_zero() && (back - x2).norm() > tol * std::max(1.0, x2.norm()))
            throw DomainError("FormalVectorField: not of E-form");
        return gg;
    }
};

template <class S>
TruncSeries2<S> lie_derivative(const FormalVectorField<S>& X, const TruncSeries2<S>& f) {
    return X.x1 * f.deriv(1) + X.x2 * f.deriv(2);
}

namespace detail {

// plain truncated Lie series exp(tX).xi; terminates exactly when X has no
// linear (or constant) part.  Otherwise the caller bounds the error.
template <class S>
FormalDiffeo<S> exp_lie_series(const FormalVectorField<S>& X, const S& t, int max_terms,
                               double reltol) {
    using tr = scalar_traits<S>;
    int order = X.order();
    TruncSeries2<S> a1 = TruncSeries2<S>::xi1(order), a2 = TruncSeries2<S>::xi2(order);
    TruncSeries2<S> t1 = a1, t2 = a2;
    S fac = tr::from_int(1);
    for (int n = 1; n <= max_terms; ++n) {
        t1 = lie_derivative(X, t1);
        t2 = lie_derivative(X, t2);
        if (t1.is_zero() && t2.is_zero()) return {a1, a2};
        fac = fac * (t / tr::from_int(n));
        a1 = a1 + fac * t1;
        a2 = a2 + fac * t2;
        if (reltol > 0) {
            double tn = std::max(t1.norm(), t2.norm()) * tr::abs(fac);
            double an = std::max({a1.norm(), a2.norm(), 1.0});
            if (tn < reltol * an) return {a1, a2};
        }
    }
    if (reltol <= 0)
        throw InternalConsistencyError("exp_lie_series: did not terminate (linear part present?)");
    return {a1, a2};
}

} // namespace detail

// Formal time-t flow of X.  X must vanish at 0; a nonzero linear part is
// accepted when it is diagonalizable (floating scalars only): the flow is then
// computed by scaling-and-squaring so the per-monomial exponentials converge
// without cancellation.
template <class S>
FormalDiffeo<S> exp_flow(const FormalVectorField<S>& X, const S& t) {
    using tr = scalar_traits<S>;
    int order = X.order();
    if (!tr::is_zero(X.x1.get(0, 0)) || !tr::is_zero(X.x2.get(0, 0)))
        throw DomainError("exp_flow: field must vanish at 0");
    S l11 = X.x1.get(1, 0), l12 = X.x1.get(0, 1);
    S l21 = X.x2.get(1, 0), l22 = X.x2.get(0, 1);
    bool linzero = tr::is_zero(l11) && tr::is_zero(l12) && tr::is_zero(l21) && tr::is_zero(l22);
    if (linzero)
        return detail::exp_lie_series(X, t, 4 * order + 8, 0.0);
    if constexpr (tr::exact)
        throw DomainError("exp_flow: nonzero linear part unsupported in exact mode");
    else {
        bool diag = tr::abs(l12) == 0.0 && tr::abs(l21) == 0.0;
        if (!diag) {
            // 2x2 eigen-conjugation; reject defective linear parts
            cplx a = tr::to_cplx(l11), b = tr::to_cplx(l12), c = tr::to_cplx(l21),
                 d = tr::to_cplx(l22);
            cplx tr2 = a + d, disc = std::sqrt(tr2 * tr2 - 4.0 * (a * d - b * c));
            cplx e1 = (tr2 + disc) / 2.0, e2 = (tr2 - disc) / 2.0;
            if (std::abs(e1 - e2) < 1e-10 * (std::abs(e1) + std::abs(e2) + 1.0))
                throw DomainError("exp_flow: non-diagonalizable linear part");
            auto evec = [&](cplx ev) -> std::array<cplx, 2> {
                if (std::abs(b) > 1e-14 * (std::abs(a) + std::abs(d)))
                    return {b, ev - a};
                if (std::abs(c) > 1e-14 * (std::abs(a) + std::abs(d)))
                    return {ev - d, c};
                return std::abs(a - ev) < std::abs(d - ev) ? std::array<cplx, 2>{1.0, 0.0}
                                                           : std::array<cplx, 2>{0.0, 1.0};
            };
            auto v1 = evec(e1), v2 = evec(e2);
            cplx det = v1[0] * v2[1] - v2[0] * v1[1];
            if (std::abs(det) < 1e-12) throw DomainError("exp_flow: non-diagonalizable linear part");
            FormalDiffeo<S> C = FormalDiffeo<S>::linear(S(v1[0]), S(v2[0]), S(v1[1]), S(v2[1]), order);
            FormalDiffeo<S> Ci = invert_diffeo(C);
            // pushforward of X under C^{-1}: Y(xi) = C^{-1} X(C xi)
            TruncSeries2<S> xc1 = compose(X.x1, C), xc2 = compose(X.x2, C);
            S di = S(1.0) / S(det);
            auto Y = FormalVectorField<S>::from_components(
                di * (S(v2[1]) * xc1 - S(v2[0]) * xc2), di * (S(v1[0]) * xc2 - S(v1[1]) * xc1));
            FormalDiffeo<S> F = exp_flow(Y, t);
            return compose(C, compose(F, Ci));
        }
        // diagonal linear part: scale down until the Lie series is benign
        double nu = (std::max(tr::abs(l11), tr::abs(l22)) * order + std::max(X.x1.norm(), X.x2.norm())) *
                    tr::abs(t);
        int m = 0;
        while (nu > 0.5 && m < 60) nu /= 2.0, ++m;
        S ts = t;
        for (int i = 0; i < m; ++i) ts = ts * tr::from_ratio(1, 2);
        FormalDiffeo<S> F = detail::exp_lie_series(X, ts, 400, 1e-22);
        for (int i = 0; i < m; ++i) F = compose(F, F);
        return F;
    }
}

template <class S>
FormalDiffeo<S> exp_flow(const FormalVectorField<S>& X) {
    return exp_flow(X, scalar_traits<S>::from_int(1));
}

// Formal infinitesimal generator of a tangent-to-identity diffeomorphism.
// Solved degree by degree from exp(X) = F: a homogeneous correction of
// degree d enters exp(X) linearly at degree d, so the degree-d discrepancy
// is exactly the missing component.  (The classical alternating series
// sum (-1)^(n-1)/n Theta^n(f) is equivalent but ill-conditioned in floating
// point: its intermediate terms grow combinatorially before cancelling.)
template <class S>
FormalVectorField<S> log_diffeo(const FormalDiffeo<S>& F) {
    if (!F.tangent_to_identity(scalar_traits<S>::exact ? 0.0 : 1e-9))
        throw DomainError("log_diffeo: diffeomorphism must be tangent to the identity");
    int order = F.order();
    TruncSeries2<S> a1(order), a2(order);
    for (int d = 2; d <= order; ++d) {
        FormalDiffeo<S> G = exp_flow(FormalVectorField<S>::from_components(a1, a2));
        a1 = a1 + (F.comp1 - G.comp1).homogeneous(d);
        a2 = a2 + (F.comp2 - G.comp2).homogeneous(d);
    }
    return FormalVectorField<S>::from_components(a1, a2);
}

// pushforward Psi_* X: (Psi_*X).f = (X.(f o Psi)) o Psi^{-1}
template <class S>
FormalVectorField<S> pushforward(const FormalDiffeo<S>& psi, const FormalVectorField<S>& X,
                                 const FormalDiffeo<S>* psi_inv = nullptr) {
    FormalDiffeo<S> inv = psi_inv ? *psi_inv : invert_diffeo(psi);
    TruncSeries2<S> c1 = compose(lie_derivative(X, psi.comp1), inv);
    TruncSeries2<S> c2 = compose(lie_derivative(X, psi.comp2), inv);
    return FormalVectorField<S>::from_components(c1, c2);
}

// pullback Psi^* X = (Psi^{-1})_* X, i.e. DPsi(xi)^{-1} X(Psi(xi))
template <class S>
FormalVectorField<S> pullback(const FormalDiffeo<S>& psi, const FormalVectorField<S>& X,
                              const FormalDiffeo<S>* psi_inv = nullptr) {
    FormalDiffeo<S> inv = psi_inv ? *psi_inv : invert_diffeo(psi);
    return pushforward(inv, X, &psi);
}

} // namespace parnf

#endif
