#ifndef PARNF_SYMMETRIC_HPP
#define PARNF_SYMMETRIC_HPP

// Series in the swap-invariant coordinates (x, h), where h = xi1*xi2 and
// x is either w = xi1 + xi2 (weight 1) or the power sum u = xi1^p + xi2^p
// (weight p).  A SymSeries is a polynomial in x whose coefficients are
// h-jets, truncated by total xi-degree: the monomial x^j h^b is kept when
// weight*j + 2b <= N.  Conversion from xi-coordinates is exact and refuses
// non-invariant input.  This layer also provides Weierstrass division and
// preparation with respect to distinguished polynomials in x.

#include <utility>
#include <vector>

#include "parnf/series.hpp"
#include "parnf/series1.hpp"

namespace parnf {

// power sum xi1^p + xi2^p as a xi-series (Newton recurrence)
template <class S>
TruncSeries2<S> power_sum(int p, int order) {
    using TS = TruncSeries2<S>;
    using tr = scalar_traits<S>;
    if (p < 1) throw DomainError("power_sum: p must be >= 1");
    TS pm1 = TS::constant(tr::from_int(2), order); // p = 0
    TS cur = TS::xi1(order) + TS::xi2(order);      // p = 1
    TS w = cur, h = TS::h(order);
    for (int k = 2; k <= p; ++k) {
        TS nxt = w * cur - h * pm1;
        pm1 = std::move(cur);
        cur = std::move(nxt);
    }
    return cur;
}

template <class S>
struct SymSeries {
    using tr = scalar_traits<S>;
    std::vector<TruncSeries1<S>> a; // a[j] = h-jet coefficient of x^j
    int N = default_order;          // total xi-degree cap
    int xw = 1;                     // xi-degree of x (1 for w, p for u)

    SymSeries() = default;
    SymSeries(int order, int x_weight) : N(order), xw(x_weight) {
        if (xw < 1) throw DomainError("SymSeries: x weight must be >= 1");
    }

    int h_order(int j) const { return (N - xw * j) / 2; } // may be negative
    int max_degx() const { return N / xw; }

    void canon() {
        for (int j = 0; j < (int)a.size(); ++j) {
            if (h_order(j) < 0)
                a[j] = TruncSeries1<S>(0), a[j].c.clear(), a[j].N = 0;
            else
                a[j] = a[j].retruncate(h_order(j));
        }
        while (!a.empty() && a.back().is_zero()) a.pop_back();
    }
    bool is_zero() const {
        for (auto& j : a)
            if (!j.is_zero()) return false;
        return true;
    }
    int degx() const {
        for (int j = (int)a.size() - 1; j >= 0; --j)
            if (!a[j].is_zero()) return j;
        return -1;
    }
    TruncSeries1<S> coeff_jet(int j) const {
        int ho = std::max(h_order(j), 0);
        if (j < 0 || j >= (int)a.size() || h_order(j) < 0) return TruncSeries1<S>(ho);
        return a[j].retruncate(ho);
    }
    void set_jet(int j, TruncSeries1<S> jet) {
        if (h_order(j) < 0) throw DomainError("SymSeries: exponent beyond truncation");
        if ((int)a.size() <= j) a.resize(j + 1, TruncSeries1<S>(0));
        a[j] = jet.retruncate(h_order(j));
    }
    double norm() const {
        double m = 0;
        for (auto& j : a) m = std::max(m, j.norm());
        return m;
    }

    static SymSeries zero(int order, int x_weight) { return SymSeries(order, x_weight); }
    static SymSeries constant(S v, int order, int x_weight) {
        SymSeries r(order, x_weight);
        TruncSeries1<S> j(r.h_order(0));
        j.set(0, v);
        r.a.push_back(j);
        r.canon();
        return r;
    }
    static SymSeries x(int order, int x_weight) {
        SymSeries r(order, x_weight);
        return r.with_monomial(1, 0, tr::from_int(1));
    }
    static SymSeries h(int order, int x_weight) {
        SymSeries r(order, x_weight);
        return r.with_monomial(0, 1, tr::from_int(1));
    }
    SymSeries with_monomial(int j, int b, S v) const {
        SymSeries r = *this;
        if (r.h_order(j) < b) throw DomainError("SymSeries: monomial beyond truncation");
        if ((int)r.a.size() <= j) r.a.resize(j + 1, TruncSeries1<S>(0));
        TruncSeries1<S> jet = r.a[j].retruncate(r.h_order(j));
        jet.set(b, jet.get(b) + v);
        r.a[j] = jet;
        r.canon();
        return r;
    }

    friend SymSeries operator+(const SymSeries& p, const SymSeries& q) {
        SymSeries r(std::min(p.N, q.N), p.check_same(q));
        r.a.resize(std::max(p.a.size(), q.a.size()), TruncSeries1<S>(0));
        for (int j = 0; j < (int)r.a.size(); ++j) r.a[j] = p.coeff_jet(j) + q.coeff_jet(j);
        r.canon();
        return r;
    }
    friend SymSeries operator-(const SymSeries& p, const SymSeries& q) {
        SymSeries r(std::min(p.N, q.N), p.check_same(q));
        r.a.resize(std::max(p.a.size(), q.a.size()), TruncSeries1<S>(0));
        for (int j = 0; j < (int)r.a.size(); ++j) r.a[j] = p.coeff_jet(j) - q.coeff_jet(j);
        r.canon();
        return r;
    }
    friend SymSeries operator*(const SymSeries& p, const SymSeries& q) {
        SymSeries r(std::min(p.N, q.N), p.check_same(q));
        int dp = p.degx(), dq = q.degx();
        if (dp < 0 || dq < 0) return r;
        r.a.resize(std::min(dp + dq, r.max_degx()) + 1, TruncSeries1<S>(0));
        for (int j = 0; j < (int)r.a.size(); ++j) r.a[j] = TruncSeries1<S>(std::max(r.h_order(j), 0));
        for (int i = 0; i <= dp; ++i) {
            if (p.a[i].is_zero()) continue;
            for (int j = 0; j <= dq && i + j <= r.max_degx(); ++j)
                r.a[i + j] = r.a[i + j] + p.coeff_jet(i) * q.coeff_jet(j);
        }
        r.canon();
        return r;
    }
    friend SymSeries operator*(const S& s, const SymSeries& p) {
        SymSeries r = p;
        for (auto& j : r.a) j = s * j;
        r.canon();
        return r;
    }
    friend bool operator==(const SymSeries& p, const SymSeries& q) {
        if (p.N != q.N || p.xw != q.xw) return false;
        for (int j = 0; j < (int)std::max(p.a.size(), q.a.size()); ++j)
            if (!(p.coeff_jet(j) == q.coeff_jet(j))) return false;
        return true;
    }

    int check_same(const SymSeries& q) const {
        if (xw != q.xw) throw DomainError("SymSeries: mixed x weights");
        return xw;
    }

    // substitute x -> power sum of weight xw, h -> xi1*xi2
    TruncSeries2<S> to_xi() const {
        using TS = TruncSeries2<S>;
        TS x = (xw == 1) ? (TS::xi1(N) + TS::xi2(N)) : power_sum<S>(xw, N);
        TS r = TS::zero(N);
        // Horner in x; the h-jet coefficient of x^j lands directly on
        // balanced monomials (b, b), so no h-powers need multiplying out.
        for (int j = degx(); j >= 0; --j) {
            r = r * x;
            TruncSeries1<S> jet = coeff_jet(j);
            for (int b = 0; b <= jet.N; ++b) {
                S v = jet.get(b);
                if (!tr::is_zero(v)) r.add_to(b, b, v);
            }
        }
        return r;
    }
};

// Exact conversion of a sigma-invariant (and, for x_weight = p > 1,
// Lambda-invariant) xi-series into SymSeries form.  Peels one power of h at
// a time: the restriction to xi2 = 0 determines the h-free part, and the
// remainder must be divisible by h.  Non-invariant input raises DomainError.
template <class S>
SymSeries<S> to_symmetric(const TruncSeries2<S>& f_in, int x_weight) {
    using tr = scalar_traits<S>;
    using TS = TruncSeries2<S>;
    SymSeries<S> out(f_in.N, x_weight);
    TS f = f_in;
    int N = f_in.N;
    TS x = (x_weight == 1) ? (TS::xi1(N) + TS::xi2(N)) : power_sum<S>(x_weight, N);
    double scale = std::max(f_in.norm(), 1.0);
    for (int b = 0; 2 * b <= N; ++b) {
        // restriction to xi2 = 0 must be a series in xi1^x_weight
        std::vector<S> axis(N + 1, tr::from_int(0));
        for (auto& [m, v] : f.c)
            if (m.second == 0) axis[m.first] = v;
        for (int m1 = 0; m1 <= N; ++m1) {
            if (tr::is_zero(axis[m1])) continue;
            if (m1 % x_weight != 0 || x_weight * (m1 / x_weight) + 2 * b > N) {
                if constexpr (tr::exact) throw DomainError("to_symmetric: series is not invariant");
                if (tr::abs(axis[m1]) > 1e-9 * scale)
                    throw DomainError("to_symmetric: series is not invariant");
                continue;
            }
        }
        // A_b(x): axis coefficient of xi1^(x_weight*j) becomes x^j
        TS sub = TS::zero(N);
        for (int j = 0; x_weight * j <= N; ++j) {
            S v = axis[x_weight * j];
            if (tr::is_zero(v)) continue;
            if (x_weight * j + 2 * b <= N) {
                if ((int)out.a.size() <= j) out.a.resize(j + 1, TruncSeries1<S>(0));
                TruncSeries1<S> cj = out.a[j].retruncate(out.h_order(j));
                cj.set(b, v);
                out.a[j] = cj;
                sub = sub + v * x.pow_int(j);
            }
        }
        f = f - sub;
        // the rest must be divisible by h = xi1*xi2
        TS g = TS::zero(N);
        for (auto& [m, v] : f.c) {
            if (m.first >= 1 && m.second >= 1) {
                g.set(m.first - 1, m.second - 1, v);
                continue;
            }
            if constexpr (tr::exact) throw DomainError("to_symmetric: series is not invariant");
            if (tr::abs(v) > 1e-9 * scale)
                throw DomainError("to_symmetric: series is not invariant");
        }
        f = g;
    }
    if (!f.is_zero()) {
        if constexpr (tr::exact) throw DomainError("to_symmetric: series is not invariant");
        if (f.norm() > 1e-9 * scale) throw DomainError("to_symmetric: series is not invariant");
    }
    out.canon();
    // round-trip consistency guard
    TruncSeries2<S> back = out.to_xi();
    double resid = (back - f_in).norm();
    if constexpr (tr::exact) {
        if (resid != 0.0) throw InternalConsistencyError("to_symmetric: round trip failed");
    } else if (resid > 1e-8 * scale) {
        throw InternalConsistencyError("to_symmetric: round trip failed");
    }
    return out;
}

// A distinguished (Weierstrass) polynomial in x: monic of degree d with the
// lower coefficient jets vanishing at h = 0.
template <class S>
bool is_weierstrass(const SymSeries<S>& P, int d, double tol = 1e-12) {
    using tr = scalar_traits<S>;
    if (P.degx() != d || d < 0) return false;
    TruncSeries1<S> lead = P.coeff_jet(d);
    S one = tr::from_int(1);
    for (int b = 0; b <= lead.N; ++b) {
        S want = (b == 0) ? one : tr::from_int(0);
        S diff = lead.get(b) - want;
        if (tr::exact ? !tr::is_zero(diff) : tr::abs(diff) > tol) return false;
    }
    for (int j = 0; j < d; ++j) {
        S c0 = P.coeff_jet(j).get(0);
        if (tr::exact ? !tr::is_zero(c0) : tr::abs(c0) > tol) return false;
    }
    return true;
}

// Weierstrass division U = Q + P*R with deg_x Q < deg_x P, solved level by
// level in powers of h.
template <class S>
std::pair<SymSeries<S>, SymSeries<S>> weierstrass_divide(const SymSeries<S>& U,
                                                         const SymSeries<S>& P) {
    using tr = scalar_traits<S>;
    U.check_same(P);
    int d = P.degx();
    if (!is_weierstrass(P, d)) throw DomainError("weierstrass_divide: divisor is not a distinguished polynomial");
    int N = std::min(U.N, P.N);
    int maxj = N / U.xw;
    int maxb = N / 2;
    // h-major layout: level[b][j] = coefficient of x^j h^b
    auto level_of = [&](const SymSeries<S>& f) {
        std::vector<std::vector<S>> L(maxb + 1, std::vector<S>(maxj + 1, tr::from_int(0)));
        for (int j = 0; j < (int)f.a.size() && j <= maxj; ++j)
            for (int b = 0; b <= f.coeff_jet(j).N && b <= maxb; ++b) L[b][j] = f.coeff_jet(j).get(b);
        return L;
    };
    auto LU = level_of(U), LP = level_of(P);
    std::vector<std::vector<S>> LQ(maxb + 1, std::vector<S>(maxj + 1, tr::from_int(0)));
    std::vector<std::vector<S>> LR(maxb + 1, std::vector<S>(maxj + 1, tr::from_int(0)));
    for (int n = 0; n <= maxb; ++n) {
        // B_n = U_n - sum_{m=1..n} T_m R_{n-m}, with T the sub-leading part of P
        std::vector<S> B = LU[n];
        for (int m = 1; m <= n; ++m)
            for (int j = 0; j <= maxj; ++j) {
                if (tr::is_zero(LP[m][j])) continue;
                for (int i = 0; i + j <= maxj; ++i) B[i + j] = B[i + j] - LP[m][j] * LR[n - m][i];
            }
        // leading-term correction: P's own level-n part beyond x^d is zero by
        // the distinguished form, but its monic x^d acts at level 0 only.
        for (int j = 0; j <= maxj; ++j) {
            if (j >= d)
                LR[n][j - d] = B[j];
            else
                LQ[n][j] = B[j];
        }
    }
    SymSeries<S> Q(N, U.xw), R(N, U.xw);
    auto pack = [&](std::vector<std::vector<S>>& L, SymSeries<S>& out) {
        out.a.assign(maxj + 1, TruncSeries1<S>(0));
        for (int j = 0; j <= maxj; ++j) {
            TruncSeries1<S> jet(std::max(out.h_order(j), 0));
            for (int b = 0; b <= maxb && b <= jet.N; ++b)
                if (!tr::is_zero(L[b][j])) jet.set(b, L[b][j]);
            out.a[j] = jet;
        }
        out.canon();
    };
    pack(LQ, Q);
    pack(LR, R);
    return {Q, R};
}

// Weierstrass preparation g = W * P: P distinguished of degree k =
// ord_x g(x,0), W a unit.  Solved level by level in h.
template <class S>
std::pair<SymSeries<S>, SymSeries<S>> weierstrass_prepare(const SymSeries<S>& g) {
    using tr = scalar_traits<S>;
    int N = g.N, maxj = N / g.xw, maxb = N / 2;
    // k = order of g(x, 0) in x
    int k = -1;
    for (int j = 0; j <= maxj; ++j)
        if (!tr::is_zero(g.coeff_jet(j).get(0))) {
            k = j;
            break;
        }
    if (k < 0) throw DomainError("weierstrass_prepare: g vanishes at h = 0");
    // the factorization is determined only on levels where the monic x^k
    // term is still inside the weighted truncation
    maxb = std::min(maxb, (N - g.xw * k) / 2);
    std::vector<std::vector<S>> Lg(maxb + 1, std::vector<S>(maxj + 1, tr::from_int(0)));
    for (int j = 0; j < (int)g.a.size() && j <= maxj; ++j)
        for (int b = 0; b <= g.coeff_jet(j).N && b <= maxb; ++b) Lg[b][j] = g.coeff_jet(j).get(b);
    // w0 = g(x,0)/x^k as a truncated unit in x, and its reciprocal mod x^(maxj+1)
    std::vector<S> w0(maxj + 1, tr::from_int(0)), w0inv(maxj + 1, tr::from_int(0));
    for (int j = k; j <= maxj; ++j) w0[j - k] = Lg[0][j];
    if (tr::is_zero(w0[0])) throw InternalConsistencyError("weierstrass_prepare: degenerate unit");
    w0inv[0] = tr::from_int(1) / w0[0];
    for (int j = 1; j <= maxj; ++j) {
        S s = tr::from_int(0);
        for (int i = 1; i <= j; ++i) s = s + w0[i] * w0inv[j - i];
        w0inv[j] = (tr::from_int(0) - s) / w0[0];
    }
    std::vector<std::vector<S>> LP(maxb + 1, std::vector<S>(maxj + 1, tr::from_int(0)));
    std::vector<std::vector<S>> LW(maxb + 1, std::vector<S>(maxj + 1, tr::from_int(0)));
    LP[0][k] = tr::from_int(1);
    LW[0] = w0;
    for (int n = 1; n <= maxb; ++n) {
        // C_n = g_n - sum_{m=1..n-1} W_m P_{n-m}
        std::vector<S> C = Lg[n];
        for (int m = 1; m < n; ++m)
            for (int j = 0; j <= maxj; ++j) {
                if (tr::is_zero(LW[m][j])) continue;
                for (int i = 0; i + j <= maxj; ++i) C[i + j] = C[i + j] + (tr::from_int(0) - LW[m][j]) * LP[n - m][i];
            }
        // solve W_n x^k + W_0 P_n = C_n with deg P_n < k:
        // P_n = (w0^{-1} C_n) mod x^k, W_n = (C_n - W_0 P_n) / x^k
        std::vector<S> Pn(maxj + 1, tr::from_int(0));
        for (int j = 0; j < k && j <= maxj; ++j) {
            S s = tr::from_int(0);
            for (int i = 0; i <= j; ++i) s = s + w0inv[i] * C[j - i];
            Pn[j] = s;
        }
        std::vector<S> res = C;
        for (int j = 0; j < k; ++j)
            for (int i = 0; i + j <= maxj; ++i) res[i + j] = res[i + j] - w0[i] * Pn[j];
        for (int j = 0; j < k; ++j) {
            if (tr::exact ? !tr::is_zero(res[j]) : tr::abs(res[j]) > 1e-8 * std::max(1.0, g.norm()))
                throw InternalConsistencyError("weierstrass_prepare: residual below x^k");
        }
        LP[n] = Pn;
        for (int j = k; j <= maxj; ++j) LW[n][j - k] = res[j];
    }
    SymSeries<S> P(N, g.xw), W(N, g.xw);
    auto pack = [&](std::vector<std::vector<S>>& L, SymSeries<S>& out) {
        out.a.assign(maxj + 1, TruncSeries1<S>(0));
        for (int j = 0; j <= maxj; ++j) {
            TruncSeries1<S> jet(std::min(std::max(out.h_order(j), 0), maxb));
            for (int b = 0; b <= maxb && b <= jet.N; ++b)
                if (!tr::is_zero(L[b][j])) jet.set(b, L[b][j]);
            out.a[j] = jet;
        }
        out.canon();
    };
    pack(LP, P);
    pack(LW, W);
    // keep P to its distinguished degree only
    if ((int)P.a.size() > k + 1) P.a.resize(k + 1), P.canon();
    return {P, W};
}

} // namespace parnf

#endif
