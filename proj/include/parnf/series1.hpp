#ifndef PARNF_SERIES1_HPP
#define PARNF_SERIES1_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "errors.hpp"
#include "scalar.hpp"

namespace parnf {

// Truncated univariate power series (jets in h).  coeffs[j] is the h^j
// coefficient; trunc_order N means degrees 0..N are represented.
template <class S>
struct TruncSeries1 {
    using traits = scalar_traits<S>;

    std::vector<S> c;
    int N = 0;

    TruncSeries1() = default;
    explicit TruncSeries1(int order) : c(), N(order) {}
    TruncSeries1(std::vector<S> v, int order) : c(std::move(v)), N(order) { canon(); }

    static TruncSeries1 constant(const S& v, int order) {
        TruncSeries1 r(order);
        r.set(0, v);
        return r;
    }
    static TruncSeries1 one(int order) { return constant(traits::from_int(1), order); }

    void canon() {
        if ((int)c.size() > N + 1) c.resize(N + 1);
        while (!c.empty() && traits::is_zero(c.back())) c.pop_back();
    }
    bool is_zero() const { return c.empty(); }
    S get(int j) const { return (j >= 0 && j < (int)c.size()) ? c[j] : S{}; }
    void set(int j, const S& v) {
        if (j > N) return;
        if ((int)c.size() <= j) c.resize(j + 1);
        c[j] = v;
        canon();
    }
    // lowest nonzero degree, or N+1 when zero
    int order0() const {
        for (int j = 0; j < (int)c.size(); ++j)
            if (!traits::is_zero(c[j])) return j;
        return N + 1;
    }
    TruncSeries1 retruncate(int order) const {
        TruncSeries1 r(order);
        r.c = c;
        r.canon();
        return r;
    }
    friend bool operator==(const TruncSeries1& a, const TruncSeries1& b) {
        for (int j = 0; j <= std::max((int)a.c.size(), (int)b.c.size()); ++j)
            if (!traits::is_zero(a.get(j) - b.get(j))) return false;
        return true;
    }
    double norm() const {
        double m = 0;
        for (auto& v : c) m = std::max(m, traits::abs(v));
        return m;
    }

    friend TruncSeries1 operator+(const TruncSeries1& a, const TruncSeries1& b) {
        TruncSeries1 r(std::min(a.N, b.N));
        r.c.resize(std::min((int)std::max(a.c.size(), b.c.size()), r.N + 1));
        for (int j = 0; j < (int)r.c.size(); ++j) r.c[j] = a.get(j) + b.get(j);
        r.canon();
        return r;
    }
    friend TruncSeries1 operator-(const TruncSeries1& a, const TruncSeries1& b) {
        TruncSeries1 r(std::min(a.N, b.N));
        r.c.resize(std::min((int)std::max(a.c.size(), b.c.size()), r.N + 1));
        for (int j = 0; j < (int)r.c.size(); ++j) r.c[j] = a.get(j) - b.get(j);
        r.canon();
        return r;
    }
    friend TruncSeries1 operator-(const TruncSeries1& a) {
        TruncSeries1 r = a;
        for (auto& v : r.c) v = -v;
        return r;
    }
    friend TruncSeries1 operator*(const TruncSeries1& a, const TruncSeries1& b) {
        TruncSeries1 r(std::min(a.N, b.N));
        r.c.assign(r.N + 1, S{});
        for (int i = 0; i < (int)a.c.size(); ++i) {
            if (traits::is_zero(a.c[i])) continue;
            for (int j = 0; j < (int)b.c.size() && i + j <= r.N; ++j)
                r.c[i + j] += a.c[i] * b.c[j];
        }
        r.canon();
        return r;
    }
    friend TruncSeries1 operator*(const S& s, const TruncSeries1& a) {
        TruncSeries1 r = a;
        for (auto& v : r.c) v = s * v;
        r.canon();
        return r;
    }

    // multiply by h^k (degrees beyond N fall off)
    TruncSeries1 shift(int k) const {
        TruncSeries1 r(N);
        r.c.assign(std::min((int)c.size() + k, N + 1), S{});
        for (int j = 0; j < (int)c.size() && j + k <= N; ++j) r.c[j + k] = c[j];
        r.canon();
        return r;
    }
    // exact division by h^k; requires the low coefficients to vanish
    TruncSeries1 unshift(int k) const {
        for (int j = 0; j < k && j < (int)c.size(); ++j)
            if (!traits::is_zero(c[j])) throw DomainError("TruncSeries1: not divisible by h^k");
        TruncSeries1 r(N);
        for (int j = k; j < (int)c.size(); ++j) r.set(j - k, c[j]);
        return r;
    }

    // reciprocal of a unit
    TruncSeries1 inv() const {
        if (c.empty() || traits::is_zero(c[0])) throw DomainError("TruncSeries1: not a unit");
        TruncSeries1 r(N);
        r.c.assign(N + 1, S{});
        S c0inv = traits::from_int(1) / c[0];
        r.c[0] = c0inv;
        for (int j = 1; j <= N; ++j) {
            S acc{};
            for (int i = 1; i <= j; ++i) acc += get(i) * r.c[j - i];
            r.c[j] = -(c0inv * acc);
        }
        r.canon();
        return r;
    }

    // composition this(f(h)) with f(0)=0
    TruncSeries1 compose(const TruncSeries1& f) const {
        if (!f.c.empty() && !traits::is_zero(f.c[0]))
            throw DomainError("TruncSeries1: composing with non-vanishing series");
        int n = std::min(N, f.N);
        TruncSeries1 r(n), p = TruncSeries1::one(n);
        for (int j = 0; j < (int)c.size(); ++j) {
            if (!traits::is_zero(c[j])) r = r + c[j] * p;
            if (j + 1 < (int)c.size()) p = p * f;
            if (p.is_zero()) break;
        }
        return r;
    }

    // functional inverse of f with f(0)=0, f'(0)!=0 (Newton on composition)
    TruncSeries1 reversion() const {
        if (order0() != 1) throw DomainError("TruncSeries1: reversion needs order exactly 1");
        TruncSeries1 g(N);
        g.set(1, traits::from_int(1) / c[1]);
        for (int it = 0; it < N + 2; ++it) {
            TruncSeries1 err = compose(g);
            err.set(1, err.get(1) - traits::from_int(1)); // err = f(g(h)) - h
            if (err.is_zero()) break;
            // g <- g - err / f'(g)
            TruncSeries1 fp(N);
            for (int j = 1; j < (int)c.size(); ++j) fp.set(j - 1, traits::from_int(j) * c[j]);
            g = g - (err * fp.compose(g).inv());
        }
        return g;
    }

    // derivative d/dh
    TruncSeries1 deriv() const {
        TruncSeries1 r(N);
        for (int j = 1; j < (int)c.size(); ++j) r.set(j - 1, traits::from_int(j) * c[j]);
        return r;
    }

    cplx eval(cplx h) const {
        cplx acc = 0;
        for (int j = (int)c.size() - 1; j >= 0; --j) acc = acc * h + traits::to_cplx(c[j]);
        return acc;
    }
};

// u(h)^alpha for a unit u with u(0)=1, real exponent (floating scalars only):
// exp(alpha*log u) truncated.
inline TruncSeries1<cplx> pow_unit(const TruncSeries1<cplx>& u, double alpha) {
    if (u.c.empty() || std::abs(u.c[0] - cplx(1.0)) > 1e-9)
        throw DomainError("pow_unit: series must have constant term 1");
    int N = u.N;
    TruncSeries1<cplx> v = u;
    v.set(0, cplx(0.0)); // v = u - 1
    // log(1+v)
    TruncSeries1<cplx> lg(N), p = v;
    for (int n = 1; n <= N && !p.is_zero(); ++n) {
        lg = lg + cplx(((n % 2) ? 1.0 : -1.0) / n) * p;
        p = p * v;
    }
    lg = cplx(alpha) * lg;
    // exp(lg)
    TruncSeries1<cplx> r = TruncSeries1<cplx>::one(N), t = TruncSeries1<cplx>::one(N);
    for (int n = 1; n <= N && !t.is_zero(); ++n) {
        t = cplx(1.0 / n) * (t * lg);
        r = r + t;
    }
    return r;
}

} // namespace parnf

#endif
