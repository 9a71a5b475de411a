#ifndef PARNF_SCALAR_HPP
#define PARNF_SCALAR_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>

#include "errors.hpp"

namespace parnf {

using cplx = std::complex<double>;
using rational = boost::multiprecision::cpp_rational;

// Gaussian rational: exact coefficient scalar for the symbolic pipelines.
struct ratc {
    rational re{0}, im{0};

    ratc() = default;
    ratc(long r) : re(r) {}
    ratc(rational r) : re(std::move(r)) {}
    ratc(rational r, rational i) : re(std::move(r)), im(std::move(i)) {}

    friend ratc operator+(const ratc& a, const ratc& b) { return {a.re + b.re, a.im + b.im}; }
    friend ratc operator-(const ratc& a, const ratc& b) { return {a.re - b.re, a.im - b.im}; }
    friend ratc operator-(const ratc& a) { return {-a.re, -a.im}; }
    friend ratc operator*(const ratc& a, const ratc& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend ratc operator/(const ratc& a, const ratc& b) {
        rational n = b.re * b.re + b.im * b.im;
        if (n == 0) throw DomainError("ratc: division by zero");
        return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
    }
    ratc& operator+=(const ratc& b) { return *this = *this + b; }
    ratc& operator-=(const ratc& b) { return *this = *this - b; }
    ratc& operator*=(const ratc& b) { return *this = *this * b; }
    ratc& operator/=(const ratc& b) { return *this = *this / b; }
    friend bool operator==(const ratc& a, const ratc& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const ratc& a, const ratc& b) { return !(a == b); }
};

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<cplx> {
    static constexpr bool exact = false;
    static bool is_zero(const cplx& v) { return v == cplx(0.0, 0.0); }
    static double abs(const cplx& v) { return std::abs(v); }
    static cplx from_int(long n) { return cplx(double(n), 0.0); }
    static cplx from_ratio(long n, long d) { return cplx(double(n) / double(d), 0.0); }
    static cplx to_cplx(const cplx& v) { return v; }
};

template <>
struct scalar_traits<ratc> {
    static constexpr bool exact = true;
    static bool is_zero(const ratc& v) { return v.re == 0 && v.im == 0; }
    static double abs(const ratc& v) {
        double r = static_cast<double>(v.re), i = static_cast<double>(v.im);
        return std::hypot(r, i);
    }
    static ratc from_int(long n) { return ratc(rational(n)); }
    static ratc from_ratio(long n, long d) { return ratc(rational(n) / rational(d)); }
    static cplx to_cplx(const ratc& v) {
        return {static_cast<double>(v.re), static_cast<double>(v.im)};
    }
};

} // namespace parnf

#endif
