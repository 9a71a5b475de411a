#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "parnf/symmetric.hpp"

using namespace parnf;

using TSd = TruncSeries2<cplx>;
using SSd = SymSeries<cplx>;
using TSq = TruncSeries2<ratc>;
using SSq = SymSeries<ratc>;

namespace {

SSd random_sym(std::mt19937& rng, int N, int xw, int maxdeg) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SSd r(N, xw);
    for (int j = 0; j <= maxdeg && xw * j <= N; ++j) {
        TruncSeries1<cplx> jet(r.h_order(j));
        for (int b = 0; b <= jet.N; ++b) jet.set(b, cplx(u(rng), u(rng)));
        r.set_jet(j, jet);
    }
    return r;
}

} // namespace

TEST_CASE("to_symmetric round trips") {
    int N = 12;
    std::mt19937 rng(17);
    for (int xw : {1, 2, 3}) {
        for (int trial = 0; trial < 5; ++trial) {
            SSd s = random_sym(rng, N, xw, N / xw);
            TSd f = s.to_xi();
            SSd back = to_symmetric(f, xw);
            REQUIRE((back - s).norm() < 1e-10);
        }
    }
    // h itself
    SSd hs = to_symmetric(TSd::h(N), 1);
    REQUIRE(hs == SSd::h(N, 1));
    // w^2 = u~ as series in w
    TSd w = TSd::xi1(N) + TSd::xi2(N);
    SSd w2 = to_symmetric(w * w, 1);
    REQUIRE(w2 == SSd::x(N, 1) * SSd::x(N, 1));
    // u = xi1^2 + xi2^2 in weight-2 basis is just x
    REQUIRE(to_symmetric(power_sum<cplx>(2, N), 2) == SSd::x(N, 2));
    // non-invariant input refused
    REQUIRE_THROWS_AS(to_symmetric(TSd::xi1(N), 1), DomainError);
    REQUIRE_THROWS_AS(to_symmetric(w, 2), DomainError);
}

TEST_CASE("weierstrass_divide fixtures") {
    int N = 12;
    SSd w = SSd::x(N, 1), h = SSd::h(N, 1), one = SSd::constant(cplx(1.0), N, 1);
    SSd P = w * w - h;

    // degree below divisor
    auto [q1, r1] = weierstrass_divide(one + w, P);
    REQUIRE(q1 == one + w);
    REQUIRE(r1.is_zero());

    // single division step: w^2 = h + P*1
    auto [q2, r2] = weierstrass_divide(w * w, P);
    REQUIRE(q2 == h);
    REQUIRE(r2 == one);

    // frozen fixture: U = (w^2-h)(3+w) + w + h^2 -> Q = w + h^2, R = 3 + w
    SSd three = SSd::constant(cplx(3.0), N, 1);
    SSd U = P * (three + w) + w + h * h;
    auto [q3, r3] = weierstrass_divide(U, P);
    REQUIRE(q3 == w + h * h);
    REQUIRE(r3 == three + w);

    // bitwise determinism
    auto [q4, r4] = weierstrass_divide(U, P);
    REQUIRE(q4.a.size() == q3.a.size());
    for (size_t j = 0; j < q3.a.size(); ++j) REQUIRE(q4.a[j].c == q3.a[j].c);

    // non-distinguished divisor refused
    REQUIRE_THROWS_AS(weierstrass_divide(U, w * w - one), DomainError);
    REQUIRE_THROWS_AS(weierstrass_divide(U, cplx(2.0) * (w * w) - h), DomainError);
}

TEST_CASE("weierstrass_divide random reconstruction") {
    int N = 12;
    std::mt19937 rng(23);
    for (int trial = 0; trial < 8; ++trial) {
        int xw = (trial % 2) ? 2 : 1;
        int d = 1 + trial % 3;
        if (xw * d > N / 2) continue;
        SSd P(N, xw);
        P.set_jet(d, TruncSeries1<cplx>::one(P.h_order(d)));
        std::uniform_real_distribution<double> un(-1.0, 1.0);
        for (int j = 0; j < d; ++j) {
            TruncSeries1<cplx> jet(P.h_order(j));
            for (int b = 1; b <= jet.N; ++b) jet.set(b, cplx(un(rng), un(rng)));
            P.set_jet(j, jet);
        }
        SSd U = random_sym(rng, N, xw, N / xw);
        auto [Q, R] = weierstrass_divide(U, P);
        REQUIRE(Q.degx() < d);
        REQUIRE((Q + P * R - U).norm() < 1e-9 * std::max(1.0, U.norm()));
    }
}

TEST_CASE("weierstrass_prepare") {
    int N = 12;
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> un(-1.0, 1.0);
    for (int trial = 0; trial < 8; ++trial) {
        int xw = (trial % 2) ? 2 : 1;
        int k = trial % 3; // distinguished degree, k = 0 allowed (unit g)
        SSd P(N, xw);
        P.set_jet(k, TruncSeries1<cplx>::one(P.h_order(k)));
        for (int j = 0; j < k; ++j) {
            TruncSeries1<cplx> jet(P.h_order(j));
            for (int b = 1; b <= jet.N; ++b) jet.set(b, cplx(un(rng), un(rng)));
            P.set_jet(j, jet);
        }
        SSd W = random_sym(rng, N, xw, 2);
        TruncSeries1<cplx> w0 = W.coeff_jet(0);
        w0.set(0, cplx(1.0 + un(rng) * 0.3, un(rng) * 0.3)); // keep W a unit
        W.set_jet(0, w0);
        SSd g = W * P;
        auto [Pgot, Wgot] = weierstrass_prepare(g);
        REQUIRE(Pgot.degx() == k);
        REQUIRE(is_weierstrass(Pgot, k, 1e-8));
        // the factorization is determined on h-levels <= (N - xw*k)/2
        int levels = (N - xw * k) / 2;
        SSd Pref = P;
        for (auto& jet : Pref.a) jet = jet.retruncate(std::min(jet.N, levels));
        SSd Pcut = Pgot;
        for (auto& jet : Pcut.a) jet = jet.retruncate(std::min(jet.N, levels));
        REQUIRE((Pcut - Pref).norm() < 1e-8);
        SSd resid = Wgot * Pgot - g;
        for (auto& jet : resid.a) jet = jet.retruncate(std::min(jet.N, levels));
        REQUIRE(resid.norm() < 1e-8 * std::max(1.0, g.norm()));
    }
    SSd hzero(N, 1);
    hzero.set_jet(0, TruncSeries1<cplx>(hzero.h_order(0)).retruncate(hzero.h_order(0)));
    REQUIRE_THROWS_AS(weierstrass_prepare(SSd::h(N, 1)), DomainError);
}

TEST_CASE("exact mode symmetric algebra") {
    int N = 10;
    auto q = [](long n, long d = 1) { return ratc(rational(n) / d); };
    SSq w = SSq::x(N, 1), h = SSq::h(N, 1), one = SSq::constant(q(1), N, 1);
    SSq P = w * w - h;
    SSq U = P * (SSq::constant(q(3), N, 1) + w) + w + h * h;
    auto [Q, R] = weierstrass_divide(U, P);
    REQUIRE(Q == w + h * h);
    REQUIRE(R == SSq::constant(q(3), N, 1) + w);
    // conversion exactness
    TSq f = (w * w * h + h * h + w).to_xi();
    REQUIRE(to_symmetric(f, 1) == w * w * h + h * h + w);
}
