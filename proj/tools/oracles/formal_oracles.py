#!/usr/bin/env python3
"""Independent symbolic oracles for the C++ test fixtures.

Everything here is computed with sympy from first principles (Lie series,
brute-force composition, symbolic residues) and the printed values are frozen
into the C++ tests.  Run: python3 tools/oracles/formal_oracles.py
"""
import sympy as sp

x1, x2, w, h, t = sp.symbols("xi1 xi2 w h t")
N = 12


def truncate(expr, order=N):
    p = sp.Poly(sp.expand(expr), x1, x2)
    out = 0
    for (m1, m2), c in p.terms():
        if m1 + m2 <= order:
            out += c * x1**m1 * x2**m2
    return sp.expand(out)


def lie(X, f):
    return sp.expand(X[0] * sp.diff(f, x1) + X[1] * sp.diff(f, x2))


def exp_flow_component(X, f, order=N):
    """exp(X).f as a truncated Lie series; X must raise degree."""
    acc = f
    term = f
    n = 0
    while True:
        n += 1
        term = truncate(lie(X, term), order)
        if term == 0:
            break
        acc += term / sp.factorial(n)
        if n > 4 * order:
            raise RuntimeError("no termination")
    return sp.expand(acc)


def poly_coeffs(expr, order=N):
    p = sp.Poly(sp.expand(expr), x1, x2)
    return {m: c for m, c in zip(p.monoms(), p.coeffs())}


print("== exp_flow of h*E, xi1-component, order 12 ==")
X = (x1**2 * x2, -x1 * x2**2)  # h*E
c1 = exp_flow_component(X, x1)
print(sp.nsimplify(c1))

print("== exp_flow of xi1*E, xi1-component, order 6 ==")
X = (x1**2, -x1 * x2)
c1 = exp_flow_component(X, x1, order=6)
print(poly_coeffs(c1, 6))
print("   xi2-component:")
c2 = exp_flow_component(X, x2, order=6)
print(poly_coeffs(c2, 6))

print("== group law check for xi1*E at t and s as rationals 1/3, 2/3 ==")


def exp_flow_t(X, tv, order=8):
    Xt = (sp.Rational(tv) * X[0], sp.Rational(tv) * X[1])
    return (exp_flow_component(Xt, x1, order), exp_flow_component(Xt, x2, order))


F = exp_flow_t(X, sp.Rational(1, 3))
G = exp_flow_t(X, sp.Rational(2, 3))
H = exp_flow_t(X, 1)
comp = tuple(
    truncate(c.subs({x1: F[0], x2: F[1]}, simultaneous=True), 8) for c in G
)
print("group law holds:", all(sp.expand(a - b) == 0 for a, b in zip(comp, H)))

print("== Weierstrass division fixture ==")
U = sp.expand((w**2 - h) * (3 + w) + w + h**2)
P = w**2 - h
Qd, Rd = sp.div(U, P, w)
# division in w over polynomials in h: quotient R, remainder Q (deg_w < 2)
print("R (quotient) =", Qd, "   Q (remainder) =", Rd)

print("== Painleve VI fixture: theta=(0,0,1,0), k=3, x3*=1 ==")
th = (0, 0, 1, 0)
i, j, k = 1, 2, 3
xk = 1
a_i = sp.Rational(th[j - 1] * xk - 2 * th[i - 1], xk**2 - 4)
a_j = sp.Rational(th[i - 1] * xk - 2 * th[j - 1], xk**2 - 4)
xstar = {1: a_i, 2: a_j, 3: xk}
print("x* =", xstar)
xs = sp.symbols("x1:4")
Fexpr = (
    xs[0] * xs[1] * xs[2]
    + xs[0] ** 2 + xs[1] ** 2 + xs[2] ** 2
    - th[0] * xs[0] - th[1] * xs[1] - th[2] * xs[2] + th[3]
)
subs = {xs[c - 1]: xstar[c] for c in (1, 2, 3)}
print("F(x*) =", Fexpr.subs(subs))
Fk = sp.diff(Fexpr, xs[2]).subs(subs)
print("F_k(x*) =", Fk)
lam = sp.solve(sp.Symbol("L") + 1 / sp.Symbol("L") - (-2 + xk**2), sp.Symbol("L"))
print("lambda candidates =", [sp.simplify(v) for v in lam], "  e^{2pi i/3} =", sp.exp(2 * sp.pi * sp.I / 3).rewrite(sp.cos))
ctilde = sp.simplify(-2 * xk / Fk / (sp.exp(2 * sp.pi * sp.I / 3) - sp.exp(-2 * sp.pi * sp.I / 3)))
print("ctilde =", ctilde, "=", sp.nsimplify(ctilde), " numeric:", complex(ctilde))
print("fixed point condition:",
      sp.simplify((xk**2 - 4) * (xk**2 - th[k - 1] * xk + th[3]) + th[i - 1] ** 2 + th[j - 1] ** 2 - th[i - 1] * th[j - 1] * xk))

print("== k=1 leaf-field residue closed form, symbolic cross-check ==")
# Y_h = p*c*(y^2 + P0*y + h^p) d/dy in y = xi1^p ; residues of 1/Y at roots
y, P0, hp, cc, pp = sp.symbols("y P0 hp c p")
D = sp.sqrt(P0**2 - 4 * hp)
a1, a2 = (-P0 + D) / 2, (-P0 - D) / 2
res1 = sp.simplify(1 / (pp * cc * sp.diff(y**2 + P0 * y + hp, y)).subs(y, a1))
res2 = sp.simplify(1 / (pp * cc * sp.diff(y**2 + P0 * y + hp, y)).subs(y, a2))
print("res(a1) =", res1, "  expected 1/(p c sqrt(P0^2-4h^p)):", sp.simplify(res1 - 1 / (pp * cc * D)))
print("res(a2) =", res2, "  expected -1/(p c sqrt(..)):", sp.simplify(res2 + 1 / (pp * cc * D)))
