"""Independent symbolic oracles.

Curvature, Hessians and Laplacians are computed with sympy straight from
the metric components of ``dt^2 + rho(t)^2 g_sphere`` in polar coordinates,
sharing no code with the package.
"""
from __future__ import annotations

import functools

import numpy as np
import sympy as sp

t = sp.Symbol("t", real=True)


@functools.lru_cache(maxsize=None)
def _coords(n):
    angles = sp.symbols(f"x1:{n}", real=True)
    return (t, *angles)


def _sphere_metric(n, rho):
    """Diagonal metric of ``dt^2 + rho^2 g_{S^{n-1}}`` in polar coordinates."""
    x = _coords(n)
    diag = [sp.Integer(1)]
    f = rho**2
    for i in range(1, n):
        diag.append(f)
        f = f * sp.sin(x[i]) ** 2
    return sp.diag(*diag)


class WarpedOracle:
    """Symbolic geometry of ``(dt^2 + rho^2 g_sphere, u(t))``.

    Components along ``d/dt`` and along the first unit angular direction
    are returned as functions of ``t`` (the second angle is frozen at
    ``pi/2`` for n = 4, where the frame direction is regular).
    """

    def __init__(self, n, rho, u=sp.Integer(1), conformal=None):
        self.n = n
        self.x = _coords(n)
        self.g = _sphere_metric(n, rho)
        if conformal is not None:
            self.g = conformal * self.g
        self.ginv = self.g.inv()
        self.u = u
        self._chris = None

    @property
    def christoffel(self):
        if self._chris is None:
            n, x, g, gi = self.n, self.x, self.g, self.ginv
            G = [[[sp.Integer(0)] * n for _ in range(n)] for _ in range(n)]
            for k in range(n):
                for i in range(n):
                    for j in range(n):
                        G[k][i][j] = sp.simplify(sum(
                            gi[k, l] * (sp.diff(g[l, i], x[j]) + sp.diff(g[l, j], x[i])
                                        - sp.diff(g[i, j], x[l])) / 2 for l in range(n)))
            self._chris = G
        return self._chris

    def ricci(self):
        n, x, G = self.n, self.x, self.christoffel
        Ric = sp.zeros(n, n)
        for i in range(n):
            for j in range(n):
                Ric[i, j] = sp.simplify(sum(
                    sp.diff(G[k][i][j], x[k]) - sp.diff(G[k][i][k], x[j])
                    + sum(G[k][k][l] * G[l][i][j] - G[k][j][l] * G[l][i][k] for l in range(n))
                    for k in range(n)))
        return Ric

    def scalar(self):
        Ric = self.ricci()
        return sp.simplify(sum(self.ginv[i, j] * Ric[i, j]
                               for i in range(self.n) for j in range(self.n)))

    def hessian(self, f):
        n, x, G = self.n, self.x, self.christoffel
        return sp.Matrix(n, n, lambda i, j: sp.diff(f, x[i], x[j])
                         - sum(G[k][i][j] * sp.diff(f, x[k]) for k in range(n)))

    def laplacian(self, f):
        n, x, g = self.n, self.x, self.g
        sq = sp.sqrt(g.det())
        return sp.simplify(sum(sp.diff(sq * self.ginv[i, i] * sp.diff(f, x[i]), x[i])
                               for i in range(n)) / sq)

    def spectral(self, gamma):
        """``-gamma Delta u / u + R / 2``."""
        return sp.simplify(-gamma * self.laplacian(self.u) / self.u + self.scalar() / 2)

    def modified_ricci(self, gamma):
        """The modified Ricci tensor, built term by term from its definition."""
        u, g = self.u, self.g
        du = sp.Matrix([sp.diff(u, xi) for xi in self.x])
        H = self.hessian(u)
        u2 = u**2
        # nabla(u du) = du (x) du + u Hess u
        grad_udu = du * du.T + u * H
        div_udu = sum(self.ginv[i, i] * grad_udu[i, i] for i in range(self.n))
        return (self.ricci() - 2 * gamma * H / u + 2 * gamma * grad_udu / u2
                - gamma * div_udu / u2 * g - self.hessian(u2) / u2
                + self.laplacian(u2) / u2 * g)

    def frame_components(self, T):
        """Unit-frame values ``(T(dt, dt), T(e, e))`` as functions of ``t``."""
        sub = {xi: sp.pi / 2 for xi in self.x[1:]}
        rad = sp.simplify(T[0, 0].subs(sub))
        sph = sp.simplify((T[1, 1] / self.g[1, 1]).subs(sub))
        return lambdify(rad), lambdify(sph)


def lambdify(expr):
    # radial quantities do not depend on the angles; freeze any left over
    expr = expr.subs({x: sp.pi / 3 for x in expr.free_symbols if x != t})
    f = sp.lambdify(t, expr, "numpy")
    return lambda s: np.broadcast_to(np.asarray(f(np.asarray(s, dtype=float)), dtype=float),
                                     np.shape(s)).astype(float)


def fd_derivative(f, s, h=1e-4):
    """Fourth-order centered first derivative."""
    return (-f(s + 2 * h) + 8 * f(s + h) - 8 * f(s - h) + f(s - 2 * h)) / (12 * h)


@functools.lru_cache(maxsize=None)
def spectral_generic(n):
    """``f(gamma, r, r1, r2, u, u1, u2)``: spectral scalar curvature for arbitrary profiles."""
    R, U = sp.Function("R")(t), sp.Function("U")(t)
    o = WarpedOracle(n, R, U)
    g = sp.Symbol("g")
    expr = o.spectral(g)
    expr = expr.subs({x: sp.pi / 3 for x in o.x[1:]})
    syms = sp.symbols("r r1 r2 u u1 u2")
    rep = {R.diff(t, 2): syms[2], U.diff(t, 2): syms[5]}
    expr = expr.subs(rep).subs({R.diff(t): syms[1], U.diff(t): syms[4]})
    expr = sp.simplify(expr.subs({R: syms[0], U: syms[3]}))
    return sp.lambdify((g, *syms), expr, "numpy")


def model_oracle_coefficients(n, gamma, Lambda):
    """Corrected amplitude/frequency, found by solving the model conditions symbolically.

    With ``xi = a sin(b t)`` and ``u = xi^(1/(2-gamma))`` the spectral
    curvature is ``c0 + c2 / xi^2``; requiring ``c0 = Lambda`` and
    ``c2 = 0`` fixes ``a`` and ``b``.
    """
    a, b, s = sp.symbols("a b s", positive=True)
    al = sp.Rational(1) / (2 - sp.nsimplify(gamma))
    f = spectral_generic(n)
    # evaluate symbolically through the generic expression
    r = a * sp.sin(b * t)
    vals = [r, r.diff(t), r.diff(t, 2), r**al, (r**al).diff(t), (r**al).diff(t, 2)]
    expr = sp.simplify(f(sp.nsimplify(gamma), *vals))
    expr = sp.simplify(expr.subs(sp.sin(b * t), s).subs(sp.cos(b * t) ** 2, 1 - s**2))
    expr = sp.expand(sp.simplify(expr))
    num, den = sp.fraction(sp.together(expr))
    poly = sp.Poly(sp.expand(num - sp.nsimplify(Lambda) * den), s)
    sol = sp.solve(poly.coeffs(), [a, b], dict=True)
    sol = [d for d in sol if d[a].is_positive and d[b].is_positive]
    return float(sol[0][a]), float(sol[0][b])
