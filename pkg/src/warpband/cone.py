"""Tangent cones ``dt^2 + A^2 t^2 g_sphere`` with weight ``t^alpha``.

Contents: closed-form tensor components, the cross-section size condition,
the spectral descent identity on level sets, a Newton solver for leaves of
constant weighted-mean-curvature defect near a perturbed cone, and the sign
of the first-order defect between two cones.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import eval_gegenbauer, roots_gegenbauer

from .errors import ConvergenceError, DomainError, ParameterRangeError, PreconditionError
from .geometry import SymmetricBand, spectral_scalar_curvature, sphere_area
from .profiles import Profile, WarpingProfile
from .variation import weighted_mean_curvature

__all__ = [
    "ConeModel",
    "CrossSectionCondition",
    "LeafSolution",
    "cone_band",
    "cone_tensor_components",
    "cross_section_condition",
    "spectral_descent_residual",
    "cone_foliation_leaf",
    "leaf_residual",
    "leaf_jacobian",
    "eta_hat_sign_estimate",
]


@dataclass(frozen=True)
class ConeModel:
    """Cone of aperture ``A`` in dimension ``n`` with weight ``t^alpha``.

    ``alpha`` defaults to ``1/(2 - gamma)``; other exponents are accepted
    and reported through ``conformant``.
    """

    A: float
    n: int
    gamma: float
    alpha: float | None = None

    def __post_init__(self):
        if self.n not in (3, 4):
            raise ParameterRangeError(f"n must be 3 or 4, got {self.n}")
        if not self.A > 0:
            raise ParameterRangeError(f"aperture A must be positive, got {self.A}")
        if not self.gamma < 2:
            raise ParameterRangeError("cone analysis needs gamma < 2")
        if self.alpha is None:
            object.__setattr__(self, "alpha", 1.0 / (2.0 - self.gamma))

    @property
    def alpha_bar(self) -> float:
        return 1.0 / (2.0 - self.gamma)

    @property
    def conformant(self) -> bool:
        return math.isclose(self.alpha, self.alpha_bar, rel_tol=1e-14, abs_tol=1e-14)

    @property
    def mean_curvature_coefficient(self) -> float:
        """``c`` in the model prescription ``c / t``: ``(2(n-1) - (n-2) gamma)/(2 - gamma)``."""
        n, g = self.n, self.gamma
        return (2 * (n - 1) - (n - 2) * g) / (2 - g)


def cone_band(cone: ConeModel, t_min: float, t_max: float) -> SymmetricBand:
    """The cone restricted to ``[t_min, t_max]``; ``t_min = 0`` keeps the tip."""
    rho = WarpingProfile("linear", a=cone.A, domain=(t_min, t_max))
    u = WarpingProfile("power", a=1.0, b=cone.alpha, domain=(t_min, t_max))
    return SymmetricBand(cone.n, rho, u, cone.gamma, conical=(t_min == 0))


def cone_tensor_components(cone: ConeModel):
    """Closed forms ``(t^2 R(dt,dt), t^2 R(e,e))`` used by the cross-section condition.

    Returns ``((2(n-1) - (n-2) gamma)/(2 - gamma), (n-2)(A^-2 - 1) + 2(n-1)/(2-gamma))``.

    Notes
    -----
    The radial value coincides with ``modified_tensors`` on ``rho = A t``,
    ``u = t^(1/(2-gamma))``.  Evaluating the tensor definition directly
    gives ``(n-2)/A^2`` for the spherical component; the closed form here
    exceeds it by ``2(n-1)/(2-gamma) - (n-2)``.  Only the definition-based
    value makes the metric variational identity hold
    (``integral_identity_check`` with ``VARY_G`` on cone data).
    """
    n, g, A = cone.n, cone.gamma, cone.A
    radial = (2 * (n - 1) - (n - 2) * g) / (2 - g)
    spherical = (n - 2) * (A**-2 - 1) + 2 * (n - 1) / (2 - g)
    return radial, spherical


@dataclass(frozen=True)
class CrossSectionCondition:
    holds: bool
    margin: float

    def __bool__(self):
        return self.holds


def cross_section_condition(n: int, gamma: float, A: float) -> CrossSectionCondition:
    """``margin = (n-2)(A^-2 - 1) + 2(n-1)/(2-gamma)``; holds iff ``margin >= 0``."""
    if not gamma < 2:
        raise ParameterRangeError("cross-section condition needs gamma < 2")
    if not A > 0:
        raise ParameterRangeError("aperture must be positive")
    margin = (n - 2) * (A**-2 - 1) + 2 * (n - 1) / (2 - gamma)
    return CrossSectionCondition(bool(margin >= 0), float(margin))


def _sphere_laplacian(v: Profile, theta, dim, radius):
    v0, v1, v2 = (np.asarray(x) for x in v.derivs(theta, 2))
    th = np.asarray(theta, dtype=float)
    sin = np.sin(th)
    with np.errstate(divide="ignore", invalid="ignore"):
        cot_term = np.where(np.abs(sin) > 1e-12, np.cos(th) / sin * v1, v2)
    return v0, (v2 + (dim - 1) * cot_term) / radius**2


def spectral_descent_residual(cone: ConeModel, v: Profile, t, theta=None):
    """Max over ``theta`` of ``lambda(slice, v) - Lambda - alpha gamma (alpha+n-2)/t^2 - (n-1)(n-2)/(2 t^2)``.

    ``lambda(slice, v) = -gamma Delta v / v + R_slice / 2`` on the round
    slice of radius ``A t``; ``Lambda`` is the spectral scalar curvature of
    ``(cone metric, t^alpha v)``, its radial part from the cone band and the
    angular part ``-gamma Delta_slice v / v``.
    """
    n, g = cone.n, cone.gamma
    theta = np.linspace(0.05, math.pi - 0.05, 41) if theta is None else np.asarray(theta)
    r = cone.A * t
    v0, lap_v = _sphere_laplacian(v, theta, n - 1, r)
    if np.any(v0 <= 0):
        raise DomainError("v must be positive")
    lam_slice = -g * lap_v / v0 + 0.5 * (n - 1) * (n - 2) / r**2
    band = cone_band(cone, 0.5 * t, 2.0 * t)
    Lam = spectral_scalar_curvature(band, t) - g * lap_v / v0
    a = cone.alpha
    res = lam_slice - Lam - a * g * (a + n - 2) / t**2 - 0.5 * (n - 1) * (n - 2) / t**2
    return float(np.max(np.abs(res)))


# ---------------------------------------------------------------- leaves

@dataclass(frozen=True)
class LeafSolution:
    """Leaf ``tau = 1 + t v(theta)`` of constant defect in the rescaled cone.

    ``coefficients`` multiply Gegenbauer polynomials ``C_k^((n-2)/2)(cos theta)``
    for ``k = 1..modes``; ``residual_norm`` is ``max |F|`` over the
    quadrature nodes.
    """

    coefficients: np.ndarray
    eta_hat: float
    residual_norm: float
    iterations: int
    t: float
    converged: bool

    def v(self, theta, n):
        lam = (n - 2) / 2
        x = np.cos(np.asarray(theta, dtype=float))
        k = np.arange(1, self.coefficients.size + 1)
        return eval_gegenbauer(k, lam, x[..., None]) @ self.coefficients


class _LeafProblem:
    """Discrete leaf equation on Gegenbauer quadrature nodes."""

    def __init__(self, cone, g1, t, modes, u1=None, nodes=None):
        self.cone, self.t, self.modes = cone, t, modes
        n = cone.n
        lam = (n - 2) / 2
        nq = nodes or 2 * modes + 16
        x, w = roots_gegenbauer(nq, lam)
        self.x, self.w = x, w / w.sum()
        self.s = np.sqrt(1 - x**2)
        th = np.arccos(x)
        k = np.arange(1, modes + 1)
        X = x[:, None]
        self.B0 = eval_gegenbauer(k, lam, X)
        self.B1 = 2 * lam * eval_gegenbauer(k - 1, lam + 1, X)
        self.B2 = 4 * lam * (lam + 1) * np.where(
            k >= 2, eval_gegenbauer(np.maximum(k - 2, 0), lam + 2, X), 0.0)
        self.norms = self.w @ self.B0**2
        zero = WarpingProfile.constant(0.0)
        self.q = np.asarray((g1 or zero).derivs(th, 1))
        self.p = np.asarray((u1 or zero).derivs(th, 1))

    def defect(self, c):
        """``eta_hat(theta)`` on the leaf for coefficients ``c``."""
        cone, t = self.cone, self.t
        n, g, A = cone.n, cone.gamma, cone.A
        x, s = self.x, self.s
        v = self.B0 @ c
        vx, vxx = self.B1 @ c, self.B2 @ c
        f = 1 + t * v
        f1 = -t * s * vx
        f2 = t * (s**2 * vxx - x * vx)
        q, q1 = self.q
        p, p1 = self.p
        P = 1 + 2 * t * f * q
        B2 = A**2 * f**2 * P
        bt = 1 / f + t * q / P            # B_tau / B
        bth = t * f * q1 / P              # B_theta / B
        W = np.sqrt(1 + f1**2 / B2)
        Wth = (f1 * f2 / B2 - f1**2 * bth / B2) / W
        Nt = 1 / W
        Nth = -f1 / (B2 * W)
        dNt = f1**2 / B2 * bt / W**3
        dNth = -f2 / (B2 * W) + 2 * f1 * bth / (B2 * W) + f1 * Wth / (B2 * W**2)
        H = dNt + Nt * (n - 1) * bt + dNth + Nth * ((n - 1) * bth + (n - 2) * x / s)
        U = 1 + t * f * p
        dlogu = Nt * (cone.alpha / f + t * p / U) + Nth * t * f * p1 / U
        return H + g * dlogu - cone.mean_curvature_coefficient / f

    def residual(self, c):
        F = self.defect(c) / self.t
        F = F - self.w @ F
        return F, (self.w * F) @ self.B0 / self.norms

    def jacobian(self, c, h=1e-7):
        J = np.empty((self.modes, self.modes))
        for k in range(self.modes):
            e = np.zeros(self.modes)
            e[k] = h
            J[:, k] = (self.residual(c + e)[1] - self.residual(c - e)[1]) / (2 * h)
        return J


def _leaf_problem(cone, g1, t, modes, u1=None):
    if modes < 2:
        raise PreconditionError("the leaf solver needs at least 2 modes")
    if not t > 0:
        raise PreconditionError("scale t must be positive")
    prob = _LeafProblem(cone, g1, t, modes, u1)
    size = 2 * t * max(np.max(np.abs(prob.q[0])), np.max(np.abs(prob.p[0])))
    if size >= 0.1:
        raise PreconditionError(
            f"perturbation too large at scale t={t}: ratio {size:.3g} >= 0.1")
    return prob


def leaf_residual(cone, g1, t, coefficients, modes=None, u1=None):
    """Nodal values of ``F(t, v)`` for the given coefficients."""
    c = np.asarray(coefficients, dtype=float)
    prob = _leaf_problem(cone, g1, t, modes or c.size, u1)
    return prob.residual(c)[0]


def leaf_jacobian(cone, g1, t, modes=16, coefficients=None, u1=None):
    """Galerkin Jacobian of ``F(t, .)``; tends to ``diag(k(k+n-2)/A^2)`` as ``t -> 0``."""
    prob = _leaf_problem(cone, g1, t, modes, u1)
    c = np.zeros(modes) if coefficients is None else np.asarray(coefficients, dtype=float)
    return prob.jacobian(c)


def cone_foliation_leaf(cone: ConeModel, g1: Profile | None, t: float, modes: int = 16,
                        u1: Profile | None = None, tol: float = 1e-13,
                        max_iter: int = 50) -> LeafSolution:
    """Solve for the leaf of constant defect ``eta_hat`` near the unit cross-section.

    The rescaled metric is ``dtau^2 + A^2 tau^2 (1 + 2 t tau q(theta)) g_sphere``
    with ``q = g1`` and weight ``tau^alpha (1 + t tau p(theta))`` with
    ``p = u1``.  The leaf is the graph ``tau = 1 + t v(theta)`` with ``v`` of
    zero average, and ``F(t, v) = eta_hat / t - mean(eta_hat / t)`` where
    ``eta_hat = H + gamma (log u)_nu - c / tau`` is driven to zero by Newton
    iteration on a Galerkin projection with a finite-difference Jacobian.

    Raises
    ------
    PreconditionError
        ``modes < 2`` or ``2 t max|q| >= 0.1``.
    ConvergenceError
        No convergence within ``max_iter`` iterations.
    """
    prob = _leaf_problem(cone, g1, t, modes, u1)
    c = np.zeros(modes)
    F, R = prob.residual(c)
    it = 0
    while np.max(np.abs(R)) > tol:
        if it >= max_iter:
            sol = LeafSolution(c, float(prob.w @ prob.defect(c)), float(np.max(np.abs(F))),
                               it, t, False)
            raise ConvergenceError(f"leaf Newton iteration did not converge at t={t}", sol)
        step = np.linalg.solve(prob.jacobian(c), R)
        c = c - step
        it += 1
        F, R = prob.residual(c)
        if np.max(np.abs(step)) < 1e-15 * (1 + np.max(np.abs(c))):
            break
    eta = float(prob.w @ prob.defect(c))
    return LeafSolution(c, eta, float(np.max(np.abs(F))), it, t, True)


# ---------------------------------------------------------------- comparison

def eta_hat_sign_estimate(cone: ConeModel, comparison: ConeModel, t: float = 1.0,
                          eps: float = 1e-4, nodes: int = 200) -> float:
    """Normalized first-order defect when the comparison cone is opened to ``cone``.

    The metric is varied along ``rho_s = (A_m + s (A - A_m)) r`` on the
    comparison region ``{r <= t}`` with the comparison weight ``r^alpha``.
    The return value is

        t (sum_boundary int delta(H + gamma u_nu/u) u^2
           + int u^2 delta Lambda) / (u(t)^2 |slice_t|),

    with the variation taken by centered differences in ``s`` and the bulk
    integral by Gauss-Legendre quadrature on ``(0, t)``.  It is scale
    invariant, zero for identical cones and non-positive when ``A >= A_m``.

    Raises
    ------
    PreconditionError
        Mismatched ``n``/``gamma``, a non-conformant comparison weight, or
        ``A < A_m``.
    """
    if cone.n != comparison.n or cone.gamma != comparison.gamma:
        raise PreconditionError("cones must share n and gamma")
    if not comparison.conformant:
        raise PreconditionError("comparison cone must carry the weight t^(1/(2-gamma))")
    Am, A = comparison.A, cone.A
    if A < Am * (1 - 1e-14):
        raise PreconditionError(f"cone aperture {A} is below the comparison aperture {Am}")
    n, g, a = cone.n, cone.gamma, comparison.alpha
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    r = 0.5 * t * (xg + 1)
    wg = 0.5 * t * wg
    lo = float(r.min())

    def band(s):
        return SymmetricBand(n, WarpingProfile("linear", a=Am + s * (A - Am), domain=(lo, t)),
                             WarpingProfile("power", b=a, domain=(lo, t)), g)

    bp, bm = band(eps), band(-eps)
    omega = sphere_area(n - 1)
    u2 = r ** (2 * a)
    dlam = (spectral_scalar_curvature(bp, r) - spectral_scalar_curvature(bm, r)) / (2 * eps)
    bulk = omega * np.dot(wg, u2 * dlam * (Am * r) ** (n - 1))
    dH = (weighted_mean_curvature(bp, t) - weighted_mean_curvature(bm, t)) / (2 * eps)
    area = omega * (Am * t) ** (n - 1)
    total = bulk + t ** (2 * a) * area * dH
    return float(t * total / (t ** (2 * a) * area))
