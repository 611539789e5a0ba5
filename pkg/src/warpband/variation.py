"""Finite-difference and quadrature checks of the variational identities.

Every check returns a ``QuadraticFormReport`` holding both sides of an
identity, their difference and an observed convergence order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.integrate import simpson

from .convergence import ConvergenceRecord, convergence_order
from .errors import DomainError, ParameterRangeError, PreconditionError
from .geometry import (SymmetricBand, radial_data, radial_laplacian,
                       spectral_scalar_curvature, sphere_area)
from .profiles import PowerProfile, Profile, WarpingProfile

__all__ = [
    "QuadraticFormReport",
    "ModifiedTensors",
    "Family",
    "energy_functional",
    "first_variation_check",
    "linearized_eta_check",
    "rewrite_identity_check",
    "modified_tensors",
    "integral_identity_check",
    "weighted_mean_curvature",
]

DEFAULT_NODES = 2001


@dataclass(frozen=True)
class QuadraticFormReport:
    """Both sides of an identity and how well they agree.

    ``convergence_order`` is the fitted order over the refinement levels in
    ``record``; ``math.inf`` marks an identity that holds to roundoff at
    every level.
    """

    lhs: float
    rhs: float
    residual: float
    grid_h: float
    convergence_order: float
    record: ConvergenceRecord | None = field(default=None, compare=False)
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for name in ("lhs", "rhs", "residual", "grid_h", "convergence_order"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def to_dict(self):
        out = {"lhs": self.lhs, "rhs": self.rhs, "residual": self.residual,
               "grid_h": self.grid_h,
               "convergence_order": ("exact" if math.isinf(self.convergence_order)
                                     else self.convergence_order)}
        out.update(self.extra)
        return out


def _as_profile(mu) -> Profile:
    if isinstance(mu, Profile):
        return mu
    return WarpingProfile.constant(float(mu))


def _simpson(f, a, b, num):
    x = np.linspace(a, b, num)
    return simpson(f(x), x=x)


def weighted_mean_curvature(band: SymmetricBand, t):
    """``(n-1) rho'/rho + gamma u'/u`` of the slice at ``t`` for the normal ``+d/dt``."""
    d = radial_data(band, t)
    return (band.n - 1) * d.rho1 / d.rho + band.gamma * d.u1 / d.u


# ---------------------------------------------------------------- energy

def _area_density(band, t):
    """``u^gamma rho^(n-1)`` at ``t``."""
    d = radial_data(band, t)
    return d.u**band.gamma * d.rho ** (band.n - 1)


def energy_functional(band: SymmetricBand, mu, s, num: int = DEFAULT_NODES):
    """Weighted area minus bulk term of ``{t <= s}``.

    ``E(s) = omega [u^gamma rho^(n-1)(s) - int_{t-}^{s} u^gamma mu rho^(n-1) dt]``
    with ``omega`` the volume of the unit ``S^{n-1}``; composite Simpson rule.
    """
    mu = _as_profile(mu)
    band.check(s)
    lo = band.domain[0]
    omega = sphere_area(band.n - 1)
    bulk = 0.0
    if s > lo:
        bulk = _simpson(lambda x: _area_density(band, x) * mu(x), lo, s, num)
    return omega * (_area_density(band, s) - bulk)


def first_variation_check(band: SymmetricBand, mu, s, h_fd=1e-2, levels=3,
                          num=201) -> QuadraticFormReport:
    """Centered difference of ``E`` against ``omega eta(s) u^gamma rho^(n-1)(s)``.

    The difference ``E(s+h) - E(s-h)`` is evaluated directly (boundary terms
    plus the bulk integral over ``[s-h, s+h]``) so that the quadrature error
    stays far below the O(h^2) stencil error.  The order is fitted over
    ``h_fd / 2^k``, ``k < levels``; the reported sides belong to the finest step.
    """
    if not h_fd > 0:
        raise ValueError("h_fd must be positive")
    mu = _as_profile(mu)
    lo, hi = band.domain
    if s - h_fd < lo or s + h_fd > hi:
        raise DomainError(f"stencil [{s - h_fd}, {s + h_fd}] leaves the band")
    omega = sphere_area(band.n - 1)
    eta = weighted_mean_curvature(band, s) - mu(s)
    rhs = omega * eta * _area_density(band, s)
    hs, lhs_vals = [], []
    for k in range(levels):
        h = h_fd / 2**k
        bulk = _simpson(lambda x: _area_density(band, x) * mu(x), s - h, s + h, num)
        dE = omega * (_area_density(band, s + h) - _area_density(band, s - h) - bulk)
        hs.append(h)
        lhs_vals.append(dE / (2 * h))
    res = [abs(v - rhs) for v in lhs_vals]
    rec = convergence_order(hs, res)
    return QuadraticFormReport(lhs_vals[-1], rhs, res[-1], hs[-1], rec.fitted_order, rec)


def linearized_eta_check(band: SymmetricBand, mu, s, eps=1e-2, levels=3) -> QuadraticFormReport:
    """Centered difference of ``eta`` against its linearization for ``phi = 1``.

    ``rhs = -(Ric(nu) + |A|^2) + gamma grad^2 w(nu, nu) - mu'`` with
    ``Ric(nu) = -(n-1) rho''/rho``, ``|A|^2 = (n-1)(rho'/rho)^2`` and
    ``grad^2 w(nu, nu) = u''/u - (u'/u)^2``.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    mu = _as_profile(mu)
    lo, hi = band.domain
    if s - eps < lo or s + eps > hi:
        raise DomainError(f"stencil [{s - eps}, {s + eps}] leaves the band")
    n, g = band.n, band.gamma
    d = radial_data(band, s)
    ric = -(n - 1) * d.rho2 / d.rho
    a2 = (n - 1) * (d.rho1 / d.rho) ** 2
    hess_w = d.u2 / d.u - (d.u1 / d.u) ** 2
    mu1 = mu.derivs(s, 1)[1]
    rhs = -(ric + a2) + g * hess_w - mu1

    def eta(x):
        return weighted_mean_curvature(band, x) - mu(x)

    hs, vals = [], []
    for k in range(levels):
        e = eps / 2**k
        hs.append(e)
        vals.append((eta(s + e) - eta(s - e)) / (2 * e))
    res = [abs(v - rhs) for v in vals]
    rec = convergence_order(hs, res)
    return QuadraticFormReport(vals[-1], rhs, res[-1], hs[-1], rec.fitted_order, rec)


# ---------------------------------------------------------------- rewrite

def _sphere_terms(gamma, u, phi, radius, nodes):
    x, wq = np.polynomial.legendre.leggauss(nodes)
    th = np.arccos(x)
    u0, u1, u2 = (np.asarray(v) for v in u.derivs(th, 2))
    p0, p1, p2 = (np.asarray(v) for v in phi.derivs(th, 2))
    if np.any(u0 <= 0):
        raise DomainError("weight u must be positive on the sphere")
    r2 = radius**2
    cot = x / np.sqrt(1 - x**2)
    lap_u = (u2 + cot * u1) / r2
    lap_p = (p2 + cot * p1) / r2
    w1 = u1 / u0
    g = gamma
    Lphi = -lap_p - g * p0 * lap_u / u0 - g * w1 * p1 / r2
    lhs_int = u0**g * p0 * Lphi
    psi = u0 ** (g / 2) * p0
    psi1 = u0 ** (g / 2) * (p1 + 0.5 * g * w1 * p0)
    grad_psi2 = psi1**2 / r2
    inter_int = grad_psi2 + g * psi * w1 * psi1 / r2 + (g**2 / 4 - g) * w1**2 * psi**2 / r2
    c = 2.0 / (4.0 - g)
    rhs_int = 4.0 / (4.0 - g) * grad_psi2 - g * (1 - g / 4) * (psi * w1 - c * psi1) ** 2 / r2
    area = 2 * math.pi * r2
    return tuple(area * np.dot(wq, f) for f in (lhs_int, rhs_int, inter_int, grad_psi2))


def rewrite_identity_check(gamma, u_profile: Profile, phi_profile: Profile, radius=1.0,
                           nodes=96) -> QuadraticFormReport:
    """Compare ``int u^gamma phi L phi`` with its completed-square form on ``S^2(radius)``.

    ``u`` and ``phi`` are axisymmetric profiles in the polar angle.  The
    integrals use Gauss-Legendre quadrature in ``cos(theta)`` at ``nodes``,
    ``2 nodes`` and ``4 nodes`` points.  ``extra`` carries the intermediate
    form ``int |grad psi|^2 + gamma psi <grad w, grad psi> + (gamma^2/4 - gamma)
    |grad w|^2 psi^2`` and the Dirichlet energy of ``psi = u^(gamma/2) phi``.
    """
    if gamma == 4:
        raise ParameterRangeError("gamma = 4 makes the prefactor 4/(4-gamma) singular")
    if not radius > 0:
        raise ParameterRangeError("radius must be positive")
    levels = [nodes, 2 * nodes, 4 * nodes]
    out = [_sphere_terms(gamma, u_profile, phi_profile, radius, q) for q in levels]
    lhs, rhs, inter, dirichlet = out[-1]
    res = [abs(o[0] - o[1]) for o in out]
    rec = convergence_order([1.0 / q for q in levels], res)
    scale = max(1.0, abs(lhs), abs(rhs))
    order = math.inf if max(res) < 1e-12 * scale else rec.fitted_order
    return QuadraticFormReport(lhs, rhs, res[-1], math.pi / levels[-1], order, rec,
                               {"intermediate": inter, "dirichlet": dirichlet,
                                "intermediate_residual": abs(inter - lhs)})


# ---------------------------------------------------------------- tensors

@dataclass(frozen=True)
class ModifiedTensors:
    """Unit-frame components of the modified Ricci tensor and boundary tensor.

    ``R_rad`` on ``d/dt``, ``R_sph`` on a unit vector tangent to the slice,
    ``A_sph`` the tangential component of the boundary tensor for the
    normal ``+d/dt``.
    """

    R_rad: float
    R_sph: float
    A_sph: float


def modified_tensors(band: SymmetricBand, t) -> ModifiedTensors:
    """Evaluate the modified Ricci tensor from its definition.

    Expanding the definition gives

        R = Ric + (2 gamma - 2) du du / u^2 - 2 Hess u / u
              + (2 - gamma)(|du|^2 / u^2 + Delta u / u) g,

    evaluated with ``Ric(dt, dt) = -(n-1) rho''/rho``,
    ``Ric(e, e) = -rho''/rho + (n-2)(1 - rho'^2)/rho^2``,
    ``Hess u(dt, dt) = u''`` and ``Hess u(e, e) = (rho'/rho) u'``.
    The boundary tensor is ``A - (2 - gamma) u_nu / u`` on the slice.
    """
    n, g = band.n, band.gamma
    d = radial_data(band, t)
    q = d.rho1 / d.rho
    w1 = d.u1 / d.u
    lap = radial_laplacian(band, t, d)
    iso = (2 - g) * (w1**2 + lap / d.u)
    ric_rad = -(n - 1) * d.rho2 / d.rho
    ric_sph = -d.rho2 / d.rho + (n - 2) * (1 - d.rho1**2) / d.rho**2
    R_rad = ric_rad + (2 * g - 2) * w1**2 - 2 * d.u2 / d.u + iso
    R_sph = ric_sph - 2 * q * w1 + iso
    A_sph = q - (2 - g) * w1
    return ModifiedTensors(R_rad, R_sph, A_sph)


class Family(str, Enum):
    VARY_U = "vary_u"
    VARY_G = "vary_g"


def _perturbed(band, family, delta, e):
    shift = PowerProfile(delta, 1.0, scale=e)
    try:
        if family is Family.VARY_U:
            return band.with_weight(band.u + shift)
        return band.with_metric(band.rho + shift)
    except DomainError as exc:
        raise PreconditionError(f"perturbation at eps={e} loses positivity: {exc}") from exc


def _outward_hw(band, t, sign):
    return sign * weighted_mean_curvature(band, t)


def _identity_sides(band, family, delta, e, num):
    n, g = band.n, band.gamma
    lo, hi = band.domain
    omega = sphere_area(n - 1)
    bp = _perturbed(band, family, delta, e)
    bm = _perturbed(band, family, delta, -e)
    d_lo = radial_data(band, lo)
    d_hi = radial_data(band, hi)
    lhs = 0.0
    for t_b, sign, d in ((hi, 1.0, d_hi), (lo, -1.0, d_lo)):
        dH = (_outward_hw(bp, t_b, sign) - _outward_hw(bm, t_b, sign)) / (2 * e)
        lhs += omega * d.u**2 * d.rho ** (n - 1) * dH
    x = np.linspace(lo, hi, num)
    dx = radial_data(band, x)
    dlam = (spectral_scalar_curvature(bp, x) - spectral_scalar_curvature(bm, x)) / (2 * e)
    lhs += omega * simpson(dx.u**2 * dlam * dx.rho ** (n - 1), x=x)
    if family is Family.VARY_U:
        return lhs, 0.0
    # delta g = 2 rho drho g_sphere: unit components 2 drho / rho on n-1 directions
    dr = np.asarray(delta(x))
    R = modified_tensors(band, x)
    dens = dx.u**2 * dx.rho ** (n - 1)
    rhs = -0.5 * omega * simpson(dens * (n - 1) * R.R_sph * 2 * dr / dx.rho, x=x)
    for t_b, sign, d in ((hi, 1.0, d_hi), (lo, -1.0, d_lo)):
        A = sign * modified_tensors(band, t_b).A_sph
        rhs -= 0.5 * omega * d.u**2 * d.rho ** (n - 1) * (n - 1) * A * 2 * float(delta(t_b)) / d.rho
    return lhs, rhs


def integral_identity_check(band: SymmetricBand, family, delta_profile: Profile, eps=1e-3,
                            num=DEFAULT_NODES, levels=3) -> QuadraticFormReport:
    """Residual of the weighted variational identities under a radial perturbation.

    ``family = VARY_U`` perturbs ``u -> u + eps du`` and checks

        sum_boundary int delta(H + gamma u_nu/u) u^2 + int u^2 delta Lambda = 0;

    ``VARY_G`` perturbs ``rho -> rho + eps drho`` (``delta g = 2 rho drho
    g_sphere``) and compares the same left side with
    ``-1/2 int u^2 <R, delta g> - 1/2 int_boundary u^2 <A, delta g>``.
    Mean curvatures use outward normals (``+d/dt`` at ``t+``, ``-d/dt`` at
    ``t-``).  Variations are centered differences in ``eps``; integrals are
    composite Simpson on ``num`` nodes.  The order is fitted under joint
    refinement ``(eps, h) -> (eps/2, h/2)`` and the reported sides belong
    to the finest level.
    """
    family = Family(family)
    hs, res, sides = [], [], []
    lo, hi = band.domain
    for k in range(levels):
        e = eps / 2**k
        nk = (num - 1) * 2**k + 1
        lhs, rhs = _identity_sides(band, family, delta_profile, e, nk)
        hs.append(e)
        sides.append((lhs, rhs))
        res.append(abs(lhs - rhs))
    rec = convergence_order(hs, res)
    lhs, rhs = sides[-1]
    return QuadraticFormReport(lhs, rhs, res[-1], (hi - lo) / (nk - 1), rec.fitted_order, rec,
                               {"family": family.value})
