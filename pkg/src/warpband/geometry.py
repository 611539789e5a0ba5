"""Rotationally symmetric bands ``g = dt^2 + rho(t)^2 g_sphere`` with a weight ``u(t)``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma_fn

from .errors import DomainError, ParameterRangeError, SingularSliceError
from .profiles import PowerProfile, Profile

__all__ = [
    "SymmetricBand",
    "SliceGeometry",
    "RadialData",
    "sphere_area",
    "max_exponent",
    "check_exponent",
    "radial_data",
    "scalar_curvature",
    "radial_laplacian",
    "slice_geometry",
    "spectral_scalar_curvature",
    "sigma_reduction",
    "sigma_reduced_exponent",
    "sigma_identity_sides",
]


def sphere_area(k: int) -> float:
    """Volume of the unit round sphere S^k (``4 pi`` for k=2, ``2 pi^2`` for k=3)."""
    return 2 * math.pi ** ((k + 1) / 2) / float(_gamma_fn((k + 1) / 2))


def max_exponent(n: int) -> float:
    """Upper bound on gamma used throughout: 4 for n=3, 3 for n=4."""
    return {3: 4.0, 4: 3.0}[n]


def check_exponent(n, gamma, allow_two=False):
    if n not in (3, 4):
        raise ParameterRangeError(f"dimension n must be 3 or 4, got {n}")
    if not np.isfinite(gamma) or gamma >= max_exponent(n):
        raise ParameterRangeError(
            f"gamma={gamma} must be below {max_exponent(n)} when n={n}")
    if gamma == 2 and not allow_two:
        raise ParameterRangeError("gamma = 2 makes the exponent 1/(2-gamma) singular")


@dataclass(frozen=True)
class SymmetricBand:
    """Warped band ``[t-, t+] x S^{n-1}`` with metric profile ``rho`` and weight ``u``.

    Parameters
    ----------
    n : int
        Total dimension, 3 or 4.
    rho, u : Profile
        Metric warping factor and positive weight.
    gamma : float
        Exponent in the spectral scalar curvature; ``gamma != 2``.
    domain : tuple, optional
        Band interval.  Defaults to the common domain of ``rho`` and ``u``.
    conical : bool
        Allow ``rho`` and ``u`` to vanish at the left endpoint (a cone tip).
    """

    n: int
    rho: Profile
    u: Profile
    gamma: float = 0.0
    domain: tuple | None = None
    conical: bool = False

    def __post_init__(self):
        check_exponent(self.n, self.gamma)
        lo = max(self.rho.domain[0], self.u.domain[0])
        hi = min(self.rho.domain[1], self.u.domain[1])
        if self.domain is not None:
            d0, d1 = (float(x) for x in self.domain)
            if d0 < lo - 1e-12 or d1 > hi + 1e-12:
                raise DomainError(
                    f"band domain [{d0}, {d1}] not inside profile domains [{lo}, {hi}]")
            lo, hi = d0, d1
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise DomainError(f"band needs a finite non-empty domain, got [{lo}, {hi}]")
        object.__setattr__(self, "domain", (lo, hi))
        # positivity on a sample grid; a cone tip may vanish at t-
        t = np.linspace(lo, hi, 257)
        if self.conical:
            t = t[1:]
        if np.any(np.asarray(self.rho(t)) <= 0):
            raise DomainError("metric profile rho must be positive on the band")
        if np.any(np.asarray(self.u(t)) <= 0):
            raise DomainError("weight u must be positive on the band")

    def with_weight(self, u: Profile) -> "SymmetricBand":
        return SymmetricBand(self.n, self.rho, u, self.gamma, self.domain, self.conical)

    def with_metric(self, rho: Profile) -> "SymmetricBand":
        return SymmetricBand(self.n, rho, self.u, self.gamma, self.domain, self.conical)

    def grid(self, num=1001, interior=False):
        lo, hi = self.domain
        t = np.linspace(lo, hi, num + 2 if interior else num)
        return t[1:-1] if interior else t

    def check(self, t):
        lo, hi = self.domain
        tol = 1e-12 * max(1.0, abs(lo), abs(hi))
        t = np.asarray(t, dtype=float)
        if np.any(t < lo - tol) or np.any(t > hi + tol):
            raise DomainError(f"t outside band domain [{lo}, {hi}]")


@dataclass(frozen=True)
class RadialData:
    """Profile values and derivatives at a set of slices."""

    t: np.ndarray
    rho: np.ndarray
    rho1: np.ndarray
    rho2: np.ndarray
    u: np.ndarray
    u1: np.ndarray
    u2: np.ndarray


def radial_data(band: SymmetricBand, t, need_u=True) -> RadialData:
    band.check(t)
    r = band.rho.derivs(t, 2)
    if np.any(np.asarray(r[0]) == 0):
        raise SingularSliceError("rho vanishes at the requested slice")
    if need_u:
        w = band.u.derivs(t, 2)
        if np.any(np.asarray(w[0]) <= 0):
            raise SingularSliceError("weight u is not positive at the requested slice")
    else:
        w = (np.nan, np.nan, np.nan)
    return RadialData(t, *r, *w)


def scalar_curvature(band: SymmetricBand, t):
    """Scalar curvature ``-2(n-1) rho''/rho + (n-1)(n-2)(1 - rho'^2)/rho^2``.

    Raises
    ------
    SingularSliceError
        Where ``rho(t) = 0``.
    """
    d = radial_data(band, t, need_u=False)
    n = band.n
    return (-2 * (n - 1) * d.rho2 / d.rho
            + (n - 1) * (n - 2) * (1 - d.rho1**2) / d.rho**2)


def radial_laplacian(band: SymmetricBand, t, d: RadialData | None = None):
    """``u'' + (n-1)(rho'/rho) u'`` for the radial weight."""
    d = radial_data(band, t) if d is None else d
    return d.u2 + (band.n - 1) * d.rho1 / d.rho * d.u1


def spectral_scalar_curvature(band: SymmetricBand, t):
    """Spectral scalar curvature ``-gamma Delta u / u + R / 2``."""
    d = radial_data(band, t)
    lap = radial_laplacian(band, t, d)
    R = scalar_curvature(band, t)
    if band.gamma == 0:
        return 0.5 * R
    return -band.gamma * lap / d.u + 0.5 * R


@dataclass(frozen=True)
class SliceGeometry:
    """Scalars attached to the round slice ``{t} x S^{n-1}`` with normal ``+d/dt``.

    Attributes
    ----------
    H : mean curvature ``(n-1) rho'/rho``
    Hw : weighted mean curvature ``H + gamma u'/u``
    R_slice : intrinsic scalar curvature ``(n-1)(n-2)/rho^2``
    u_nu : normal derivative ``u'``
    mu : prescription value
    eta : ``Hw - mu``
    A0_norm2 : traceless second fundamental form, identically zero
    """

    t: float
    H: float
    Hw: float
    R_slice: float
    u_nu: float
    mu: float
    eta: float
    A0_norm2: float = 0.0


def slice_geometry(band: SymmetricBand, t, mu) -> SliceGeometry:
    d = radial_data(band, t)
    n = band.n
    H = (n - 1) * d.rho1 / d.rho
    Hw = H + band.gamma * d.u1 / d.u
    return SliceGeometry(
        t=t, H=H, Hw=Hw, R_slice=(n - 1) * (n - 2) / d.rho**2,
        u_nu=d.u1, mu=mu, eta=Hw - mu, A0_norm2=0.0 * d.rho)


def sigma_reduction(u: Profile, sigma: float) -> Profile:
    """Return ``u**(1 - sigma)``.

    With ``v = u**(1-sigma)`` one has pointwise

        -Delta u / u + sigma |grad u|^2 / u^2 = -(1/(1-sigma)) Delta v / v,

    so a sigma-weighted spectral curvature with exponent gamma equals the
    plain one for ``v`` with exponent ``gamma / (1 - sigma)``.
    """
    if sigma == 1:
        raise ParameterRangeError("sigma = 1 needs a logarithmic substitution")
    if sigma == 0:
        return u
    return PowerProfile(u, 1.0 - sigma)


def sigma_reduced_exponent(gamma: float, sigma: float) -> float:
    """Exponent carried by ``u**(1-sigma)``: ``gamma / (1 - sigma)``."""
    if sigma == 1:
        raise ParameterRangeError("sigma = 1 needs a logarithmic substitution")
    return gamma / (1.0 - sigma)


def sigma_identity_sides(band: SymmetricBand, t, sigma: float):
    """Both sides of the sigma identity on ``band``'s metric at ``t``.

    Returns
    -------
    lhs : ``-Delta u / u + sigma u'^2 / u^2``
    rhs : ``-(1/(1-sigma)) Delta v / v`` with ``v = u**(1-sigma)``
    """
    v = sigma_reduction(band.u, sigma)
    d = radial_data(band, t)
    lhs = -radial_laplacian(band, t, d) / d.u + sigma * d.u1**2 / d.u**2
    vb = band.with_weight(v)
    dv = radial_data(vb, t)
    rhs = -radial_laplacian(vb, t, dv) / dv.u / (1.0 - sigma)
    return lhs, rhs
