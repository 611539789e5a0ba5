"""Stability potentials of round slices and closed-form cross-section spectra."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterRangeError, PreconditionError
from .geometry import (SymmetricBand, max_exponent, radial_data,
                       slice_geometry, spectral_scalar_curvature)
from .models import gamma_coefficient
from .profiles import Profile

__all__ = [
    "StabilityPotentials",
    "SpectrumEntry",
    "gamma_coefficient",
    "stability_potentials",
    "eta_derivative_split",
    "harmonic_multiplicity",
    "ltilde_spectrum",
    "gauss_bonnet_margin",
    "listing_conformal_scalar",
]


@dataclass(frozen=True)
class StabilityPotentials:
    """Potentials of the stability inequality on one slice.

    Attributes
    ----------
    Z : ``-(1/(n-1)) eta (n f - gamma w_nu) - n/(2(n-1)) eta^2``
    W : ``-|A0|^2/2 - (Gamma mu^2 + mu_nu + Lambda) - c gamma (w_nu - mu/k)^2``
        with ``k = 2(n-1) - (n-2) gamma`` and ``c = k / (2(n-1))``
    W_bound : ``-(n-1)(n-2) / (2 xi^2)``
    Gamma : the Riccati coefficient
    square_term : ``(w_nu - mu/k)^2``
    """

    Z: float
    W: float
    W_bound: float
    Gamma: float
    square_term: float


def stability_potentials(band: SymmetricBand, t, mu, mu_nu, f, xi=None) -> StabilityPotentials:
    """Evaluate Z, W and the model bound at slice ``t``.

    Parameters
    ----------
    band : SymmetricBand
    t : float or array
    mu, mu_nu : float or array
        Prescription and its normal derivative on the slice.
    f : float or array
        The function entering Z (``f = mu`` on a mu-hypersurface).
    xi : float or array, optional
        Model warping value used in ``W_bound``; defaults to ``rho(t)``.
    """
    n, g = band.n, band.gamma
    sg = slice_geometry(band, t, mu)
    d = radial_data(band, t)
    w_nu = d.u1 / d.u
    eta = sg.eta
    Z = -(eta * (n * f - g * w_nu)) / (n - 1) - n / (2 * (n - 1)) * eta**2
    lam = spectral_scalar_curvature(band, t)
    G = gamma_coefficient(n, g)
    k = 2 * (n - 1) - (n - 2) * g
    sq = (w_nu - mu / k) ** 2
    W = -0.5 * sg.A0_norm2 - (G * mu**2 + mu_nu + lam) - k / (2 * (n - 1)) * g * sq
    xi = d.rho if xi is None else xi
    W_bound = -0.5 * (n - 1) * (n - 2) / np.asarray(xi) ** 2
    return StabilityPotentials(Z, W, _f(W_bound), G, sq)


def _f(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def eta_derivative_split(band: SymmetricBand, t, mu: Profile):
    """Return ``(eta', R_slice/2 + Z + W)`` along the slices, with ``f = mu``.

    The two agree identically; this exposes the splitting of the derivative
    of ``eta`` used in the stability argument.
    """
    n, g = band.n, band.gamma
    d = radial_data(band, t)
    m0, m1 = mu.derivs(t, 1)
    q = d.rho1 / d.rho
    w1 = d.u1 / d.u
    deta = (n - 1) * (d.rho2 / d.rho - q**2) + g * (d.u2 / d.u - w1**2) - m1
    sp = stability_potentials(band, t, m0, m1, m0)
    return deta, 0.5 * (n - 1) * (n - 2) / d.rho**2 + sp.Z + sp.W


@dataclass(frozen=True)
class SpectrumEntry:
    degree: int
    multiplicity: int
    value: float


def harmonic_multiplicity(k: int, dim: int) -> int:
    """Dimension of degree-``k`` spherical harmonics on ``S^dim``."""
    if k < 0:
        return 0
    m = math.comb(k + dim, dim)
    if k >= 2:
        m -= math.comb(k + dim - 2, dim)
    return m


def ltilde_spectrum(n: int, gamma: float, radius: float, xi_val: float, k_max: int = 8):
    """Eigenvalues of ``-(4/(4-gamma)) Delta + (n-1)(n-2)(1/r^2 - 1/xi^2)/2`` on ``S^{n-1}(r)``.

    Returns a list of ``SpectrumEntry(degree, multiplicity, value)`` for
    degrees ``0..k_max``; the Laplace eigenvalue of degree ``k`` is
    ``k(k+n-2)/r^2``.
    """
    if n not in (3, 4):
        raise ParameterRangeError(f"n must be 3 or 4, got {n}")
    if not gamma < max_exponent(n):
        raise ParameterRangeError(f"gamma={gamma} must be below {max_exponent(n)} for n={n}")
    if not (radius > 0 and xi_val > 0):
        raise ParameterRangeError("radius and xi_val must be positive")
    if k_max < 0:
        raise ParameterRangeError("k_max must be non-negative")
    pref = 4.0 / (4.0 - gamma)
    shift = 0.5 * (n - 1) * (n - 2) * (1.0 / radius**2 - 1.0 / xi_val**2)
    return [SpectrumEntry(k, harmonic_multiplicity(k, n - 1),
                          pref * k * (k + n - 2) / radius**2 + shift)
            for k in range(k_max + 1)]


def gauss_bonnet_margin(euler_char: int, band: SymmetricBand, t, xi_profile: Profile, tau):
    """``2 pi chi - area(slice) / xi(tau)^2`` for a round slice of a 3-dimensional band."""
    if band.n != 3:
        raise PreconditionError("the Gauss-Bonnet margin is defined for n = 3 only")
    rho = radial_data(band, t, need_u=False).rho
    xi = np.asarray(xi_profile(tau))
    # the ratio first, so that rho = xi gives exactly zero
    return _f(2 * math.pi * euler_char - 4 * math.pi * (rho / xi) ** 2)


def listing_conformal_scalar(n_cross: int, v: Profile, alpha: float, radius: float, theta):
    """Scalar curvature of ``v^(4 alpha) g`` on the round ``S^m(radius)``, ``m = n_cross``.

    ``v`` is axisymmetric, a profile in the polar angle.  With
    ``L = |grad log v|^2`` the conformal change law reads

        v^(4a) R~ = R - 4a(m-1)(Delta v / v - L) - 4a^2 (m-2)(m-1) L,

    which for ``m = 3`` is ``R - 8a Delta v / v - 8a(a-1) L``.
    """
    if not 0 < alpha < 1:
        raise ParameterRangeError(f"alpha must lie in (0, 1), got {alpha}")
    m = n_cross
    v0, v1, v2 = (np.asarray(x) for x in v.derivs(theta, 2))
    if np.any(v0 <= 0):
        raise DomainError("conformal factor v must be positive")
    th = np.asarray(theta, dtype=float)
    R = m * (m - 1) / radius**2
    # cot(theta) v' is regular at the poles for smooth axisymmetric v
    with np.errstate(divide="ignore", invalid="ignore"):
        cot_term = np.where(np.abs(np.sin(th)) > 1e-12, np.cos(th) / np.sin(th) * v1, v2)
    lap = (v2 + (m - 1) * cot_term) / radius**2
    L = (v1 / v0) ** 2 / radius**2
    a = alpha
    out = v0 ** (-4 * a) * (R - 4 * a * (m - 1) * (lap / v0 - L)
                            - 4 * a**2 * (m - 2) * (m - 1) * L)
    return _f(out)
