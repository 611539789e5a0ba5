"""Model warped metrics whose spectral scalar curvature is a prescribed constant.

For ``xi = a sin(b t)`` (``sinh`` for negative and ``a b t`` for zero target)
the band ``dt^2 + xi^2 g_sphere`` with weight ``u = xi**(1/(2-gamma))``
has constant spectral scalar curvature, and
``m = ((2(n-1) - (n-2) gamma)/(2 - gamma)) xi'/xi`` is the weighted mean
curvature of its slices.  ``m`` solves the Riccati equation

    m' + Gamma m^2 + Lambda = (n-1)(n-2) / (2 xi^2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ParameterRangeError, SingularSliceError
from .geometry import SymmetricBand, check_exponent, radial_data
from .profiles import LogDerivativeProfile, PowerProfile, Profile, WarpingProfile

__all__ = [
    "Sign",
    "ModelSpec",
    "ModelProfiles",
    "gamma_coefficient",
    "model_coefficients",
    "build_model_profile",
    "model_band",
    "model_ode_residual",
    "default_model_domain",
]


class Sign(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    ZERO = "zero"


def _factors(n, gamma):
    f1 = 2 * n - (n - 1) * gamma            # numerator of Gamma
    f2 = 2 * (n - 2) - (n - 3) * gamma
    f3 = 2 * (n - 1) - (n - 2) * gamma      # appears in m and in Gamma
    return f1, f2, f3


def gamma_coefficient(n: int, gamma: float) -> float:
    """``Gamma = (2n - (n-1) gamma) / (2 (2(n-1) - (n-2) gamma))``."""
    f1, _, f3 = _factors(n, gamma)
    if f3 == 0:
        raise ParameterRangeError(
            f"2(n-1) - (n-2) gamma vanishes for n={n}, gamma={gamma}")
    return f1 / (2 * f3)


def model_coefficients(n: int, gamma: float, Lambda: float):
    """Amplitude and frequency of the sine model with constant ``Lambda > 0``.

    Returns
    -------
    a : float
        ``sqrt((n-1)(n-2)(2n-(n-1)g) / (2 Lambda (2(n-2)-(n-3)g)))``
    b : float
        ``(2-g) sqrt(2 Lambda) / sqrt((2n-(n-1)g)(2(n-1)-(n-2)g))``; negative
        when ``gamma > 2``, in which case the profile uses ``|b|``.

    Raises
    ------
    ParameterRangeError
        Naming the factor that makes a radicand non-positive.
    """
    check_exponent(n, gamma)
    if not Lambda > 0:
        raise ParameterRangeError(f"Lambda must be positive, got {Lambda}")
    f1, f2, f3 = _factors(n, gamma)
    for name, val in (("2n-(n-1)gamma", f1), ("2(n-2)-(n-3)gamma", f2),
                      ("2(n-1)-(n-2)gamma", f3)):
        if not val > 0:
            raise ParameterRangeError(f"factor {name} = {val} is not positive")
    a = math.sqrt((n - 1) * (n - 2) * f1 / (2 * Lambda * f2))
    b = (2 - gamma) * math.sqrt(2 * Lambda) / math.sqrt(f1 * f3)
    return a, b


@dataclass(frozen=True)
class ModelSpec:
    """Target data for a model band.

    ``Lambda`` is the magnitude of the target; ``sign`` selects the sine,
    hyperbolic or linear family.  ``domain=None`` picks a default interval
    away from the zeros of ``xi``.
    """

    n: int
    gamma: float
    Lambda: float = 1.0
    domain: tuple | None = None
    sign: Sign = Sign.POSITIVE

    @property
    def target(self) -> float:
        s = Sign(self.sign)
        return {Sign.POSITIVE: 1.0, Sign.NEGATIVE: -1.0, Sign.ZERO: 0.0}[s] * self.Lambda

    def to_dict(self):
        return {"n": self.n, "gamma": self.gamma, "Lambda": self.Lambda,
                "domain": None if self.domain is None else list(self.domain),
                "sign": Sign(self.sign).value}

    @classmethod
    def from_dict(cls, d):
        dom = d.get("domain")
        return cls(int(d["n"]), float(d["gamma"]), float(d.get("Lambda", 1.0)),
                   None if dom is None else tuple(float(x) for x in dom),
                   Sign(d.get("sign", "positive")))


@dataclass(frozen=True)
class ModelProfiles:
    rho: Profile
    u: Profile
    m: Profile
    h: Profile
    a: float
    b: float
    domain: tuple


def default_model_domain(spec: ModelSpec, sign=None):
    s = Sign(spec.sign if sign is None else sign)
    if s is Sign.POSITIVE:
        _, b = model_coefficients(spec.n, spec.gamma, spec.Lambda)
        half = math.pi / abs(b)
        return (half / 8, 7 * half / 8)
    if s is Sign.NEGATIVE:
        _, b = model_coefficients(spec.n, spec.gamma, spec.Lambda)
        return (0.1 / abs(b), 2.0 / abs(b))
    return (0.1, 2.0)


def build_model_profile(spec: ModelSpec, sign=None) -> ModelProfiles:
    """Model fields ``rho = xi``, ``u = xi**(1/(2-gamma))``, ``m`` and ``h = (n-1) xi'/xi``.

    The zero family uses ``xi = a(gamma,1) b(gamma,1) t``; the negative
    family uses ``a(gamma,|Lambda|) sinh(|b| t)``.
    """
    s = Sign(spec.sign if sign is None else sign)
    n, g = spec.n, spec.gamma
    dom = spec.domain if spec.domain is not None else default_model_domain(spec, s)
    dom = (float(dom[0]), float(dom[1]))
    if s is Sign.ZERO:
        a, b = model_coefficients(n, g, 1.0)
        xi = WarpingProfile("linear", a=a * abs(b), domain=dom)
    else:
        a, b = model_coefficients(n, g, spec.Lambda)
        fam = "sin" if s is Sign.POSITIVE else "sinh"
        xi = WarpingProfile(fam, a=a, b=abs(b), domain=dom)
    f3 = 2 * (n - 1) - (n - 2) * g
    u = PowerProfile(xi, 1.0 / (2 - g))
    m = LogDerivativeProfile(xi, f3 / (2 - g))
    h = LogDerivativeProfile(xi, float(n - 1))
    # a zero at an endpoint is a cone tip and is allowed
    vals = np.asarray(xi(np.linspace(dom[0], dom[1], 257)[1:-1]))
    if np.any(vals <= 0):
        raise ParameterRangeError(f"model profile is not positive on {dom}")
    return ModelProfiles(xi, u, m, h, a, b, dom)


def model_band(spec: ModelSpec, sign=None, weight_scale=1.0) -> SymmetricBand:
    """The model band itself, optionally with weight ``c * u_xi``."""
    mp = build_model_profile(spec, sign)
    u = mp.u if weight_scale == 1.0 else PowerProfile(mp.u, 1.0, scale=weight_scale)
    conical = float(mp.rho(mp.domain[0])) == 0.0
    return SymmetricBand(spec.n, mp.rho, u, spec.gamma, mp.domain, conical=conical)


def model_ode_residual(rho: Profile, n: int, gamma: float, Lambda: float, t):
    """``m' + Gamma m^2 + Lambda - (n-1)(n-2)/(2 rho^2)`` with ``m`` built from ``rho``.

    Raises
    ------
    SingularSliceError
        Where ``rho(t) = 0``.
    """
    check_exponent(n, gamma)
    r0, r1, r2 = (np.asarray(x) for x in rho.derivs(t, 2))
    if np.any(r0 == 0):
        raise SingularSliceError("rho vanishes at the requested slice")
    c = (2 * (n - 1) - (n - 2) * gamma) / (2 - gamma)
    q = r1 / r0
    m = c * q
    m1 = c * (r2 / r0 - q**2)
    G = gamma_coefficient(n, gamma)
    out = m1 + G * m**2 + Lambda - 0.5 * (n - 1) * (n - 2) / r0**2
    return float(out) if out.ndim == 0 else out
