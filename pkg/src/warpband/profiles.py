"""Scalar profiles of one variable with analytic or stencil derivatives.

A profile is a function of the radial coordinate ``t`` together with its
first and second derivatives.  Closed-form families are differentiated
exactly; tabulated profiles use second-order finite-difference stencils.
Profiles combine through ``+``, ``*``, ``**`` and composition so that model
fields such as ``xi**(1/(2-gamma))`` or ``m(tau(t))`` remain exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError

__all__ = [
    "Profile",
    "WarpingProfile",
    "TabulatedProfile",
    "PowerProfile",
    "ProductProfile",
    "SumProfile",
    "ComposedProfile",
    "LogDerivativeProfile",
    "eval_profile",
    "tabulate",
    "profile_from_dict",
    "FAMILIES",
]

FAMILIES = ("sin", "cos", "sinh", "cosh", "linear", "exp", "power")

_INF = float("inf")


def _out(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def _intersect(domains):
    lo = max(d[0] for d in domains)
    hi = min(d[1] for d in domains)
    if lo > hi:
        raise DomainError(f"profile domains do not overlap: {list(domains)}")
    return (lo, hi)


class Profile:
    """Base class: a scalar function of ``t`` with derivatives.

    Subclasses implement ``_derivs(t, order)`` returning a list of arrays
    ``[f, f', ..., f^(order)]`` and expose a ``domain`` tuple.
    """

    domain: tuple = (-_INF, _INF)
    max_order: int | None = None

    def derivs(self, t, order=2):
        """Return ``(f, f', ..., f^(order))`` at ``t`` after a domain check."""
        t = np.asarray(t, dtype=float)
        self.check_domain(t)
        if self.max_order is not None and order > self.max_order:
            raise ValueError(
                f"{type(self).__name__} supports derivatives up to order "
                f"{self.max_order}, requested {order}")
        return tuple(_out(d) for d in self._derivs(t, order))

    def check_domain(self, t):
        lo, hi = self.domain
        scale = max([1.0] + [abs(x) for x in (lo, hi) if math.isfinite(x)])
        tol = 1e-12 * scale
        t = np.asarray(t, dtype=float)
        if np.any(~np.isfinite(t)) or np.any(t < lo - tol) or np.any(t > hi + tol):
            bad = t[(t < lo - tol) | (t > hi + tol) | ~np.isfinite(t)]
            raise DomainError(
                f"t={np.ravel(bad)[:3]} outside profile domain [{lo}, {hi}]")

    def __call__(self, t):
        return self.derivs(t, 0)[0]

    def _derivs(self, t, order):  # pragma: no cover - abstract
        raise NotImplementedError

    # composition helpers
    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = WarpingProfile.constant(float(other))
        return SumProfile((self, other))

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return PowerProfile(self, 1.0, scale=float(other))
        return ProductProfile((self, other))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-1.0) * other

    def __pow__(self, p):
        return PowerProfile(self, float(p))

    def compose(self, inner: "Profile") -> "ComposedProfile":
        """Return ``self(inner(t))``."""
        return ComposedProfile(self, inner)

    def to_dict(self) -> dict:  # pragma: no cover - abstract
        raise NotImplementedError


@dataclass(frozen=True)
class WarpingProfile(Profile):
    """Closed-form profile ``a * family(b t) + offset``.

    Parameters
    ----------
    family : str
        One of ``sin, cos, sinh, cosh, exp`` (argument ``b t``), ``linear``
        (``a t``, ``b`` unused) or ``power`` (``a t**b``).
    a, b, offset : float
        Amplitude, frequency (or exponent for ``power``) and additive offset.
    domain : tuple of float
        Closed interval on which the profile is evaluated.
    """

    family: str
    a: float = 1.0
    b: float = 1.0
    offset: float = 0.0
    domain: tuple = (-_INF, _INF)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown profile family {self.family!r}")
        lo, hi = (float(x) for x in self.domain)
        if not lo <= hi:
            raise DomainError(f"empty domain [{lo}, {hi}]")
        object.__setattr__(self, "domain", (lo, hi))

    @classmethod
    def constant(cls, value, domain=(-_INF, _INF)):
        return cls("linear", a=0.0, offset=float(value), domain=domain)

    def with_domain(self, domain):
        return WarpingProfile(self.family, self.a, self.b, self.offset, tuple(domain))

    def _derivs(self, t, order):
        a, b, fam = self.a, self.b, self.family
        out = []
        for k in range(order + 1):
            if fam == "sin":
                d = a * b**k * np.sin(b * t + k * np.pi / 2)
            elif fam == "cos":
                d = a * b**k * np.cos(b * t + k * np.pi / 2)
            elif fam in ("sinh", "cosh"):
                odd = (k % 2 == 1) != (fam == "cosh")
                d = a * b**k * (np.cosh(b * t) if odd else np.sinh(b * t))
            elif fam == "exp":
                d = a * b**k * np.exp(b * t)
            elif fam == "linear":
                d = a * t if k == 0 else (a + 0 * t if k == 1 else 0 * t)
            else:  # power
                c = a * math.prod(b - j for j in range(k))
                d = c * t ** (b - k) if c != 0 else 0 * t
            out.append(d + self.offset if k == 0 else d)
        return out

    def to_dict(self):
        return {"family": self.family, "a": self.a, "b": self.b,
                "offset": self.offset, "domain": list(self.domain)}


@dataclass(frozen=True, eq=False)
class TabulatedProfile(Profile):
    """Profile sampled on the uniform grid ``t0 + i h``.

    Nodal first and second derivatives come from centered O(h^2) stencils,
    switched to one-sided second-order stencils at the two end nodes.
    Values between nodes are cubic-spline interpolants of the nodal arrays.
    """

    values: np.ndarray
    h: float
    t0: float = 0.0
    max_order = 2
    _splines: tuple = field(init=False, repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 5:
            raise ValueError("tabulated profile needs at least 5 nodes")
        if not self.h > 0:
            raise ValueError("tabulated spacing h must be positive")
        object.__setattr__(self, "values", v)
        h = self.h
        d1 = np.empty_like(v)
        d2 = np.empty_like(v)
        d1[1:-1] = (v[2:] - v[:-2]) / (2 * h)
        d1[0] = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * h)
        d1[-1] = (3 * v[-1] - 4 * v[-2] + v[-3]) / (2 * h)
        d2[1:-1] = (v[2:] - 2 * v[1:-1] + v[:-2]) / h**2
        d2[0] = (2 * v[0] - 5 * v[1] + 4 * v[2] - v[3]) / h**2
        d2[-1] = (2 * v[-1] - 5 * v[-2] + 4 * v[-3] - v[-4]) / h**2
        nodes = self.t0 + h * np.arange(v.size)
        object.__setattr__(
            self, "_splines", tuple(CubicSpline(nodes, d) for d in (v, d1, d2)))

    @property
    def domain(self):
        return (self.t0, self.t0 + self.h * (self.values.size - 1))

    @property
    def nodes(self):
        return self.t0 + self.h * np.arange(self.values.size)

    def _derivs(self, t, order):
        return [self._splines[k](t) for k in range(order + 1)]

    def to_dict(self):
        return {"family": "tabulated", "h": self.h, "t0": self.t0,
                "values": self.values.tolist()}


@dataclass(frozen=True)
class PowerProfile(Profile):
    """``scale * base**exponent`` (base must stay positive unless exponent is integral)."""

    base: Profile
    exponent: float
    scale: float = 1.0
    max_order = 2

    @property
    def domain(self):
        return self.base.domain

    def _derivs(self, t, order):
        g = self.base._derivs(t, order)
        p, s = self.exponent, self.scale
        if p == 1.0:
            return [s * d for d in g]
        f0 = g[0]
        if float(p).is_integer():
            gp = lambda q: f0**q
        else:
            gp = lambda q: np.power(f0, q)
        out = [s * gp(p)]
        if order >= 1:
            out.append(s * p * gp(p - 1) * g[1])
        if order >= 2:
            out.append(s * p * ((p - 1) * gp(p - 2) * g[1] ** 2 + gp(p - 1) * g[2]))
        return out

    def to_dict(self):
        return {"family": "pow", "base": self.base.to_dict(),
                "exponent": self.exponent, "scale": self.scale}


@dataclass(frozen=True)
class ProductProfile(Profile):
    """Pointwise product of profiles (Leibniz rule at any order)."""

    factors: tuple

    @property
    def domain(self):
        return _intersect([f.domain for f in self.factors])

    @property
    def max_order(self):
        orders = [f.max_order for f in self.factors if f.max_order is not None]
        return min(orders) if orders else None

    def _derivs(self, t, order):
        acc = self.factors[0]._derivs(t, order)
        for f in self.factors[1:]:
            g = f._derivs(t, order)
            acc = [sum(math.comb(k, j) * acc[j] * g[k - j] for j in range(k + 1))
                   for k in range(order + 1)]
        return acc

    def to_dict(self):
        return {"family": "product", "factors": [f.to_dict() for f in self.factors]}


@dataclass(frozen=True)
class SumProfile(Profile):
    """Pointwise sum of profiles."""

    terms: tuple

    @property
    def domain(self):
        return _intersect([f.domain for f in self.terms])

    @property
    def max_order(self):
        orders = [f.max_order for f in self.terms if f.max_order is not None]
        return min(orders) if orders else None

    def _derivs(self, t, order):
        parts = [f._derivs(t, order) for f in self.terms]
        return [sum(p[k] for p in parts) for k in range(order + 1)]

    def to_dict(self):
        return {"family": "sum", "terms": [f.to_dict() for f in self.terms]}


@dataclass(frozen=True)
class ComposedProfile(Profile):
    """``outer(inner(t))``; the outer domain is checked on the inner values."""

    outer: Profile
    inner: Profile
    max_order = 2

    @property
    def domain(self):
        return self.inner.domain

    def _derivs(self, t, order):
        g = self.inner._derivs(t, order)
        self.outer.check_domain(g[0])
        f = self.outer._derivs(g[0], order)
        out = [f[0]]
        if order >= 1:
            out.append(f[1] * g[1])
        if order >= 2:
            out.append(f[2] * g[1] ** 2 + f[1] * g[2])
        return out

    def to_dict(self):
        return {"family": "compose", "outer": self.outer.to_dict(),
                "inner": self.inner.to_dict()}


@dataclass(frozen=True)
class LogDerivativeProfile(Profile):
    """``scale * base' / base``; order k needs order k+1 of the base."""

    base: Profile
    scale: float = 1.0
    max_order = 2

    @property
    def domain(self):
        return self.base.domain

    def _derivs(self, t, order):
        g = self.base._derivs(t, order + 1)
        s = self.scale
        r1 = g[1] / g[0]
        out = [s * r1]
        if order >= 1:
            r2 = g[2] / g[0]
            out.append(s * (r2 - r1**2))
        if order >= 2:
            out.append(s * (g[3] / g[0] - 3 * r2 * r1 + 2 * r1**3))
        return out

    def to_dict(self):
        return {"family": "logderiv", "base": self.base.to_dict(), "scale": self.scale}


def eval_profile(profile: Profile, t):
    """Evaluate ``(xi, xi', xi'')`` at ``t``.

    Raises
    ------
    DomainError
        If ``t`` lies outside ``profile.domain``.
    """
    return profile.derivs(t, 2)


def tabulate(profile: Profile, num: int, domain: Sequence[float] | None = None):
    """Sample ``profile`` on ``num`` uniform nodes and return a TabulatedProfile."""
    lo, hi = profile.domain if domain is None else domain
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError("tabulation needs a finite domain")
    nodes = np.linspace(lo, hi, num)
    return TabulatedProfile(np.asarray(profile(nodes)), h=(hi - lo) / (num - 1), t0=lo)


def profile_from_dict(d: dict) -> Profile:
    """Inverse of ``Profile.to_dict``."""
    if not isinstance(d, dict) or "family" not in d:
        raise ValueError(f"malformed profile description: {d!r}")
    fam = d["family"]
    if fam in FAMILIES:
        dom = d.get("domain", [-_INF, _INF])
        return WarpingProfile(fam, float(d.get("a", 1.0)), float(d.get("b", 1.0)),
                              float(d.get("offset", 0.0)),
                              (float(dom[0]), float(dom[1])))
    if fam == "tabulated":
        return TabulatedProfile(np.asarray(d["values"], dtype=float), float(d["h"]),
                                float(d.get("t0", 0.0)))
    if fam == "pow":
        return PowerProfile(profile_from_dict(d["base"]), float(d["exponent"]),
                            float(d.get("scale", 1.0)))
    if fam == "product":
        return ProductProfile(tuple(profile_from_dict(x) for x in d["factors"]))
    if fam == "sum":
        return SumProfile(tuple(profile_from_dict(x) for x in d["terms"]))
    if fam == "compose":
        return ComposedProfile(profile_from_dict(d["outer"]), profile_from_dict(d["inner"]))
    if fam == "logderiv":
        return LogDerivativeProfile(profile_from_dict(d["base"]), float(d.get("scale", 1.0)))
    raise ValueError(f"unknown profile family {fam!r}")
