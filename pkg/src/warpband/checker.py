"""Hypothesis checks, foliation sweeps and rigidity detection for symmetric bands.

A band ``(g, u)`` is compared with a model band through a radial map
``(t, x) -> (tau(t), x)``; ``mu = m(tau(t))`` is the induced prescription.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.integrate import cumulative_simpson

from .cone import ConeModel
from .errors import PreconditionError
from .geometry import SymmetricBand, radial_data, spectral_scalar_curvature
from .models import ModelProfiles, ModelSpec, build_model_profile, model_band
from .profiles import Profile, WarpingProfile
from .variation import weighted_mean_curvature

__all__ = [
    "ComparisonMap",
    "Verdict",
    "HypothesisReport",
    "SweepResult",
    "RigidityReport",
    "BarrierKind",
    "BarrierResult",
    "identity_map",
    "hypothesis_report",
    "foliation_sweep",
    "rigidity_report",
    "barrier_classifier",
]

DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class ComparisonMap:
    """Radial part ``tau`` of a map from the band to the model band."""

    tau: Profile

    def to_dict(self):
        return {"tau": self.tau.to_dict()}


def identity_map(domain) -> ComparisonMap:
    return ComparisonMap(WarpingProfile("linear", a=1.0, domain=tuple(domain)))


class Verdict(str, Enum):
    ALL_HOLD = "AllHold"
    VIOLATED = "Violated"
    RIGIDITY_CASE = "RigidityCase"


@dataclass(frozen=True)
class HypothesisReport:
    """Outcome of checking the comparison hypotheses.

    Attributes
    ----------
    t : grid on the band
    lambda_margin : ``Lambda(g, u)(t) - Lambda_model(tau(t))``
    boundary_plus_margin : ``Hw(t+) - m(tau(t+))``, must be ``>= 0``
    boundary_minus_margin : ``m(tau(t-)) - Hw(t-)``, must be ``>= 0``
    map_admissible : ``|tau'| <= 1``, ``tau' >= 0``, ``rho >= xi(tau)`` and
        ``tau`` maps the endpoints onto the model endpoints
    m_monotone : ``m' < 0`` on the model interval
    verdict : ``AllHold``, ``Violated`` or ``RigidityCase``
    violations : names of the failed items
    """

    t: np.ndarray
    lambda_margin: np.ndarray
    boundary_plus_margin: float
    boundary_minus_margin: float
    map_admissible: bool
    m_monotone: bool
    verdict: Verdict
    violations: tuple = ()
    details: dict = field(default_factory=dict, compare=False)

    def worst_lambda(self):
        """``(t, margin)`` where the curvature margin is smallest."""
        i = int(np.argmin(self.lambda_margin))
        return float(self.t[i]), float(self.lambda_margin[i])

    def to_dict(self):
        t_w, m_w = self.worst_lambda()
        return {"verdict": self.verdict.value, "violations": list(self.violations),
                "lambda_margin_min": m_w, "lambda_margin_argmin": t_w,
                "lambda_margin_max": float(np.max(self.lambda_margin)),
                "boundary_plus_margin": self.boundary_plus_margin,
                "boundary_minus_margin": self.boundary_minus_margin,
                "map_admissible": self.map_admissible, "m_monotone": self.m_monotone,
                **self.details}


def _setup(band, model, cmap):
    if band.n != model.n:
        raise PreconditionError(f"dimension mismatch: band n={band.n}, model n={model.n}")
    if band.gamma != model.gamma:
        raise PreconditionError(
            f"exponent mismatch: band gamma={band.gamma}, model gamma={model.gamma}")
    mp = build_model_profile(model)
    mb = model_band(model)
    return mp, mb


def _model_fields(mp: ModelProfiles, mb: SymmetricBand, tau):
    xi = np.asarray(mp.rho(tau))
    m = np.asarray(mp.m(tau))
    m1 = np.asarray(mp.m.derivs(tau, 1)[1])
    lam = np.asarray(spectral_scalar_curvature(mb, tau))
    return xi, m, m1, lam


def hypothesis_report(band: SymmetricBand, model: ModelSpec, cmap: ComparisonMap,
                      tol: float = DEFAULT_TOL, num: int = 1001) -> HypothesisReport:
    """Check curvature, boundary and map hypotheses of a band against a model.

    Raises
    ------
    PreconditionError
        If band and model disagree in ``n`` or ``gamma``.
    """
    mp, mb = _setup(band, model, cmap)
    lo, hi = band.domain
    s_lo, s_hi = mp.domain
    t = band.grid(num)
    tau, tau1 = (np.asarray(x) for x in cmap.tau.derivs(t, 1))
    violations = []
    details = {}
    inside = bool(np.all(tau >= s_lo - tol) & np.all(tau <= s_hi + tol))
    if not inside:
        violations.append("map:range")
        details["tau_range"] = [float(tau.min()), float(tau.max())]
        tau_c = np.clip(tau, s_lo, s_hi)
    else:
        tau_c = np.clip(tau, s_lo, s_hi)
    xi, m, _, lam_model = _model_fields(mp, mb, tau_c)
    lam_margin = np.asarray(spectral_scalar_curvature(band, t)) - lam_model
    hw = np.asarray(weighted_mean_curvature(band, t))
    bplus = float(hw[-1] - m[-1])
    bminus = float(m[0] - hw[0])
    rho = np.asarray(band.rho(t))
    lip = bool(np.all(np.abs(tau1) <= 1 + tol) and np.all(tau1 >= -tol))
    dom = bool(np.all(rho >= xi - tol))
    ends = bool(abs(tau[0] - s_lo) <= tol and abs(tau[-1] - s_hi) <= tol)
    admissible = inside and lip and dom and ends
    for name, ok in (("map:lipschitz", lip), ("map:rho", dom), ("map:endpoints", ends)):
        if not ok:
            violations.append(name)
    s = np.linspace(s_lo, s_hi, num)
    m_mono = bool(np.all(np.asarray(mp.m.derivs(s, 1)[1]) < 0))
    if not m_mono:
        violations.append("m_monotone")
    if np.min(lam_margin) < -tol:
        violations.append("lambda")
    if bplus < -tol:
        violations.append("boundary_plus")
    if bminus < -tol:
        violations.append("boundary_minus")
    if violations:
        verdict = Verdict.VIOLATED
    else:
        tight = (np.max(np.abs(lam_margin)) <= tol and abs(bplus) <= tol
                 and abs(bminus) <= tol and np.max(np.abs(tau1 - 1)) <= tol
                 and np.max(np.abs(rho - xi)) <= tol)
        verdict = Verdict.RIGIDITY_CASE if tight else Verdict.ALL_HOLD
    return HypothesisReport(t, lam_margin, bplus, bminus, admissible, m_mono, verdict,
                            tuple(violations), details)


@dataclass(frozen=True)
class SweepResult:
    """Trajectory of the defect ``eta`` along the slices.

    ``monotone = eta * exp(int Q)``; ``first_violation`` is the first ``t``
    where it increases by more than the tolerance, or ``None``.
    """

    t: np.ndarray
    eta: np.ndarray
    Q: np.ndarray
    monotone: np.ndarray
    first_violation: float | None
    max_increase: float

    @property
    def nonincreasing(self) -> bool:
        return self.first_violation is None

    def rows(self):
        return zip(self.t, self.eta, self.Q, self.monotone)


def foliation_sweep(band: SymmetricBand, model: ModelSpec, cmap: ComparisonMap,
                    t_range=None, num: int = 2001, tol: float = 1e-7) -> SweepResult:
    """Sweep the slices with ``mu = m(tau)`` and track ``eta exp(int Q)``.

    For slices ``phi = 1`` and the test function ``psi`` is constant, so
    ``Q = q = (n mu - gamma u'/u)/(n-1)`` (any normalization of ``psi``
    cancels in the quotient defining ``Q``).  ``int Q`` starts at the left
    end of the range and uses cumulative Simpson quadrature.

    Raises
    ------
    PreconditionError
        On an empty range or where the curvature hypothesis fails.
    """
    mp, mb = _setup(band, model, cmap)
    lo, hi = band.domain if t_range is None else t_range
    if not hi > lo:
        raise PreconditionError(f"empty sweep range [{lo}, {hi}]")
    t = np.linspace(lo, hi, num)
    tau = np.asarray(cmap.tau(t))
    _, m, _, lam_model = _model_fields(mp, mb, tau)
    margin = np.asarray(spectral_scalar_curvature(band, t)) - lam_model
    if np.min(margin) < -tol:
        i = int(np.argmin(margin))
        raise PreconditionError(
            f"curvature hypothesis fails at t={t[i]:.6g} (margin {margin[i]:.3g})")
    d = radial_data(band, t)
    n, g = band.n, band.gamma
    eta = np.asarray(weighted_mean_curvature(band, t)) - m
    Q = (n * m - g * d.u1 / d.u) / (n - 1)
    intQ = cumulative_simpson(Q, x=t, initial=0.0)
    mono = eta * np.exp(intQ)
    inc = np.diff(mono)
    bad = np.nonzero(inc > tol)[0]
    first = float(t[bad[0] + 1]) if bad.size else None
    return SweepResult(t, eta, Q, mono, first, float(np.max(inc, initial=0.0)))


@dataclass(frozen=True)
class RigidityReport:
    """Per-slice equality flags.

    ``flags`` maps ``A0``, ``rho``, ``tau_prime``, ``w_nu`` and ``lambda`` to
    boolean arrays over ``t``; ``first_false`` gives the first failing ``t``
    of each flag.
    """

    t: np.ndarray
    flags: dict
    hypotheses: HypothesisReport

    @property
    def all_true(self) -> bool:
        return all(bool(np.all(f)) for f in self.flags.values())

    @property
    def first_false(self) -> dict:
        out = {}
        for k, f in self.flags.items():
            idx = np.nonzero(~f)[0]
            out[k] = float(self.t[idx[0]]) if idx.size else None
        return out

    def to_dict(self):
        return {"all_true": self.all_true, "first_false": self.first_false,
                "verdict": self.hypotheses.verdict.value}


def rigidity_report(band: SymmetricBand, model: ModelSpec, cmap: ComparisonMap,
                    tol: float = DEFAULT_TOL, num: int = 1001,
                    require_hypotheses: bool = True) -> RigidityReport:
    """Flag, slice by slice, which equalities of the rigid case hold.

    With ``require_hypotheses=False`` the flags are also produced for bands
    whose hypothesis report is ``Violated``.

    Raises
    ------
    PreconditionError
        If the hypotheses are violated and ``require_hypotheses`` is true.
    """
    rep = hypothesis_report(band, model, cmap, tol, num)
    if require_hypotheses and rep.verdict is Verdict.VIOLATED:
        raise PreconditionError(f"hypotheses violated: {', '.join(rep.violations)}")
    mp, _ = _setup(band, model, cmap)
    t = rep.t
    tau, tau1 = (np.asarray(x) for x in cmap.tau.derivs(t, 1))
    tau = np.clip(tau, *mp.domain)
    xi = np.asarray(mp.rho(tau))
    m = np.asarray(mp.m(tau))
    d = radial_data(band, t)
    n, g = band.n, band.gamma
    k = 2 * (n - 1) - (n - 2) * g
    flags = {
        "A0": np.ones_like(t, dtype=bool),
        "rho": np.abs(d.rho - xi) <= tol,
        "tau_prime": np.abs(tau1 - 1) <= tol,
        "w_nu": np.abs(d.u1 / d.u - m / k) <= tol,
        "lambda": np.abs(rep.lambda_margin) <= tol,
    }
    return RigidityReport(t, flags, rep)


class BarrierKind(str, Enum):
    STRICT = "StrictBarrier"
    APPROXIMATE = "ApproximateBarrier"
    NOT_BARRIER = "NotBarrier"


@dataclass(frozen=True)
class BarrierResult:
    kind: BarrierKind
    margin: float
    samples: tuple


def barrier_classifier(band: SymmetricBand, model, t_level: float,
                       tol: float = 1e-6) -> BarrierResult:
    """Classify the slice at ``t_level`` above a cone tip as a barrier.

    The scaled defect ``D(s) = s (Hw(t- + s) - m(s))`` is sampled at
    ``s = t_level, t_level/2, t_level/4`` (``s`` measured from the tip) and
    extrapolated linearly to ``s = 0``.  The limit ``L`` is the margin:
    ``L < -tol`` is a strict barrier, ``|L| <= tol`` an approximate one
    (defect ``o(1/s)``), otherwise not a barrier.  ``model`` is a
    ``ConeModel`` (``m = c/s``) or a ``ModelSpec`` (its own ``m``).

    Raises
    ------
    PreconditionError
        If ``rho`` does not vanish at the left end of the band.
    """
    lo, hi = band.domain
    r0 = float(band.rho(lo))
    if abs(r0) > 1e-12 * max(1.0, float(np.max(np.abs(band.rho(band.grid(33)))))):
        raise PreconditionError("barrier classification needs a conical band (rho(t-) = 0)")
    s = np.array([t_level, t_level / 2, t_level / 4])
    if s[0] > hi - lo or s[-1] <= 0:
        raise PreconditionError("t_level must lie inside the band")
    if isinstance(model, ConeModel):
        m = model.mean_curvature_coefficient / s
    else:
        spec = dataclasses.replace(model, domain=(float(s[-1]), float(s[0])))
        m = np.asarray(build_model_profile(spec).m(s))
    D = s * (np.asarray(weighted_mean_curvature(band, lo + s)) - m)
    L = float(np.polyfit(s, D, 1)[1])
    if L < -tol:
        kind = BarrierKind.STRICT
    elif L <= tol:
        kind = BarrierKind.APPROXIMATE
    else:
        kind = BarrierKind.NOT_BARRIER
    return BarrierResult(kind, L, tuple(float(x) for x in D))
