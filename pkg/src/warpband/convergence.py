"""Observed convergence orders from refinement sequences."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["ConvergenceRecord", "convergence_order", "EXACT_THRESHOLD"]

EXACT_THRESHOLD = 1e-14


@dataclass(frozen=True)
class ConvergenceRecord:
    """Residuals recorded at decreasing step sizes.

    ``fitted_order`` is the least-squares slope of ``log residual`` against
    ``log h``; it is ``math.inf`` when every residual is below roundoff
    (``exact``), and ``nan`` when too few residuals are usable.
    """

    h_values: tuple
    residuals: tuple
    fitted_order: float

    @property
    def exact(self) -> bool:
        return math.isinf(self.fitted_order)

    def order_label(self):
        """The order as a JSON-friendly value: a float or ``"exact"``."""
        return "exact" if self.exact else self.fitted_order

    def to_dict(self):
        return {"h_values": list(self.h_values), "residuals": list(self.residuals),
                "fitted_order": self.order_label()}


def convergence_order(h_values, residuals) -> ConvergenceRecord:
    """Fit ``residual ~ C h^p`` over at least three refinement levels.

    Examples
    --------
    >>> round(convergence_order([0.1, 0.05, 0.025], [1e-2, 2.5e-3, 6.25e-4]).fitted_order, 10)
    2.0
    """
    h = np.asarray(h_values, dtype=float)
    r = np.abs(np.asarray(residuals, dtype=float))
    if h.ndim != 1 or h.size < 3 or r.shape != h.shape:
        raise ValueError("convergence_order needs at least 3 matching levels")
    if np.any(h <= 0) or np.any(np.diff(h) >= 0):
        raise ValueError("h_values must be positive and strictly decreasing")
    rec = (tuple(h.tolist()), tuple(r.tolist()))
    if np.all(r < EXACT_THRESHOLD):
        return ConvergenceRecord(*rec, math.inf)
    ok = r > 0
    if ok.sum() < 2:
        return ConvergenceRecord(*rec, math.nan)
    slope = np.polyfit(np.log(h[ok]), np.log(r[ok]), 1)[0]
    return ConvergenceRecord(*rec, float(slope))
