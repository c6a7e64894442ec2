"""Log-log least-squares rate fits."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r2: float
    n_points: int


def fit_rate(agg, m_min: Optional[float] = None, m_max: Optional[float] = None) -> RateFit:
    """OLS fit of ``log mean`` against ``log m`` for budgets in ``[m_min, m_max]``.

    ``agg`` is a sequence of aggregate rows (anything with ``m`` and ``mean``)
    or of ``(m, mean)`` pairs.
    """
    pts = [(r.m, r.mean) if hasattr(r, "mean") else tuple(r) for r in agg]
    lo = -np.inf if m_min is None else m_min
    hi = np.inf if m_max is None else m_max
    pts = [(float(m), float(e)) for m, e in pts if lo <= m <= hi]
    if len(pts) < 4:
        raise ValueError(f"rate fit needs at least 4 budgets in range, got {len(pts)}")
    m, e = np.array(pts).T
    if np.any(e <= 0) or np.any(m <= 0):
        raise ValueError("rate fit needs positive budgets and means")
    x, y = np.log(m), np.log(e)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return RateFit(float(slope), float(intercept), r2, len(pts))
