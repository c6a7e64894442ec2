"""Sample-based stationary points of 1-D convex Lipschitz functions.

Several independent ERMs are computed and the one with the smallest
empirical subgradient magnitude on a held-out batch is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def batch_sizes(eps: float, sigma: float, L: float):
    """``k = ceil(log4(L/eps))`` (at least 1) and ``m_b = ceil(8 sigma^2/eps^2)``."""
    if not (eps > 0 and sigma > 0 and L > 0):
        raise ValueError("eps, sigma and L must be positive")
    # shave one part in 1e12 so representation error cannot bump a ceiling
    k = max(1, math.ceil(math.log(L / eps, 4) * (1 - 1e-12)))
    m_b = math.ceil(8 * sigma**2 / eps**2 * (1 - 1e-12))
    return k, m_b


def inf_abs_subgradient(model, x, Z) -> float:
    """``inf_{g in dF_hat(x)} |g|`` for the empirical average over ``Z``."""
    lo = model.left_derivative(x, Z)
    hi = model.right_derivative(x, Z)
    if lo <= 0 <= hi:
        return 0.0
    return min(abs(lo), abs(hi))


def erm_1d(model, Z, tol=1e-12) -> float:
    """Leftmost minimizer of the empirical average over ``Z``.

    Uses the model's breakpoints when it has them (exact for piecewise-linear
    components); otherwise bisects on the sign of the right derivative.
    """
    if hasattr(model, "breakpoints"):
        bp = model.breakpoints(Z)
        lo, hi = 0, len(bp) - 1
        if model.right_derivative(bp[hi], Z) < 0:
            raise ValueError("empirical objective is unbounded below")
        while lo < hi:
            mid = (lo + hi) // 2
            if model.right_derivative(bp[mid], Z) >= 0:
                hi = mid
            else:
                lo = mid + 1
        return float(bp[lo])
    left, right = -1.0, 1.0
    while model.right_derivative(left, Z) >= 0:
        left *= 2
        if abs(left) > 1e300:
            raise ValueError("could not bracket the empirical minimizer")
    while model.right_derivative(right, Z) < 0:
        right *= 2
        if right > 1e300:
            raise ValueError("could not bracket the empirical minimizer")
    while right - left > tol * max(1.0, abs(left), abs(right)):
        mid = 0.5 * (left + right)
        if model.right_derivative(mid, Z) >= 0:
            right = mid
        else:
            left = mid
    return right


@dataclass
class OneDimResult:
    x_hat: float
    candidates: np.ndarray
    scores: np.ndarray
    k: int
    m_b: int
    samples_used: int


def one_dim_nonsmooth_details(global_oracle, eps, sigma, L) -> OneDimResult:
    model = global_oracle.model
    if global_oracle.dim != 1:
        raise ValueError("one-dimensional method needs a 1-D oracle")
    if not model.components_convex:
        raise ValueError("components must be convex")
    k, m_b = batch_sizes(eps, sigma, L)
    start = global_oracle.sample_count
    cands = np.array([erm_1d(model, global_oracle.draw_batch(m_b).Z) for _ in range(k)])
    Zval = global_oracle.draw_batch(k * m_b).Z
    scores = np.array([inf_abs_subgradient(model, c, Zval) for c in cands])
    best = np.flatnonzero(scores == scores.min())
    i = best[np.argmin(cands[best])]  # ties go to the leftmost candidate
    used = global_oracle.sample_count - start
    assert used == 2 * k * m_b
    return OneDimResult(float(cands[i]), cands, scores, k, m_b, used)


def one_dim_nonsmooth(global_oracle, eps, sigma, L) -> float:
    """Point whose population inf-subgradient is small in expectation."""
    return one_dim_nonsmooth_details(global_oracle, eps, sigma, L).x_hat
