"""Regularization schedules for the non-strongly-convex problem classes."""

from __future__ import annotations

import math

MODES = ("domain_R", "range_Delta", "sample_R", "sample_Delta")


def schedule_lambda(mode: str, H: float, R: float = None, Delta: float = None,
                    sigma: float = 0.0, eps: float = None, c_lambda: float = 1.0) -> float:
    """Regularization strength ``c_lambda * Theta(.)`` for each setting.

    ``domain_R``:     ``min(eps/R, H eps^4 / (sigma^4 log^4(sigma/eps)))``
    ``range_Delta``:  ``min(eps^2/Delta, H eps^4 / (sigma^4 log^4(sigma/eps)))``
    ``sample_R``:     ``eps/R``
    ``sample_Delta``: ``eps^2/Delta``

    The log factor is clamped to ``max(log(sigma/eps), 1)``; with
    ``sigma == 0`` the noise branch is infinite and drops out.
    """
    if mode not in MODES:
        raise ValueError(f"unknown schedule mode {mode!r}; expected one of {MODES}")
    if eps is None or not eps > 0 or not H > 0 or not c_lambda > 0:
        raise ValueError("eps, H and c_lambda must be positive")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if mode.endswith("_R"):
        if R is None or not R > 0:
            raise ValueError("R must be positive")
        if eps > H * R / 8:
            raise ValueError(f"need eps <= HR/8 = {H * R / 8:g}")
        base = eps / R
    else:
        if Delta is None or not Delta > 0:
            raise ValueError("Delta must be positive")
        if eps > math.sqrt(H * Delta / 8):
            raise ValueError(f"need eps <= sqrt(H Delta / 8) = {math.sqrt(H * Delta / 8):g}")
        base = eps**2 / Delta
    if mode.startswith("sample") or sigma == 0:
        return c_lambda * base
    log_term = max(math.log(sigma / eps), 1.0)
    noise = H * eps**4 / (sigma**4 * log_term**4)
    return c_lambda * min(base, noise)
