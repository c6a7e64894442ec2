"""SGD, AC-SA and the two-phase AC-SA restart scheme.

All three take any first-order oracle exposing ``gradient(x)`` and a
``query_count``; each charges exactly ``m`` queries.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

import numpy as np

from ..core import Vector, as_vector


def _check_budget(oracle, start, m, name):
    used = oracle.query_count - start
    assert used == m, f"{name} used {used} oracle queries, declared {m}"


def sgd(oracle, x0, m: int, step: Union[float, Callable[[int], float]],
        average: bool = True) -> Vector:
    """Stochastic gradient descent with ``m`` oracle calls.

    ``step`` is either a constant or a function of the 1-based iteration.
    Returns the uniform average of ``x_1..x_m`` (or ``x_m`` if
    ``average=False``).
    """
    if m < 1:
        raise ValueError("SGD needs a budget m >= 1")
    x = as_vector(x0, oracle.dim, "x0").copy()
    step_fn = step if callable(step) else (lambda t, c=float(step): c)
    start = oracle.query_count
    avg = np.zeros_like(x)
    for t in range(1, m + 1):
        x = x - step_fn(t) * oracle.gradient(x)
        avg += (x - avg) / t
    _check_budget(oracle, start, m, "sgd")
    return avg if average else x


def acsa_coefficients(t: int, H: float, exact: bool = False):
    """``(alpha_t, gamma_t) = (2/(t+1), 4H/(t(t+1)))``.

    With ``exact=True`` both are returned as :class:`~fractions.Fraction`; the
    float versions are the correctly rounded values of those rationals.
    """
    if exact:
        return Fraction(2, t + 1), Fraction(4) * Fraction(H) / (t * (t + 1))
    return 2.0 / (t + 1), 4.0 * H / (t * (t + 1))


@dataclass
class ACSAState:
    """Iterates of AC-SA after ``t`` steps."""

    x_ag: Vector
    x: Vector
    H: float
    lam: float
    t: int = 0
    alpha_t: float = float("nan")
    gamma_t: float = float("nan")

    def advance(self, oracle):
        t = self.t + 1
        a, g = acsa_coefficients(t, self.H)
        lam = self.lam
        assert lam + g > 0
        denom = g + (1 - a * a) * lam
        x_md = ((1 - a) * (lam + g) / denom) * self.x_ag + (a * ((1 - a) * lam + g) / denom) * self.x
        grad = oracle.gradient(x_md)
        self.x = ((a * lam / (lam + g)) * x_md + (((1 - a) * lam + g) / (lam + g)) * self.x
                  - (a / (lam + g)) * grad)
        self.x_ag = a * self.x + (1 - a) * self.x_ag
        self.t, self.alpha_t, self.gamma_t = t, a, g
        return x_md


def ac_sa(oracle, x0, m: int, H: float, lam: float,
          callback: Optional[Callable[[ACSAState], None]] = None) -> Vector:
    """Accelerated stochastic approximation for ``H``-smooth, ``lam``-strongly
    convex objectives; returns ``x_m^ag``."""
    if m < 1:
        raise ValueError("AC-SA needs a budget m >= 1")
    if not H > 0 or lam < 0:
        raise ValueError("need H > 0 and lam >= 0")
    x0 = as_vector(x0, oracle.dim, "x0")
    state = ACSAState(x_ag=x0.copy(), x=x0.copy(), H=float(H), lam=float(lam))
    start = oracle.query_count
    for _ in range(m):
        state.advance(oracle)
        if callback is not None:
            callback(state)
    _check_budget(oracle, start, m, "ac_sa")
    return state.x_ag


def ac_sa2(oracle, x0, m: int, H: float, lam: float) -> Vector:
    """AC-SA restarted halfway: ``floor(m/2)`` steps, then the rest from there."""
    if m < 2:
        raise ValueError("AC-SA^2 needs a budget m >= 2")
    first = m // 2
    x1 = ac_sa(oracle, x0, first, H, lam)
    return ac_sa(oracle, x1, m - first, H, lam)
