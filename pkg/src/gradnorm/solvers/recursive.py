"""Recursive regularization with a pluggable inner method.

Round ``t`` minimizes ``F^(t-1)(x) = F(x) + lam * sum_{k<t} 2^(k-1) ||x - xhat_k||^2``
from ``xhat_{t-1}``; its output becomes the next anchor.  Internally a term
``lam 2^(k-1) ||x - c||^2`` is stored as the prox pair ``(lam 2^k, c)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..core import Objective, Vector, as_vector
from ..oracles import ProxGlobalOracle, ProxOracle, prox_objective
from .erm import default_erm_tol, erm_solve
from .first_order import ac_sa2, sgd


def rr_horizon(H: float, lam: float) -> int:
    """``T = floor(log2(H/lam))``, computed by exact doubling."""
    if not (lam > 0 and H > 0):
        raise ValueError("need H > 0 and lam > 0")
    T = 0
    while lam * 2.0 ** (T + 1) <= H:
        T += 1
    return T


def split_budget(m: int, T: int) -> list[int]:
    """``floor(m/T)`` per round with the remainder added to the last round."""
    if T < 1:
        return [m]
    base = m // T
    out = [base] * T
    out[-1] += m - base * T
    return out


@dataclass
class SubroutineSpec:
    """Inner method run in every round.

    ``kind`` is ``"acsa2"``, ``"sgd"``, ``"rerm"`` or ``"custom"``.  A custom
    ``fn(oracle_view, x_init, budget, H_t, lam_t, round_index)`` must charge
    exactly ``budget`` queries to the view.
    """

    kind: str = "acsa2"
    fn: Optional[Callable] = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("acsa2", "sgd", "rerm", "custom"):
            raise ValueError(f"unknown subroutine kind {self.kind!r}")
        if self.kind == "custom" and self.fn is None:
            raise ValueError("custom subroutine needs fn")

    @property
    def is_global(self):
        return self.kind == "rerm"

    def run(self, view, x_init, budget, H_t, lam_t, t):
        if self.kind == "acsa2":
            return ac_sa2(view, x_init, budget, H_t, lam_t)
        if self.kind == "sgd":
            step = self.options.get("step")
            if step is None:
                step = lambda s: 1.0 / (H_t + lam_t * s)  # noqa: E731
            return sgd(view, x_init, budget, step)
        if self.kind == "rerm":
            comps = view.draw_batch(budget)
            res = erm_solve(comps, lam_t, x_init, tol=self.options["erm_tol"],
                            max_iter=self.options.get("max_iter", 100_000))
            return res.x_hat
        return self.fn(view, x_init, budget, H_t, lam_t, t)


@dataclass
class RRState:
    """Anchors and augmentation of one recursive-regularization run.

    ``anchors[0]`` is the initial point; ``anchors[t]`` is the output of round ``t``.
    """

    lam: float
    T: int
    anchors: list = field(default_factory=list)
    budgets: list = field(default_factory=list)
    t: int = 0

    def prox(self, t: Optional[int] = None):
        """Prox pairs making up ``F^(t)`` (defaults to the current round).

        ``t`` is capped at ``T``: the fallback run for ``T = 0`` adds no term.
        """
        t = min(self.t if t is None else t, self.T)
        return [(self.lam * 2.0**k, self.anchors[k]) for k in range(1, t + 1)]

    def augmented(self, F: Objective, t: Optional[int] = None) -> Objective:
        """``F^(t)`` as an :class:`Objective`."""
        return prox_objective(F, self.prox(t))

    @property
    def x_hat(self) -> Vector:
        return self.anchors[-1]


def _view(oracle, prox):
    if oracle.kind == "global":
        return ProxGlobalOracle(oracle, prox)
    return ProxOracle(oracle, prox)


def rr_run(oracle, x0, m: int, subroutine: SubroutineSpec, lam: float,
           H: Optional[float] = None, callback=None) -> RRState:
    """Run recursive regularization and return the full state."""
    info = oracle.info
    H = info.H if H is None else float(H)
    T = rr_horizon(H, lam)
    x0 = as_vector(x0, oracle.dim, "x0")
    if subroutine.is_global != (oracle.kind == "global"):
        raise ValueError(f"subroutine {subroutine.kind!r} cannot use a {oracle.kind} oracle")
    if T >= 1 and m < T:
        raise ValueError(f"budget m={m} is smaller than the number of rounds T={T}")
    state = RRState(lam=float(lam), T=T, anchors=[x0.copy()], budgets=split_budget(m, T))
    start = oracle.query_count
    base_lam = info.lam
    for t, budget in enumerate(state.budgets, start=1):
        prox = state.prox(t - 1)
        mu = sum(p[0] for p in prox)
        x_t = subroutine.run(_view(oracle, prox), state.anchors[-1], budget,
                             H + mu, base_lam + mu, t)
        state.anchors.append(np.asarray(x_t, dtype=float).copy())
        state.t = t
        if callback is not None:
            callback(state)
    used = oracle.query_count - start
    assert used == m, f"recursive regularization used {used} queries, declared {m}"
    return state


def rr_meta(oracle, x0, m: int, subroutine: SubroutineSpec, lam: float,
            H: Optional[float] = None) -> Vector:
    """Return ``xhat_T``.  With ``T = 0`` the subroutine runs once on ``F``."""
    return rr_run(oracle, x0, m, subroutine, lam, H).x_hat


def rr_rerm(global_oracle, x0, m: int, H: float, lam: float, eps: Optional[float] = None,
            erm_tol: Optional[float] = None, max_iter: int = 100_000) -> Vector:
    """Recursive regularization with regularized ERM in every round.

    ``erm_tol`` defaults to ``min(eps/(100 2^T), lam eps/(100 H))`` when
    ``eps`` is given and to ``1e-10 max(1, H)`` otherwise.
    """
    if erm_tol is None:
        T = rr_horizon(H, lam)
        erm_tol = default_erm_tol(eps, T, lam, H) if eps is not None else 1e-10 * max(1.0, H)
    spec = SubroutineSpec("rerm", options={"erm_tol": erm_tol, "max_iter": max_iter})
    return rr_meta(global_oracle, x0, m, spec, lam, H)
