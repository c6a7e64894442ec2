"""Seeded trials, budget sweeps and the per-budget aggregate table."""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..core import rng_stream
from ..oracles import DeterministicOracle, OracleBudgetError
from . import registry
from .config import ConfigError, ExperimentConfig


class TrialError(RuntimeError):
    """Solver failure, annotated with the configuration that produced it."""

    def __init__(self, message, config: dict, m: int, trial: int):
        super().__init__(f"{message} (m={m}, trial={trial}, config={config})")
        self.config = config
        self.m = m
        self.trial = trial


@dataclass
class RunRecord:
    instance: str
    solver: str
    seed: int
    trial: int
    m: int
    oracle_calls: int
    grad_norm: float
    f_subopt: float
    wall_ms: float
    # solver output; kept in memory only, not serialized
    x_hat: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def key(self):
        """Every serialized field except the wall-clock time."""
        d = {k: getattr(self, k) for k in FIELDS}
        d.pop("wall_ms")
        return d


FIELDS = ("instance", "solver", "seed", "trial", "m", "oracle_calls", "grad_norm",
          "f_subopt", "wall_ms")


@dataclass
class AggregateRow:
    m: int
    n: int
    mean: float
    std: float
    stderr: float


@dataclass
class SweepResult:
    records: list
    aggregate: list
    failures: list = field(default_factory=list)


def _subopt(inst, x):
    objective = inst.objective
    if not objective.has_exact_minimizer:
        return math.nan
    x_star = objective.exact_minimizer()
    return float(objective.value(x) - objective.value(x_star))


def run_trial(cfg: ExperimentConfig, m: int, trial_index: int, inst=None) -> RunRecord:
    """One solver run with budget ``m`` on oracle stream ``trial_index``.

    The returned point is scored with a separate deterministic oracle, so the
    evaluation never touches the solver's counter.
    """
    registry.check_solver(cfg)
    if inst is None:
        inst = registry.make_instance(cfg)
    stream = rng_stream(cfg.seed, trial_index)
    oracle = registry.make_oracle(cfg, inst, stream, m)
    t0 = time.perf_counter()
    try:
        x_hat = registry.run_solver(cfg, inst, oracle, m)
    except ConfigError:
        raise
    except (ArithmeticError, ValueError, AssertionError, OracleBudgetError, RuntimeError) as exc:
        raise TrialError(f"{type(exc).__name__}: {exc}", cfg.to_dict(), m, trial_index) from exc
    wall_ms = (time.perf_counter() - t0) * 1e3
    evaluator = DeterministicOracle(inst.objective)
    g = evaluator.gradient(x_hat)
    return RunRecord(
        instance=cfg.instance["name"], solver=cfg.solver["name"], seed=cfg.seed,
        trial=trial_index, m=m, oracle_calls=oracle.query_count,
        grad_norm=float(np.linalg.norm(g)), f_subopt=_subopt(inst, x_hat), wall_ms=wall_ms,
        x_hat=np.asarray(x_hat),
    )


def _task(args, inst=None):
    cfg_dict, m, trial = args
    cfg = ExperimentConfig.from_dict(cfg_dict)
    try:
        return run_trial(cfg, m, trial, inst), None
    except TrialError as exc:
        return None, (m, trial, str(exc))


def aggregate(records) -> list[AggregateRow]:
    """Mean and standard error of ``grad_norm`` per budget, folded in ``(m, trial)`` order."""
    rows = []
    for m in sorted({r.m for r in records}):
        g = np.array([r.grad_norm for r in sorted(records, key=lambda r: r.trial) if r.m == m])
        n = len(g)
        std = float(g.std(ddof=1)) if n > 1 else 0.0
        rows.append(AggregateRow(m=m, n=n, mean=float(g.mean()), std=std,
                                 stderr=std / math.sqrt(n)))
    return rows


def run_sweep(cfg: ExperimentConfig, workers: Optional[int] = None) -> SweepResult:
    """All ``trials x budgets`` runs.  Failed trials are listed in ``failures``."""
    registry.check_solver(cfg)
    inst = registry.make_instance(cfg)  # surface descriptor errors before any work
    workers = cfg.workers if workers is None else workers
    tasks = [(cfg.to_dict(), m, t) for m in cfg.budgets for t in range(cfg.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_task, tasks))
    else:
        results = [_task(t, inst) for t in tasks]
    records = [r for r, _ in results if r is not None]
    failures = [f for _, f in results if f is not None]
    records.sort(key=lambda r: (r.m, r.trial))
    return SweepResult(records=records, aggregate=aggregate(records), failures=failures)


def nbs_decode(record_or_x, inst) -> int:
    """Interval index ``j_hat`` containing the solver output, clamped to ``[1, N]``.

    Accepts a raw point or any object with an ``x_hat`` attribute.
    """
    x = getattr(record_or_x, "x_hat", record_or_x)
    return inst.interval_index(float(np.ravel(x)[0]))
