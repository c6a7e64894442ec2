"""Name -> instance / solver wiring used by the runner and the CLI."""

from __future__ import annotations

import numpy as np

from ..instances import build_instance
from ..oracles import GlobalOracle, StochasticOracle, regularized_oracle
from ..solvers import (SubroutineSpec, ac_sa, ac_sa2, default_erm_tol, erm_solve,
                       one_dim_nonsmooth, rr_horizon, rr_meta, schedule_lambda, sgd)
from .config import ConfigError

# solver name -> oracle kind it consumes
SOLVERS = {
    "sgd": "stochastic",
    "ac_sa": "stochastic",
    "ac_sa2": "stochastic",
    "rr_acsa2": "stochastic",
    "rr_sgd": "stochastic",
    "rr_rerm": "global",
    "rerm": "global",
    "one_dim": "global",
}

LAMBDA_MODES = ("instance", "fixed", "none", "domain_R", "range_Delta", "sample_R", "sample_Delta")


def make_instance(cfg):
    try:
        return build_instance(cfg.instance_descriptor)
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"bad instance {cfg.instance!r}: {exc}") from None


def resolve_lambda(cfg, info, sigma):
    """Return ``(lam, regularize)`` for the configured solver.

    ``regularize`` means the solver runs on ``F + (lam/2)||x - x0||^2``.
    """
    p = cfg.solver["params"]
    mode = p.get("lambda_mode", "instance")
    if mode not in LAMBDA_MODES:
        raise ConfigError(f"unknown lambda_mode {mode!r}")
    if mode == "none":
        return 0.0, False
    if mode == "instance":
        return float(info.lam), False
    if mode == "fixed":
        if "lambda" not in p:
            raise ConfigError("lambda_mode 'fixed' needs a 'lambda' parameter")
        return float(p["lambda"]), bool(p.get("regularize", False))
    try:
        lam = schedule_lambda(mode, info.H, R=info.R, Delta=info.Delta, sigma=sigma,
                              eps=cfg.eps, c_lambda=float(p.get("c_lambda", 1.0)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return lam, bool(p.get("regularize", True))


def check_solver(cfg):
    name = cfg.solver["name"]
    if name not in SOLVERS:
        raise ConfigError(f"unknown solver {name!r}; expected one of {sorted(SOLVERS)}")


def make_oracle(cfg, inst, stream, m):
    kind = SOLVERS[cfg.solver["name"]]
    if kind == "global":
        return GlobalOracle(inst.model, stream, budget=m)
    return StochasticOracle(inst.model, stream, budget=m)


def run_solver(cfg, inst, oracle, m):
    """Execute the configured solver on ``oracle``; returns ``x_hat``."""
    name = cfg.solver["name"]
    p = cfg.solver["params"]
    info = inst.model.population.info
    x0 = info.x0
    sigma = inst.model.sigma
    if name == "one_dim":
        L = float(p.get("L", getattr(inst.model, "L", 1.0)))
        x = one_dim_nonsmooth(oracle, cfg.eps, float(p.get("sigma", sigma)), L)
        return np.array([x])
    lam, regularize = resolve_lambda(cfg, info, sigma)
    view = regularized_oracle(oracle, lam, x0) if regularize and lam > 0 else oracle
    H = view.info.H
    lam_sc = view.info.lam
    if name == "sgd":
        step = p.get("step")
        if step is None:
            step = (lambda t: 1.0 / (H + lam_sc * t)) if lam_sc > 0 else 1.0 / (2 * H)
        return sgd(view, x0, m, step, average=bool(p.get("average", True)))
    if name == "ac_sa":
        return ac_sa(view, x0, m, H, lam_sc)
    if name == "ac_sa2":
        return ac_sa2(view, x0, m, H, lam_sc)
    rr_lam = lam
    if not rr_lam > 0:
        raise ConfigError(f"solver {name!r} needs a positive regularization parameter")
    if name in ("rr_acsa2", "rr_sgd"):
        kind = "acsa2" if name == "rr_acsa2" else "sgd"
        return rr_meta(view, x0, m, SubroutineSpec(kind), rr_lam, H)
    T = rr_horizon(H, rr_lam)
    tol = float(p.get("erm_tol", default_erm_tol(cfg.eps, T, rr_lam, H)))
    if name == "rr_rerm":
        spec = SubroutineSpec("rerm", options={"erm_tol": tol})
        return rr_meta(view, x0, m, spec, rr_lam, H)
    if name == "rerm":
        return erm_solve(view.draw_batch(m), lam_sc, x0, tol=tol).x_hat
    raise ConfigError(f"unknown solver {name!r}")
