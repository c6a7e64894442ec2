"""``gradnorm run``: execute a sweep and write CSV or JSON.

Exit codes: 0 success, 2 configuration error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .harness import (ConfigError, ExperimentConfig, fit_rate, records_to_csv, run_sweep,
                      sweep_to_json)

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3


def _descriptor(text):
    """``name`` or a JSON descriptor ``{"name": ..., "params": {...}}``."""
    text = text.strip()
    if text.startswith("{"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad descriptor JSON: {exc}") from None
    return {"name": text, "params": {}}


def _budgets(text):
    try:
        return [int(float(b)) for b in text.split(",") if b.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --budgets: {exc}") from None


def build_parser():
    p = argparse.ArgumentParser(prog="gradnorm")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an instance x solver x budget sweep")
    r.add_argument("--config", help="JSON file mirroring ExperimentConfig")
    r.add_argument("--instance", help="instance name or JSON descriptor")
    r.add_argument("--solver", help="solver name or JSON descriptor")
    r.add_argument("--eps", type=float)
    r.add_argument("--sigma", type=float)
    r.add_argument("--seed", type=int)
    r.add_argument("--trials", type=int)
    r.add_argument("--budgets", help="comma-separated, e.g. 256,1024,4096")
    r.add_argument("--out", help="output path (default: stdout)")
    r.add_argument("--format", choices=("csv", "json"))
    r.add_argument("--workers", type=int)
    return p


def load_config(args) -> ExperimentConfig:
    data = {}
    if args.config:
        with_cfg = ExperimentConfig.from_json(args.config)
        data = with_cfg.to_dict()
    if args.instance:
        data["instance"] = _descriptor(args.instance)
    if args.solver:
        data["solver"] = _descriptor(args.solver)
    if args.budgets:
        data["budgets"] = _budgets(args.budgets)
    for key in ("eps", "sigma", "seed", "trials", "out", "format", "workers"):
        v = getattr(args, key)
        if v is not None:
            data[key] = v
    return ExperimentConfig.from_dict(data)


def _summary(result, fit):
    lines = ["m,n,mean_grad_norm,stderr"]
    lines += [f"{a.m},{a.n},{a.mean:.6g},{a.stderr:.3g}" for a in result.aggregate]
    if fit is not None:
        lines.append(f"fit,slope={fit.slope:.4f},intercept={fit.intercept:.4f},r2={fit.r2:.4f}")
    return "\n".join(lines)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        result = run_sweep(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    fit = None
    lo, hi = cfg.fit_range if cfg.fit_range else (None, None)
    try:
        fit = fit_rate(result.aggregate, lo, hi)
    except ValueError:
        pass
    text = sweep_to_json(result, fit) if cfg.format == "json" else records_to_csv(result.records)
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(_summary(result, fit), file=sys.stderr)
    for m, t, err in result.failures:
        print(f"trial failed: {err}", file=sys.stderr)
    return EXIT_SOLVER if result.failures else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
