from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""


@dataclass
class ExperimentConfig:
    """One instance x solver x budget sweep.

    ``instance`` and ``solver`` are descriptors ``{"name": ..., "params": {...}}``.
    ``sigma`` overrides the instance's noise level when the instance takes one.
    """

    instance: dict
    solver: dict
    eps: float = 0.1
    sigma: Optional[float] = None
    budgets: list = field(default_factory=lambda: [1024])
    trials: int = 1
    seed: int = 0
    out: Optional[str] = None
    format: str = "csv"
    workers: int = 1
    fit_range: Optional[list] = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        for label in ("instance", "solver"):
            d = getattr(self, label)
            if isinstance(d, str):
                d = {"name": d, "params": {}}
                setattr(self, label, d)
            if not isinstance(d, dict) or "name" not in d:
                raise ConfigError(f"{label} must be a descriptor with a 'name'")
            d.setdefault("params", {})
        if not isinstance(self.budgets, (list, tuple)) or not self.budgets:
            raise ConfigError("budgets must be a non-empty list")
        try:
            self.budgets = [int(m) for m in self.budgets]
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"budgets must be integers: {exc}") from None
        if any(m < 1 for m in self.budgets):
            raise ConfigError("budgets must be positive")
        if any(b <= a for a, b in zip(self.budgets, self.budgets[1:])):
            raise ConfigError("budgets must be strictly increasing")
        if int(self.trials) < 1:
            raise ConfigError("trials must be at least 1")
        self.trials = int(self.trials)
        if not (isinstance(self.eps, (int, float)) and self.eps > 0):
            raise ConfigError("eps must be positive")
        if self.sigma is not None and self.sigma < 0:
            raise ConfigError("sigma must be nonnegative")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if int(self.workers) < 1:
            raise ConfigError("workers must be at least 1")

    @property
    def instance_descriptor(self) -> dict:
        d = {"name": self.instance["name"], "params": dict(self.instance["params"]),
             "seed": self.seed}
        if self.sigma is not None and d["name"] in ("quadratic", "nbs", "stat_lb"):
            d["params"]["sigma"] = self.sigma
        if d["name"] == "nbs":
            d["params"].setdefault("eps", self.eps)
        return d

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        if "instance" not in d or "solver" not in d:
            raise ConfigError("config needs 'instance' and 'solver'")
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_dict(data)
