from .config import ConfigError, ExperimentConfig
from .io import parse_csv, read_csv, records_to_csv, sweep_to_json, write_csv
from .rates import RateFit, fit_rate
from .runner import (FIELDS, AggregateRow, RunRecord, SweepResult, TrialError, aggregate,
                     nbs_decode, run_sweep, run_trial)

__all__ = [
    "AggregateRow", "ConfigError", "ExperimentConfig", "FIELDS", "RateFit", "RunRecord",
    "SweepResult", "TrialError", "aggregate", "fit_rate", "nbs_decode", "parse_csv",
    "read_csv", "records_to_csv", "run_sweep", "run_trial", "sweep_to_json", "write_csv",
]
