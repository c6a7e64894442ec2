from .erm import ERMConvergenceError, ERMResult, EmpiricalObjective, default_erm_tol, erm_solve
from .first_order import ACSAState, ac_sa, ac_sa2, acsa_coefficients, sgd
from .one_dim import OneDimResult, batch_sizes, erm_1d, one_dim_nonsmooth, one_dim_nonsmooth_details
from .recursive import RRState, SubroutineSpec, rr_horizon, rr_meta, rr_rerm, rr_run, split_budget
from .schedules import schedule_lambda

__all__ = [
    "ACSAState", "ERMConvergenceError", "ERMResult", "EmpiricalObjective", "OneDimResult",
    "RRState", "SubroutineSpec", "ac_sa", "ac_sa2", "acsa_coefficients", "batch_sizes",
    "default_erm_tol", "erm_1d", "erm_solve", "one_dim_nonsmooth", "one_dim_nonsmooth_details",
    "rr_horizon", "rr_meta", "rr_rerm", "rr_run", "schedule_lambda", "sgd", "split_budget",
]
