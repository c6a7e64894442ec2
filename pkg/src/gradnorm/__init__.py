"""Near-stationary points of stochastic convex functions.

Submodules: :mod:`~gradnorm.core` (objectives, fd checks, RNG streams),
:mod:`~gradnorm.oracles`, :mod:`~gradnorm.instances`, :mod:`~gradnorm.solvers`
and :mod:`~gradnorm.harness`.
"""

from .core import FunctionClassInfo, GradientCheckError, Objective, fd_gradient_check, rng_stream
from .oracles import DeterministicOracle, GlobalOracle, OracleBudgetError, StochasticOracle

__version__ = "0.1.0"

__all__ = [
    "DeterministicOracle", "FunctionClassInfo", "GlobalOracle", "GradientCheckError",
    "Objective", "OracleBudgetError", "StochasticOracle", "fd_gradient_check", "rng_stream",
]
