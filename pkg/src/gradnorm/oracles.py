"""The three oracle access models with exact query accounting.

A :class:`StochasticModel` describes ``f(x; z)`` together with the sampling
distribution of ``z`` and the population objective ``F = E f(., z)``.  The
oracles own their counters and their random stream; solvers only see the
``query``/``draw`` methods.
"""

from __future__ import annotations

from collections.abc import Sequence
from typing import Optional

import numpy as np

from .core import FunctionClassInfo, Objective, Vector, as_vector, make_regularized


class OracleBudgetError(RuntimeError):
    """Raised when an oracle is asked for more queries than its budget."""


class StochasticModel:
    """Component functions ``f(x; z)`` with ``z ~ D``.

    Subclasses implement :meth:`sample`, :meth:`component_value` and
    :meth:`component_gradient`.  The ``mean_*`` methods take a stacked batch of
    draws and may be overridden with vectorised code; ERM relies on them.

    Attributes
    ----------
    population : Objective
        ``F(x) = E_z f(x; z)``.
    sigma : float
        Bound on ``sup_x E||grad f(x; z) - grad F(x)||^2`` (square root).
    components_convex : bool
        Whether every ``f(.; z)`` is convex.  Recorded, not verified here.
    component_H : float
        Smoothness of each component.
    """

    population: Objective
    sigma: float
    components_convex: bool = True
    component_H: float
    component_lam: float = 0.0

    @property
    def dim(self) -> int:
        return self.population.dim

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def component_value(self, x: Vector, z) -> float:
        raise NotImplementedError

    def component_gradient(self, x: Vector, z) -> Vector:
        raise NotImplementedError

    def mean_value(self, x: Vector, Z) -> float:
        return float(np.mean([self.component_value(x, z) for z in Z]))

    def mean_gradient(self, x: Vector, Z) -> Vector:
        return np.mean([self.component_gradient(x, z) for z in Z], axis=0)

    def component_gradients(self, x: Vector, Z) -> np.ndarray:
        """Stacked ``grad f(x; z)`` for every draw in ``Z``, shape ``(n, d)``."""
        return np.array([self.component_gradient(x, z) for z in Z])

    def component(self, z) -> "Component":
        return Component(self, z)


class Component(Objective):
    """``f(.; z)`` for one fixed draw, plus optional proximal terms.

    The draw is held by value so components outlive the oracle.
    """

    def __init__(self, model: StochasticModel, z, prox=()):
        self.model = model
        self.z = z
        self.prox = tuple(prox)
        mu = sum(p[0] for p in self.prox)
        x0 = model.population.info.x0
        info = FunctionClassInfo(H=model.component_H + mu, lam=model.component_lam + mu, x0=x0)
        super().__init__(self._val, self._grad, info, name="component")

    def _val(self, x):
        return self.model.component_value(x, self.z) + prox_value(self.prox, x)

    def _grad(self, x):
        return self.model.component_gradient(x, self.z) + prox_gradient(self.prox, x)


class ComponentBatch(Sequence):
    """``n`` draws from one model stored as a stacked array."""

    def __init__(self, model: StochasticModel, Z, prox=()):
        self.model = model
        self.Z = Z
        self.prox = tuple(prox)

    def __len__(self):
        return len(self.Z)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return ComponentBatch(self.model, self.Z[i], self.prox)
        return Component(self.model, self.Z[i], self.prox)


# -- proximal terms --------------------------------------------------------
# A prox term (mu, c) stands for (mu/2)||x - c||^2.

def prox_value(prox, x) -> float:
    total = 0.0
    for mu, c in prox:
        r = x - c
        total += 0.5 * mu * float(r @ r)
    return total


def prox_gradient(prox, x):
    g = np.zeros_like(x)
    for mu, c in prox:
        g += mu * (x - c)
    return g


def prox_objective(obj: Objective, prox) -> Objective:
    out = obj
    for mu, c in prox:
        out = make_regularized(out, mu, c)
    return out


# -- oracles ---------------------------------------------------------------

class _Counted:
    def __init__(self, budget: Optional[int]):
        if budget is not None and budget < 0:
            raise ValueError("budget must be nonnegative")
        self.budget = budget
        self.query_count = 0

    def _charge(self, n: int = 1):
        if self.budget is not None and self.query_count + n > self.budget:
            raise OracleBudgetError(
                f"oracle budget {self.budget} exhausted ({self.query_count} used, {n} requested)"
            )
        self.query_count += n

    @property
    def remaining(self) -> Optional[int]:
        return None if self.budget is None else self.budget - self.query_count


class DeterministicOracle(_Counted):
    """Returns exact ``(F(x), grad F(x))``."""

    kind = "deterministic"

    def __init__(self, objective: Objective, budget: Optional[int] = None):
        super().__init__(budget)
        self.objective = objective
        self.info = objective.info
        self.dim = objective.dim

    def query(self, x):
        x = as_vector(x, self.dim)
        self._charge()
        return float(self.objective._value(x)), np.asarray(self.objective._gradient(x), dtype=float)

    def gradient(self, x):
        x = as_vector(x, self.dim)
        self._charge()
        return np.asarray(self.objective._gradient(x), dtype=float)


class StochasticOracle(_Counted):
    """Draws a fresh ``z`` per query and returns ``(f(x; z), grad f(x; z))``.

    Draws are generated in blocks from the owned stream; the output is a
    function of the seed, the stream position and ``x`` only.
    """

    kind = "stochastic"

    def __init__(self, model: StochasticModel, stream: np.random.Generator,
                 budget: Optional[int] = None, block: int = 512):
        super().__init__(budget)
        self.model = model
        self.stream = stream
        self.info = model.population.info
        self.dim = model.dim
        self._block = block
        self._buf = None
        self._pos = 0

    def _next_z(self):
        if self._buf is None or self._pos >= len(self._buf):
            self._buf = self.model.sample(self.stream, self._block)
            self._pos = 0
        z = self._buf[self._pos]
        self._pos += 1
        return z

    def query(self, x):
        if x.shape != (self.dim,):
            raise ValueError(f"query point has shape {x.shape}, expected ({self.dim},)")
        self._charge()
        z = self._next_z()
        return self.model.component_value(x, z), self.model.component_gradient(x, z)

    def gradient(self, x):
        """Gradient-only query; still counts as one oracle call."""
        if x.shape != (self.dim,):
            raise ValueError(f"query point has shape {x.shape}, expected ({self.dim},)")
        self._charge()
        return self.model.component_gradient(x, self._next_z())


class GlobalOracle(_Counted):
    """Returns the full component function ``f(.; z)`` for a fresh draw."""

    kind = "global"

    def __init__(self, model: StochasticModel, stream: np.random.Generator,
                 budget: Optional[int] = None):
        super().__init__(budget)
        self.model = model
        self.stream = stream
        self.info = model.population.info
        self.dim = model.dim

    @property
    def sample_count(self) -> int:
        return self.query_count

    def draw(self, x=None) -> Component:
        # the query point is ignored by design
        self._charge()
        return Component(self.model, self.model.sample(self.stream, 1)[0])

    def draw_batch(self, n: int) -> ComponentBatch:
        """``n`` independent draws, counted as ``n`` queries."""
        if n < 0:
            raise ValueError("batch size must be nonnegative")
        self._charge(n)
        return ComponentBatch(self.model, self.model.sample(self.stream, n))


class ProxOracle:
    """View of a first-order oracle for ``F + sum_k (mu_k/2)||x - c_k||^2``.

    Shares the wrapped oracle's counter, so queries through the view are
    charged to the underlying budget.
    """

    def __init__(self, base, prox):
        self.base = base
        self.prox = tuple((float(mu), np.asarray(c, dtype=float)) for mu, c in prox)
        self.dim = base.dim
        mu = sum(p[0] for p in self.prox)
        info = base.info
        self.info = FunctionClassInfo(H=info.H + mu, lam=info.lam + mu, x0=info.x0,
                                      R=info.R, Delta=info.Delta)
        self.kind = base.kind

    @property
    def query_count(self):
        return self.base.query_count

    def query(self, x):
        v, g = self.base.query(x)
        return v + prox_value(self.prox, x), g + prox_gradient(self.prox, x)

    def gradient(self, x):
        if hasattr(self.base, "gradient"):
            g = self.base.gradient(x)
        else:
            g = self.base.query(x)[1]
        return g + prox_gradient(self.prox, x)


class ProxGlobalOracle:
    """Global-oracle view whose components carry extra proximal terms."""

    kind = "global"

    def __init__(self, base: GlobalOracle, prox):
        self.base = base
        self.prox = tuple((float(mu), np.asarray(c, dtype=float)) for mu, c in prox)
        self.dim = base.dim
        self.model = base.model
        mu = sum(p[0] for p in self.prox)
        info = base.info
        self.info = FunctionClassInfo(H=info.H + mu, lam=info.lam + mu, x0=info.x0,
                                      R=info.R, Delta=info.Delta)

    @property
    def query_count(self):
        return self.base.query_count

    sample_count = query_count

    def draw(self, x=None):
        c = self.base.draw(x)
        return Component(c.model, c.z, c.prox + self.prox)

    def draw_batch(self, n):
        b = self.base.draw_batch(n)
        return ComponentBatch(b.model, b.Z, b.prox + self.prox)


def regularized_oracle(oracle, lam: float, center):
    """Oracle for ``F(x) + (lam/2)||x - center||^2`` sharing the base counter."""
    prox = [(lam, as_vector(center, oracle.dim, "center"))] if lam > 0 else []
    if oracle.kind == "global":
        return ProxGlobalOracle(oracle, prox)
    return ProxOracle(oracle, prox)


# module-level spellings of the oracle operations

def query_det(o: DeterministicOracle, x):
    return o.query(x)


def query_sto(o: StochasticOracle, x):
    return o.query(as_vector(x, o.dim))


def draw_component(o: GlobalOracle, x=None) -> Component:
    return o.draw(x)
