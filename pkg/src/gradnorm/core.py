"""Vectors, objectives, function-class metadata and verification helpers.

Everything here works on 1-D ``float64`` numpy arrays.  Objectives are thin
wrappers around a value and a gradient callable plus the constants that the
solvers need (smoothness ``H``, strong convexity ``lam``, the initial point
and optional distance/range bounds).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from numpy.typing import NDArray

Vector = NDArray[np.float64]


class GradientCheckError(ValueError):
    """Raised when a value or gradient is not finite during verification."""

    def __init__(self, message, coordinate=None):
        super().__init__(message)
        self.coordinate = coordinate


def as_vector(x, dim: Optional[int] = None, name: str = "x") -> Vector:
    """Return ``x`` as a finite 1-D float64 array, checking its dimension."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"{name} has dimension {v.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite entries")
    return v


@dataclass(frozen=True)
class FunctionClassInfo:
    """Constants describing the class an objective belongs to.

    ``H`` is the smoothness constant, ``lam`` the strong-convexity modulus,
    ``R`` an upper bound on ``||x0 - x*||`` and ``Delta`` an upper bound on
    ``F(x0) - F*``.  Either bound may be ``None`` when unknown.
    """

    H: float
    lam: float
    x0: Vector
    R: Optional[float] = None
    Delta: Optional[float] = None

    def __post_init__(self):
        if not self.H > 0:
            raise ValueError(f"smoothness H must be positive, got {self.H}")
        if self.lam < 0:
            raise ValueError(f"strong convexity must be nonnegative, got {self.lam}")
        if self.lam > self.H * (1 + 1e-12):
            raise ValueError(f"strong convexity {self.lam} exceeds smoothness {self.H}")
        for label in ("R", "Delta"):
            val = getattr(self, label)
            if val is not None and val < 0:
                raise ValueError(f"{label} must be nonnegative, got {val}")
        object.__setattr__(self, "x0", as_vector(self.x0, name="x0"))

    @property
    def dim(self) -> int:
        return self.x0.shape[0]

    def require_bound(self):
        """Non-strongly-convex runs need an R or a Delta bound."""
        if self.lam == 0 and self.R is None and self.Delta is None:
            raise ValueError("non-strongly-convex objective needs R or Delta")


class Objective:
    """A differentiable convex function with declared class constants."""

    def __init__(
        self,
        value: Callable[[Vector], float],
        gradient: Callable[[Vector], Vector],
        info: FunctionClassInfo,
        exact_minimizer: Optional[Callable[[], Vector]] = None,
        name: str = "objective",
    ):
        self._value = value
        self._gradient = gradient
        self.info = info
        self.dim = info.dim
        self._exact_minimizer = exact_minimizer
        self.name = name

    def value(self, x) -> float:
        return float(self._value(as_vector(x, self.dim)))

    def gradient(self, x) -> Vector:
        return as_vector(self._gradient(as_vector(x, self.dim)), self.dim, "gradient")

    def value_and_gradient(self, x):
        x = as_vector(x, self.dim)
        return float(self._value(x)), as_vector(self._gradient(x), self.dim, "gradient")

    @property
    def has_exact_minimizer(self) -> bool:
        return self._exact_minimizer is not None

    def exact_minimizer(self) -> Vector:
        if self._exact_minimizer is None:
            raise AttributeError(f"{self.name} has no closed-form minimizer")
        return as_vector(self._exact_minimizer(), self.dim, "x*")

    def __repr__(self):
        return f"Objective({self.name!r}, d={self.dim}, H={self.info.H:g}, lam={self.info.lam:g})"


def default_fd_step(x: Vector) -> float:
    return 1e-5 * max(1.0, float(np.linalg.norm(x)))


def fd_gradient(obj: Objective, x, h: Optional[float] = None) -> Vector:
    """Central-difference gradient of ``obj`` at ``x``."""
    x = as_vector(x, obj.dim)
    h = default_fd_step(x) if h is None else h
    if not h > 0:
        raise ValueError("finite-difference step must be positive")
    out = np.empty(obj.dim)
    for i in range(obj.dim):
        e = np.zeros(obj.dim)
        e[i] = h
        fp = obj._value(x + e)
        fm = obj._value(x - e)
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise GradientCheckError(f"non-finite value along coordinate {i}", i)
        out[i] = (fp - fm) / (2 * h)
    return out


def fd_gradient_check(obj: Objective, x, h: Optional[float] = None) -> float:
    """Max-abs difference between the analytic gradient and central differences."""
    x = as_vector(x, obj.dim)
    g = np.asarray(obj._gradient(x), dtype=np.float64)
    bad = np.flatnonzero(~np.isfinite(g))
    if bad.size:
        raise GradientCheckError(f"non-finite gradient at coordinate {bad[0]}", int(bad[0]))
    return float(np.max(np.abs(fd_gradient(obj, x, h) - g)))


def make_regularized(obj: Objective, lam: float, center) -> Objective:
    """``F(x) + (lam/2)||x - center||^2`` with updated class constants."""
    if lam < 0:
        raise ValueError("regularization must be nonnegative")
    if lam == 0:
        return obj
    c = as_vector(center, obj.dim, "center")
    info = obj.info
    new_info = replace(info, H=info.H + lam, lam=info.lam + lam)

    def value(x):
        r = x - c
        return obj._value(x) + 0.5 * lam * float(r @ r)

    def gradient(x):
        return obj._gradient(x) + lam * (x - c)

    return Objective(value, gradient, new_info, name=f"{obj.name}+prox({lam:g})")


# -- random streams -------------------------------------------------------

def rng_stream(seed: int, stream_id: int, *path: int) -> np.random.Generator:
    """Counter-based generator keyed by ``(seed, stream_id, *path)``.

    Philox with a ``SeedSequence`` spawn key gives streams that are
    reproducible across platforms and independent of scheduling order.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream_id), *map(int, path)))
    return np.random.Generator(np.random.Philox(ss))


def fork_stream(rng: np.random.Generator) -> np.random.Generator:
    """Child stream that never overlaps its parent."""
    return np.random.Generator(np.random.Philox(rng.bit_generator.seed_seq.spawn(1)[0]))


# -- sampled function-class checks ---------------------------------------

@dataclass
class ClassCheck:
    smoothness_ratio: float = 0.0  # max ||g(x)-g(y)|| / ||x-y||
    convexity_slack: float = np.inf  # min F(y) - lower bound, normalised
    fd_error: float = 0.0  # max fd error relative to max(1, ||g||)
    violations: list = field(default_factory=list)


def sample_class_check(obj: Objective, rng: np.random.Generator, pairs: int = 100,
                       fd_points: int = 20, scale: float = 1.0) -> ClassCheck:
    """Sample the smoothness and strong-convexity inequalities around ``x0``.

    Points are drawn from a Gaussian of width ``scale`` centred at ``x0``.
    """
    info = obj.info
    out = ClassCheck()
    x0 = info.x0
    for _ in range(pairs):
        x = x0 + scale * rng.standard_normal(obj.dim)
        y = x0 + scale * rng.standard_normal(obj.dim)
        gx, gy = obj.gradient(x), obj.gradient(y)
        dist = float(np.linalg.norm(x - y))
        if dist == 0:
            continue
        ratio = float(np.linalg.norm(gx - gy)) / dist
        out.smoothness_ratio = max(out.smoothness_ratio, ratio)
        if ratio > info.H * (1 + 1e-9):
            out.violations.append(("smoothness", ratio))
        lower = obj.value(x) + float(gx @ (y - x)) + 0.5 * info.lam * dist**2
        fy = obj.value(y)
        slack = (fy - lower) / max(1.0, abs(fy))
        out.convexity_slack = min(out.convexity_slack, slack)
        if slack < -1e-10:
            out.violations.append(("strong_convexity", slack))
    for _ in range(fd_points):
        x = x0 + scale * rng.standard_normal(obj.dim)
        err = fd_gradient_check(obj, x) / max(1.0, float(np.linalg.norm(obj.gradient(x))))
        out.fd_error = max(out.fd_error, err)
        if err > 1e-6:
            out.violations.append(("fd_gradient", err))
    return out
