"""Benchmark objectives and the two lower-bound constructions.

Every instance exposes a :class:`~gradnorm.oracles.StochasticModel` (so it can
be wrapped by any of the three oracles), its population objective and a JSON
descriptor ``{"name", "params", "seed"}`` from which :func:`build_instance`
rebuilds it exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import FunctionClassInfo, Objective, as_vector, rng_stream
from .oracles import StochasticModel

# stream ids reserved for instance construction (trials use small ids)
_INSTANCE_STREAM = 2**31 - 1


def _instance_rng(seed, tag):
    return rng_stream(seed, _INSTANCE_STREAM, tag)


def _random_orthogonal(rng, d):
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


# -- quadratics ------------------------------------------------------------

class QuadraticModel(StochasticModel):
    """``F(x) = 0.5 (x-x*)^T A (x-x*) + c`` with one of two noise forms.

    ``additive``: ``f(x; z) = F(x) + <z, x>`` with ``z ~ N(0, sigma^2/d I)``.
    ``component``: ``f(x; z) = (lam/2)||x - z||^2`` with
    ``z ~ N(x*, sigma^2/(lam^2 d) I)``; needs ``A = lam I``.
    """

    def __init__(self, A, x_star, sigma, noise, x0, R):
        d = A.shape[0]
        self.A = A
        self.x_star = x_star
        self.sigma = float(sigma)
        self.noise = noise
        evals = np.linalg.eigvalsh(A)
        H, lam = float(evals[-1]), max(float(evals[0]), 0.0)
        if noise == "component":
            self.offset = self.sigma**2 / (2 * lam)
            self._z_scale = self.sigma / (lam * math.sqrt(d))
        elif noise == "additive":
            self.offset = 0.0
            self._z_scale = self.sigma / math.sqrt(d)
        else:
            raise ValueError(f"unknown noise model {noise!r}")
        self.component_H = H
        self.component_lam = lam
        self.lam_iso = lam
        r0 = x0 - x_star
        info = FunctionClassInfo(H=H, lam=lam, x0=x0, R=R, Delta=0.5 * float(r0 @ A @ r0))
        self.population = Objective(self._F, self._gradF, info,
                                    exact_minimizer=lambda: self.x_star.copy(), name="quadratic")
        self.f_star = self.offset

    def _F(self, x):
        r = x - self.x_star
        return 0.5 * float(r @ self.A @ r) + self.offset

    def _gradF(self, x):
        return self.A @ (x - self.x_star)

    def sample(self, rng, size):
        Z = self._z_scale * rng.standard_normal((size, self.dim))
        if self.noise == "component":
            Z += self.x_star
        return Z

    def component_value(self, x, z):
        if self.noise == "component":
            r = x - z
            return 0.5 * self.lam_iso * float(r @ r)
        return self._F(x) + float(z @ x)

    def component_gradient(self, x, z):
        if self.noise == "component":
            return self.lam_iso * (x - z)
        return self.A @ (x - self.x_star) + z

    def mean_value(self, x, Z):
        if self.noise == "component":
            R = x - Z
            return 0.5 * self.lam_iso * float(np.mean(np.einsum("ij,ij->i", R, R)))
        return self._F(x) + float(Z.mean(axis=0) @ x)

    def mean_gradient(self, x, Z):
        if self.noise == "component":
            return self.lam_iso * (x - Z.mean(axis=0))
        return self.A @ (x - self.x_star) + Z.mean(axis=0)


@dataclass
class QuadraticInstance:
    A: np.ndarray
    b: np.ndarray
    model: QuadraticModel
    descriptor: dict

    @property
    def objective(self) -> Objective:
        return self.model.population

    @property
    def x_star(self):
        return self.model.x_star

    @property
    def x0(self):
        return self.model.population.info.x0


def make_quadratic(d, H, lam, R, sigma=0.0, seed=0, noise="additive") -> QuadraticInstance:
    """Random rotated quadratic whose spectrum spans ``[lam, H]``.

    ``x0 = 0`` and ``x*`` is a random point at distance ``R`` from it.
    """
    d = int(d)
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if not (0 <= lam <= H) or H <= 0:
        raise ValueError(f"need 0 <= lam <= H and H > 0, got lam={lam}, H={H}")
    if d == 1 and lam != H:
        raise ValueError("a 1-D quadratic has a single curvature: need lam == H")
    if noise == "component" and lam != H:
        raise ValueError("component noise needs an isotropic quadratic (lam == H)")
    if noise == "component" and lam == 0:
        raise ValueError("component noise needs lam > 0")
    if R < 0 or sigma < 0:
        raise ValueError("R and sigma must be nonnegative")
    rng = _instance_rng(seed, 0)
    evals = np.linspace(lam, H, d)
    Q = _random_orthogonal(rng, d)
    A = (Q * evals) @ Q.T
    A = 0.5 * (A + A.T)
    u = rng.standard_normal(d)
    u /= np.linalg.norm(u)
    x_star = R * u
    x0 = np.zeros(d)
    model = QuadraticModel(A, x_star, sigma, noise, x0, R)
    # pin the declared constants to the requested spectrum
    model.component_H, model.component_lam = float(H), float(lam)
    model.lam_iso = float(lam)
    info = model.population.info
    model.population.info = FunctionClassInfo(H=float(H), lam=float(lam), x0=x0, R=float(R),
                                              Delta=info.Delta)
    desc = {"name": "quadratic", "params": {"d": d, "H": H, "lambda": lam, "R": R,
                                            "sigma": sigma, "noise": noise}, "seed": seed}
    return QuadraticInstance(A=A, b=A @ x_star, model=model, descriptor=desc)


# -- logistic regression over a finite data set -----------------------------

class LogisticModel(StochasticModel):
    """``f(x; i) = log(1 + exp(-y_i <a_i, x>)) + (reg/2)||x||^2`` with ``i`` uniform."""

    def __init__(self, A, y, reg):
        self.Adata = A
        self.y = y
        self.reg = float(reg)
        n, d = A.shape
        H = float(np.linalg.eigvalsh(A.T @ A / n)[-1]) / 4 + self.reg
        self.component_H = float(np.max(np.einsum("ij,ij->i", A, A))) / 4 + self.reg
        self.component_lam = self.reg
        # |d/du log(1+e^-u)| <= 1, so the per-sample gradient spread is at most ||a_i||
        self.sigma = math.sqrt(float(np.mean(np.einsum("ij,ij->i", A, A))))
        x0 = np.zeros(d)
        self._x_star = self._newton(x0)
        info = FunctionClassInfo(H=H, lam=self.reg, x0=x0,
                                 R=float(np.linalg.norm(self._x_star)),
                                 Delta=self._F(x0) - self._F(self._x_star))
        self.population = Objective(self._F, self._gradF, info,
                                    exact_minimizer=lambda: self._x_star.copy(), name="logistic")
        self.f_star = self._F(self._x_star)

    @staticmethod
    def _loss(u):
        return np.logaddexp(0.0, -u)

    @staticmethod
    def _dloss(u):
        # derivative of log(1+exp(-u)) is -1/(1+exp(u))
        return -0.5 * (1 - np.tanh(0.5 * u))

    def _F(self, x):
        u = self.y * (self.Adata @ x)
        return float(np.mean(self._loss(u))) + 0.5 * self.reg * float(x @ x)

    def _gradF(self, x):
        return self.mean_gradient(x, None)

    def _newton(self, x):
        n = len(self.y)
        for _ in range(100):
            u = self.y * (self.Adata @ x)
            g = self.mean_gradient(x, None)
            if np.linalg.norm(g) < 1e-14:
                break
            s = 0.25 * (1 - np.tanh(0.5 * u) ** 2)
            Hm = (self.Adata.T * s) @ self.Adata / n + self.reg * np.eye(len(x))
            x = x - np.linalg.solve(Hm, g)
        return x

    def sample(self, rng, size):
        return rng.integers(0, len(self.y), size=size)

    def component_value(self, x, i):
        return float(self._loss(self.y[i] * (self.Adata[i] @ x))) + 0.5 * self.reg * float(x @ x)

    def component_gradient(self, x, i):
        a = self.Adata[i]
        return self._dloss(self.y[i] * (a @ x)) * self.y[i] * a + self.reg * x

    def mean_value(self, x, Z):
        idx = slice(None) if Z is None else Z
        u = self.y[idx] * (self.Adata[idx] @ x)
        return float(np.mean(self._loss(u))) + 0.5 * self.reg * float(x @ x)

    def mean_gradient(self, x, Z):
        idx = slice(None) if Z is None else Z
        A, y = self.Adata[idx], self.y[idx]
        w = self._dloss(y * (A @ x)) * y
        return A.T @ w / len(y) + self.reg * x


@dataclass
class LogisticInstance:
    model: LogisticModel
    descriptor: dict

    @property
    def objective(self):
        return self.model.population


def make_logistic(n=200, d=5, reg=0.1, seed=0) -> LogisticInstance:
    if n < 1 or d < 1 or reg < 0:
        raise ValueError("need n >= 1, d >= 1, reg >= 0")
    rng = _instance_rng(seed, 1)
    A = rng.standard_normal((n, d))
    w = rng.standard_normal(d)
    p = 1 / (1 + np.exp(-A @ w))
    y = np.where(rng.random(n) < p, 1.0, -1.0)
    model = LogisticModel(A, y, reg)
    desc = {"name": "logistic", "params": {"n": n, "d": d, "reg": reg}, "seed": seed}
    return LogisticInstance(model=model, descriptor=desc)


# -- statistical lower-bound instance ---------------------------------------

class StatLBModel(StochasticModel):
    """``f(x; z) = sigma <x, z> + (b/2)||x||^2``, ``z`` uniform over orthonormal ``z_i``."""

    def __init__(self, Z, sigma, b):
        self.Zmat = Z  # columns are the z_i
        self.sigma_coef = float(sigma)
        self.b = float(b)
        d, m = Z.shape
        self.zbar = Z.mean(axis=1)
        self.sigma = self.sigma_coef * math.sqrt(1 - 1 / m)  # exact gradient spread
        self.component_H = self.b
        self.component_lam = self.b
        self.x_star = -(self.sigma_coef / self.b) * self.zbar
        x0 = np.zeros(d)
        info = FunctionClassInfo(H=self.b, lam=self.b, x0=x0,
                                 R=float(np.linalg.norm(self.x_star)),
                                 Delta=self.sigma_coef**2 / (2 * self.b * m))
        self.population = Objective(self._F, self._gradF, info,
                                    exact_minimizer=lambda: self.x_star.copy(), name="stat_lb")

    def _F(self, x):
        return self.sigma_coef * float(x @ self.zbar) + 0.5 * self.b * float(x @ x)

    def _gradF(self, x):
        return self.sigma_coef * self.zbar + self.b * x

    def sample(self, rng, size):
        return rng.integers(0, self.Zmat.shape[1], size=size)

    def component_value(self, x, i):
        return self.sigma_coef * float(x @ self.Zmat[:, i]) + 0.5 * self.b * float(x @ x)

    def component_gradient(self, x, i):
        return self.sigma_coef * self.Zmat[:, i] + self.b * x

    def mean_value(self, x, Z):
        return self.sigma_coef * float(x @ self.Zmat[:, Z].mean(axis=1)) + 0.5 * self.b * float(x @ x)

    def mean_gradient(self, x, Z):
        return self.sigma_coef * self.Zmat[:, Z].mean(axis=1) + self.b * x


@dataclass
class StatLBInstance:
    m_hard: int
    sigma: float
    b_coef: float
    Z: np.ndarray  # (d, m_hard), orthonormal columns
    model: StatLBModel
    descriptor: dict

    @property
    def d(self) -> int:
        return self.Z.shape[0]

    @property
    def objective(self):
        return self.model.population

    @property
    def x_star(self):
        return self.model.x_star


def stat_lb_dimension(m_hard: int) -> int:
    return math.ceil(m_hard / 2 + 512 * m_hard * math.log(2 * m_hard))


def make_stat_lb(sigma, R=None, Delta=None, m_hard=16, seed=0, d=None,
                 d_max=400_000) -> StatLBInstance:
    """Hard instance for sample complexity.

    ``b = max(sigma/(R sqrt(m)), sigma^2/(2 Delta m))``; ``None`` (or ``inf``)
    for a bound drops its branch.  ``d`` defaults to the dimension needed by
    the lower-bound argument; pass a smaller ``d >= m_hard`` for cheap tests.
    """
    m = int(m_hard)
    if m < 2:
        raise ValueError("m_hard must be at least 2")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    branches = []
    if R is not None and math.isfinite(R):
        if R <= 0:
            raise ValueError("R must be positive")
        branches.append(sigma / (R * math.sqrt(m)))
    if Delta is not None and math.isfinite(Delta):
        if Delta <= 0:
            raise ValueError("Delta must be positive")
        branches.append(sigma**2 / (2 * Delta * m))
    if not branches:
        raise ValueError("need a finite R or Delta")
    b = max(branches)
    if d is None:
        d = stat_lb_dimension(m)
    d = int(d)
    if d < m:
        raise ValueError(f"need d >= m_hard for an orthonormal set, got d={d}")
    if d > d_max:
        raise MemoryError(f"dimension {d} for m_hard={m} exceeds the cap d_max={d_max}")
    rng = _instance_rng(seed, 2)
    Q, _ = np.linalg.qr(rng.standard_normal((d, m)))
    model = StatLBModel(Q, sigma, b)
    desc = {"name": "stat_lb", "params": {"sigma": sigma, "R": R, "Delta": Delta,
                                          "m_hard": m, "d": d}, "seed": seed}
    return StatLBInstance(m_hard=m, sigma=float(sigma), b_coef=b, Z=Q, model=model,
                          descriptor=desc)


@dataclass
class Witness:
    grad_norm: np.ndarray
    condition: np.ndarray
    bound: float


class WitnessViolation(AssertionError):
    pass


def hardness_witness(inst: StatLBInstance, x):
    """``||grad F(x)||`` and whether ``x`` meets the inner-product condition.

    The condition is ``<x, z_i> >= -sigma/(8 b m)`` for every 1-based index
    ``i >= m/2``; whenever it holds the gradient norm is at least
    ``sigma/(2 sqrt(m))``, and a :class:`WitnessViolation` is raised otherwise.
    ``x`` may be a single point or an ``(n, d)`` batch.
    """
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != inst.d or not np.all(np.isfinite(X)):
        raise ValueError("probe points must be finite with dimension d")
    m, s, b = inst.m_hard, inst.sigma, inst.b_coef
    G = s * inst.model.zbar + b * X
    gn = np.linalg.norm(G, axis=1)
    first = math.ceil(m / 2) - 1  # 0-based position of i = ceil(m/2)
    ips = X @ inst.Z[:, first:]
    cond = np.all(ips >= -s / (8 * b * m), axis=1)
    bound = s / (2 * math.sqrt(m))
    bad = cond & (gn < bound)
    if np.any(bad):
        raise WitnessViolation(f"gradient norm {gn[bad].min()} below {bound} under the condition")
    if single:
        return Witness(float(gn[0]), bool(cond[0]), bound)
    return Witness(gn, cond, bound)


def component_gradient_variance(inst: StatLBInstance) -> float:
    """``(1/m) sum_i ||sigma z_i - sigma zbar||^2`` computed from ``Z``."""
    D = inst.sigma * (inst.Z - inst.model.zbar[:, None])
    return float(np.mean(np.einsum("ij,ij->j", D, D)))


# -- noisy binary search instance ------------------------------------------

_M64 = np.uint64(0xFFFFFFFFFFFFFFFF)


def _splitmix(x):
    x = np.asarray(x, dtype=np.uint64)
    with np.errstate(over="ignore"):
        x = x + np.uint64(0x9E3779B97F4A7C15)
        x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


_MASK = (1 << 64) - 1


def _splitmix_int(x: int) -> int:
    """Scalar twin of :func:`_splitmix` on Python ints."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


class NBSModel(StochasticModel):
    """1-D stochastic derivative built from a fixed random sign matrix ``Z``.

    A draw is a row key ``t``; entry ``Z[t, j]`` is a pure function of
    ``(seed, t, j)``, so repeated reads of the same entry agree.
    """

    components_convex = False

    def __init__(self, N, R, eps, sigma, j_star, seed):
        self.N, self.R, self.eps, self.sig = int(N), float(R), float(eps), float(sigma)
        self.p = self.eps / self.sig
        self.j_star = int(j_star)
        self.width = self.R / self.N
        self.H_eff = 4 * self.eps / self.width
        self._key = _splitmix(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
        self._key_int = int(self._key)
        self.sigma = self.sig  # |f'| <= sigma bounds the spread
        self.component_H = self.sig / self.width
        self.component_lam = 0.0
        # expected node values of the derivative, j = 1..N+1 (index 0 unused)
        j = np.arange(self.N + 2)
        self._mean_nodes = np.where(j <= self.j_star, -2 * self.eps, 2 * self.eps).astype(float)
        self.x_star = np.array([(self.j_star - 1) * self.width + self.width / 2])
        delta = self._F(np.zeros(1)) - self._F(self.x_star)
        info = FunctionClassInfo(H=self.H_eff, lam=0.0, x0=np.zeros(1), R=self.R, Delta=delta)
        self.population = Objective(self._F, self._gradF, info,
                                    exact_minimizer=lambda: self.x_star.copy(), name="nbs")

    def a(self, j):
        """Left endpoint of interval ``j`` (1-based)."""
        return (np.asarray(j) - 1) * self.width

    def entries(self, rows, j):
        """``Z[rows, j]`` in ``{-1, +1}``; ``j`` may run up to ``N + 1``."""
        rows = np.asarray(rows, dtype=np.uint64)
        j = np.asarray(j)
        h = _splitmix(_splitmix(self._key ^ rows) ^ j.astype(np.uint64))
        u = (h >> np.uint64(11)).astype(np.float64) * 2.0**-53
        p_plus = np.where(j <= self.j_star, 0.5 - self.p, 0.5 + self.p)
        return np.where(u < p_plus, 1.0, -1.0)

    def entry(self, row: int, j: int) -> float:
        """Scalar ``Z[row, j]``; agrees bit for bit with :meth:`entries`."""
        h = _splitmix_int(_splitmix_int(self._key_int ^ int(row)) ^ int(j))
        u = (h >> 11) * 2.0**-53
        p_plus = 0.5 - self.p if j <= self.j_star else 0.5 + self.p
        return 1.0 if u < p_plus else -1.0

    def _locate(self, x):
        j = np.floor(x / self.width).astype(np.int64) + 1
        return np.clip(j, 1, self.N)

    def derivative(self, x, rows):
        """Stochastic derivative ``f'(x, Z_t)`` for each row key in ``rows``."""
        x = float(x)
        if x < 0:
            return np.full(np.shape(rows), -2 * self.eps)
        if x >= self.R:
            return np.full(np.shape(rows), 2 * self.eps)
        j = int(self._locate(x))
        s = (x - (j - 1) * self.width) / self.width
        return s * self.sig * self.entries(rows, j + 1) + (1 - s) * self.sig * self.entries(rows, j)

    def mean_derivative(self, x):
        """Closed-form ``E f'(x, Z_t)``: -2eps, ramp of slope H, +2eps."""
        x = float(x)
        if x < 0:
            return -2 * self.eps
        if x >= self.R:
            return 2 * self.eps
        j = int(self._locate(x))
        s = (x - (j - 1) * self.width) / self.width
        return s * self._mean_nodes[j + 1] + (1 - s) * self._mean_nodes[j]

    def _integral(self, x, nodes):
        # f(0) = 0; integrate the piecewise-linear derivative with node values
        x = float(x)
        w = self.width
        if x < 0:
            return -2 * self.eps * x
        xr = min(x, self.R)
        j = int(self._locate(xr)) if xr < self.R else self.N + 1
        full = nodes[1:j]
        total = w * float(np.sum(0.5 * (full[:-1] + full[1:]))) if j > 1 else 0.0
        if j <= self.N:
            s = (xr - (j - 1) * w) / w
            total += w * (s * nodes[j] + 0.5 * s * s * (nodes[j + 1] - nodes[j]))
        if x >= self.R:
            total += 2 * self.eps * (x - self.R)
        return total

    def _F(self, x):
        return self._integral(x[0], self._mean_nodes)

    def _gradF(self, x):
        return np.array([self.mean_derivative(x[0])])

    def sample(self, rng, size):
        return rng.integers(0, 2**63, size=size, dtype=np.uint64)

    def component_value(self, x, t):
        nodes = np.empty(self.N + 2)
        nodes[1:] = self.sig * self.entries(np.full(self.N + 1, t, dtype=np.uint64),
                                            np.arange(1, self.N + 2))
        return self._integral(x[0], nodes)

    def component_gradient(self, x, t):
        x = float(x[0])
        if x < 0:
            return np.array([-2 * self.eps])
        if x >= self.R:
            return np.array([2 * self.eps])
        j = min(int(x / self.width) + 1, self.N)
        s = (x - (j - 1) * self.width) / self.width
        return np.array([s * self.sig * self.entry(t, j + 1) + (1 - s) * self.sig * self.entry(t, j)])

    def component_gradients(self, x, Z):
        return self.derivative(x[0], Z)[:, None]

    def mean_gradient(self, x, Z):
        return np.array([float(np.mean(self.derivative(x[0], Z)))])


@dataclass
class NBSInstance:
    N: int
    p: float
    j_star: int
    model: NBSModel
    descriptor: dict

    @property
    def objective(self):
        return self.model.population

    @property
    def endpoints(self):
        """``a_j`` for ``j = 1..N+1`` (the last one is ``R``)."""
        return self.model.a(np.arange(1, self.N + 2))

    def interval_index(self, x) -> int:
        """1-based interval containing ``x``, clamped to ``[1, N]``."""
        return int(self.model._locate(float(np.asarray(x).reshape(-1)[0])))


def make_nbs(H, R, eps, sigma, seed=0) -> NBSInstance:
    if not (H > 0 and R > 0 and eps > 0 and sigma > 0):
        raise ValueError("H, R, eps, sigma must be positive")
    if not eps < sigma / 2:
        raise ValueError("need eps < sigma/2")
    if H * R / (4 * eps) < 1:
        raise ValueError("need HR/(4 eps) >= 1")
    N = max(1, int(round(H * R / (4 * eps))))
    rng = _instance_rng(seed, 3)
    j_star = int(rng.integers(1, N + 1))
    model = NBSModel(N, R, eps, sigma, j_star, seed)
    desc = {"name": "nbs", "params": {"H": H, "R": R, "eps": eps, "sigma": sigma}, "seed": seed}
    return NBSInstance(N=N, p=eps / sigma, j_star=j_star, model=model, descriptor=desc)


# -- one-dimensional piecewise-linear functions -----------------------------

@dataclass
class OneDimPiecewise:
    """Convex piecewise-linear ``F: R -> R``.

    ``slopes[0]`` applies left of ``breakpoints[0]`` and ``slopes[i]`` on
    ``(breakpoints[i-1], breakpoints[i])``; ``value_at_first`` anchors values.
    """

    breakpoints: np.ndarray
    slopes: np.ndarray
    value_at_first: float = 0.0
    sigma: Optional[float] = None

    def __post_init__(self):
        self.breakpoints = np.asarray(self.breakpoints, dtype=float)
        self.slopes = np.asarray(self.slopes, dtype=float)
        if len(self.slopes) != len(self.breakpoints) + 1:
            raise ValueError("need one more slope than breakpoints")
        if np.any(np.diff(self.breakpoints) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if np.any(np.diff(self.slopes) < -1e-12):
            raise ValueError("slopes must be nondecreasing (convexity)")

    @property
    def L(self) -> float:
        return float(np.max(np.abs(self.slopes)))

    @property
    def bounded_below(self) -> bool:
        return self.slopes[0] <= 0 <= self.slopes[-1]

    def value(self, x) -> float:
        x = float(x)
        bp, s = self.breakpoints, self.slopes
        if len(bp) == 0:
            return self.value_at_first + s[0] * x
        v = self.value_at_first
        if x <= bp[0]:
            return v + s[0] * (x - bp[0])
        for i in range(1, len(bp) + 1):
            right = bp[i] if i < len(bp) else np.inf
            v_seg_end = v + s[i] * (min(x, right) - bp[i - 1])
            if x <= right:
                return v_seg_end
            v = v_seg_end
        return v

    def subdifferential(self, x):
        x = float(x)
        k = int(np.searchsorted(self.breakpoints, x, side="left"))
        if k < len(self.breakpoints) and self.breakpoints[k] == x:
            return float(self.slopes[k]), float(self.slopes[k + 1])
        return float(self.slopes[k]), float(self.slopes[k])

    def inf_subgradient(self, x) -> float:
        lo, hi = self.subdifferential(x)
        if lo <= 0 <= hi:
            return 0.0
        return min(abs(lo), abs(hi))


def stationary_interval(inst: OneDimPiecewise, eps):
    """Exact ``[a, b] = {x : inf_{g in dF(x)} |g| <= eps}``.

    Endpoints can be ``-inf``/``inf`` when a tail slope is already within
    ``eps`` of zero.
    """
    if not inst.bounded_below:
        raise ValueError("function is not bounded below")
    bp, s = inst.breakpoints, inst.slopes
    if s[0] >= -eps:
        a = -np.inf
    else:
        # first breakpoint whose right slope reaches -eps
        idx = np.flatnonzero(s[1:] >= -eps)
        assert idx.size, "empty stationary set for a bounded-below function"
        a = float(bp[idx[0]])
    if s[-1] <= eps:
        b = np.inf
    else:
        idx = np.flatnonzero(s[:-1] <= eps)
        assert idx.size, "empty stationary set for a bounded-below function"
        b = float(bp[idx[-1]])
    return a, b


class AbsModel(StochasticModel):
    """``f(x; z) = |x - z|`` with ``z`` drawn from a finite support."""

    components_convex = True

    def __init__(self, support, probs=None):
        support = np.asarray(support, dtype=float)
        order = np.argsort(support)
        self.support = support[order]
        if probs is None:
            probs = np.full(len(support), 1 / len(support))
        self.probs = np.asarray(probs, dtype=float)[order]
        if np.any(self.probs < 0) or not math.isclose(self.probs.sum(), 1.0):
            raise ValueError("probabilities must be nonnegative and sum to one")
        cum = np.concatenate([[0.0], np.cumsum(self.probs)])
        slopes = cum - (1 - cum)
        self.piecewise = OneDimPiecewise(self.support, slopes,
                                         value_at_first=self._F1(self.support[0]))
        # Var of sign(x - z) is 1 - F'(x)^2
        self.sigma = math.sqrt(float(np.max(1 - slopes**2)))
        self.piecewise.sigma = self.sigma
        self.component_H = np.inf
        self.component_lam = 0.0
        mid = 0.5 * (self.support[0] + self.support[-1])
        info = FunctionClassInfo(H=np.inf, lam=0.0, x0=np.array([mid]))
        self.population = Objective(lambda x: self._F1(x[0]),
                                    lambda x: np.array([self._min_subgrad(x[0])]),
                                    info, name="abs1d")

    def _F1(self, x):
        return float(self.probs @ np.abs(x - self.support))

    def _min_subgrad(self, x):
        lo, hi = self.piecewise.subdifferential(x)
        if lo <= 0 <= hi:
            return 0.0
        return lo if abs(lo) < abs(hi) else hi

    @property
    def L(self):
        return 1.0

    def sample(self, rng, size):
        return rng.choice(self.support, size=size, p=self.probs)

    def component_value(self, x, z):
        return abs(float(x[0]) - float(z))

    def component_gradient(self, x, z):
        return np.array([float(np.sign(x[0] - z))])

    def mean_value(self, x, Z):
        return float(np.mean(np.abs(x[0] - np.asarray(Z))))

    def mean_gradient(self, x, Z):
        return np.array([float(np.mean(np.sign(x[0] - np.asarray(Z))))])

    # one-sided derivatives of the empirical average over the draws Z
    def left_derivative(self, x, Z):
        return float(np.mean(np.where(x <= np.asarray(Z), -1.0, 1.0)))

    def right_derivative(self, x, Z):
        return float(np.mean(np.where(x >= np.asarray(Z), 1.0, -1.0)))

    def breakpoints(self, Z):
        return np.unique(np.asarray(Z, dtype=float))


@dataclass
class AbsInstance:
    model: AbsModel
    descriptor: dict

    @property
    def objective(self):
        return self.model.population

    @property
    def piecewise(self) -> OneDimPiecewise:
        return self.model.piecewise


def make_abs1d(support=(-1.0, 1.0), probs=None, shift=0.0, seed=0) -> AbsInstance:
    sup = [float(s) + shift for s in support]
    model = AbsModel(sup, probs)
    desc = {"name": "abs1d", "params": {"support": list(support),
                                        "probs": None if probs is None else list(probs),
                                        "shift": shift}, "seed": seed}
    return AbsInstance(model=model, descriptor=desc)


# -- descriptors -----------------------------------------------------------

def build_instance(descriptor: dict):
    """Rebuild an instance from ``{"name", "params", "seed"}``."""
    name = descriptor["name"]
    params = dict(descriptor.get("params", {}))
    seed = descriptor.get("seed", 0)
    if name == "quadratic":
        lam = params.pop("lambda", params.pop("lam", 0.0))
        return make_quadratic(lam=lam, seed=seed, **params)
    if name == "logistic":
        return make_logistic(seed=seed, **params)
    if name == "stat_lb":
        return make_stat_lb(seed=seed, **params)
    if name == "nbs":
        return make_nbs(seed=seed, **params)
    if name == "abs1d":
        return make_abs1d(seed=seed, **params)
    raise ValueError(f"unknown instance {name!r}")


def descriptor_json(inst) -> str:
    return json.dumps(inst.descriptor, sort_keys=True)
