"""Regularized empirical risk minimization.

The empirical objective is minimized with accelerated full-gradient descent
using a gradient-based momentum restart, stopping once the empirical gradient
norm drops below ``tol``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core import Vector, as_vector
from ..oracles import Component, ComponentBatch, prox_gradient, prox_value


class ERMConvergenceError(RuntimeError):
    def __init__(self, message, grad_norm):
        super().__init__(message)
        self.grad_norm = grad_norm


@dataclass
class ERMResult:
    x_hat: Vector
    empirical_grad_norm: float
    samples_used: int
    iterations: int = 0


class EmpiricalObjective:
    """``(1/n) sum_i f_i(x) + sum_k (mu_k/2)||x - c_k||^2``.

    Batches drawn from a single model use the model's vectorised averages;
    arbitrary objective lists fall back to a Python loop.
    """

    def __init__(self, components, prox=()):
        self.prox = tuple(prox)
        self.n = len(components)
        if self.n == 0:
            raise ValueError("empirical objective needs at least one component")
        batch = _as_batch(components)
        if batch is not None:
            self.model, self.Z = batch.model, batch.Z
            self.prox = batch.prox + self.prox
            self.components = None
            self.L = batch.model.component_H
            self.convex = batch.model.components_convex
        else:
            self.model = None
            self.components = list(components)
            self.L = max(c.info.H for c in self.components)
            self.convex = all(getattr(getattr(c, "model", None), "components_convex", True)
                              for c in self.components)
        self.L += sum(mu for mu, _ in self.prox)

    def value(self, x):
        if self.model is not None:
            v = self.model.mean_value(x, self.Z)
        else:
            v = float(np.mean([c._value(x) for c in self.components]))
        return v + prox_value(self.prox, x)

    def gradient(self, x):
        if self.model is not None:
            g = self.model.mean_gradient(x, self.Z)
        else:
            g = np.mean([c._gradient(x) for c in self.components], axis=0)
        return g + prox_gradient(self.prox, x)


def _as_batch(components) -> Optional[ComponentBatch]:
    if isinstance(components, ComponentBatch):
        return components
    items = list(components)
    if items and all(isinstance(c, Component) for c in items):
        first = items[0]
        if all(c.model is first.model and c.prox == first.prox for c in items):
            return ComponentBatch(first.model, np.array([c.z for c in items]), first.prox)
    return None


def accelerated_descent(grad, x0, L, mu, tol, max_iter=100_000):
    """Nesterov's method with gradient restart; returns ``(x, ||grad||, iters)``."""
    if not (L > 0 and math.isfinite(L)):
        raise ValueError(f"accelerated descent needs a finite smoothness constant, got {L}")
    x = x0.copy()
    g = grad(x)
    gn = float(np.linalg.norm(g))
    if gn <= tol:
        return x, gn, 0
    if mu > 0:
        q = math.sqrt(min(mu / L, 1.0))
        beta_sc = (1 - q) / (1 + q)
    y = x
    k = 0
    for it in range(1, max_iter + 1):
        gy = g if y is x else grad(y)
        x_new = y - gy / L
        g = grad(x_new)
        gn = float(np.linalg.norm(g))
        if gn <= tol:
            return x_new, gn, it
        if float(gy @ (x_new - x)) > 0:
            # momentum is pointing uphill: restart
            k = 0
            y = x_new
        else:
            k += 1
            beta = beta_sc if mu > 0 else k / (k + 3)
            y = x_new + beta * (x_new - x)
        x = x_new
    raise ERMConvergenceError(f"no convergence in {max_iter} iterations (grad norm {gn:.3e})", gn)


def erm_solve(components, lambda_sc: float, x_init, tol: float = 1e-10,
              prox=(), max_iter: int = 100_000) -> ERMResult:
    """Minimize the empirical average of ``components`` plus ``prox`` terms.

    Parameters
    ----------
    components : ComponentBatch or sequence of Objective
        Convex component functions.
    lambda_sc : float
        Strong-convexity modulus of the full empirical objective.
    x_init : array_like
        Starting point of the inner solver.
    tol : float
        Target empirical gradient norm.
    prox : sequence of (mu, center)
        Extra ``(mu/2)||x - center||^2`` terms added outside the average.
    """
    emp = EmpiricalObjective(components, prox)
    if not emp.convex:
        raise ValueError("ERM requires convex components")
    x0 = as_vector(x_init, name="x_init")
    x, gn, iters = accelerated_descent(emp.gradient, x0, emp.L, lambda_sc, tol, max_iter)
    return ERMResult(x_hat=x, empirical_grad_norm=gn, samples_used=emp.n, iterations=iters)


def default_erm_tol(eps: float, T: int, lam: float, H: float) -> float:
    """``min(eps/(100 2^T), lam eps/(100 H))``."""
    return min(eps / (100 * 2**T), lam * eps / (100 * H))
