"""Damped Gauss-Newton (Levenberg-Marquardt) for batches of holomorphic systems.

The system is F: C^g -> C^m with complex Jacobian J.  Because F is
holomorphic, minimising |F|^2 with the complex normal equations
(J^H J + mu I) d = -J^H F is the same as the real Gauss-Newton step on the
2g real unknowns.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import SolverBudgetExceeded


@dataclass(frozen=True)
class SolverConfig:
    max_iter: int = 100
    step_tol: float = 1e-12
    damping: float = 1e-3
    max_damping: float = 1e10
    dedup_radius: float = 1e-6
    eps_rank: float = 1e-8
    u_floor: float = 1e-4
    max_seeds: int = 4096


@dataclass
class BatchResult:
    Z: np.ndarray
    residual: np.ndarray
    iterations: np.ndarray
    exhausted: np.ndarray


SystemFn = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


def levenberg_marquardt(fun: SystemFn, Z0: np.ndarray, config: SolverConfig = SolverConfig(),
                        tol: float = 1e-10) -> BatchResult:
    """Run LM independently on each row of Z0.

    ``fun(Z)`` returns F with shape (N, m) and J with shape (N, m, g).  A row
    stops when its step drops below ``step_tol``, its residual drops below
    ``tol * 1e-4``, or its damping blows up (a local minimum that is not a
    root).  Rows that run out of iterations are marked ``exhausted``.
    """
    with np.errstate(all="ignore"):
        return _lm(fun, Z0, config, tol)


def _lm(fun: SystemFn, Z0: np.ndarray, config: SolverConfig, tol: float) -> BatchResult:
    Z = np.array(Z0, dtype=complex, copy=True)
    N, g = Z.shape
    F, J = fun(Z)
    res = np.linalg.norm(F, axis=1)
    mu = np.full(N, config.damping)
    active = np.ones(N, dtype=bool)
    iters = np.zeros(N, dtype=int)
    eye = np.eye(g)
    for _ in range(config.max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        Ja = J[idx]
        JH = np.conj(np.transpose(Ja, (0, 2, 1)))
        H = JH @ Ja
        grad = (JH @ F[idx][:, :, None])[:, :, 0]
        scale = np.maximum(np.real(np.trace(H, axis1=1, axis2=2)) / g, 1e-300)
        lhs = H + (mu[idx] * scale)[:, None, None] * eye
        step = -np.linalg.solve(lhs, grad[:, :, None])[:, :, 0]
        step[~np.isfinite(step).all(axis=1)] = 0
        Zt = Z[idx] + step
        Ft, Jt = fun(Zt)
        rt = np.linalg.norm(Ft, axis=1)
        better = np.isfinite(rt) & (rt < res[idx])
        acc = idx[better]
        Z[acc] = Zt[better]
        F[acc] = Ft[better]
        J[acc] = Jt[better]
        res[acc] = rt[better]
        mu[acc] = np.maximum(mu[acc] / 3, 1e-12)
        mu[idx[~better]] *= 4
        iters[idx] += 1
        steplen = np.linalg.norm(step, axis=1)
        done = (steplen < config.step_tol) | (res[idx] < tol * 1e-4) | (mu[idx] > config.max_damping)
        active[idx[done]] = False
    return BatchResult(Z, res, iters, active.copy())


def newton_polish(fun1: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]], z: np.ndarray,
                  steps: int = 8, step_tol: float = 1e-14) -> tuple[np.ndarray, float]:
    """A few undamped least-squares Newton steps on a single point, keeping the best."""
    z = np.asarray(z, dtype=complex).copy()
    F, J = fun1(z)
    best = float(np.linalg.norm(F))
    for _ in range(steps):
        d = np.linalg.lstsq(J, -F, rcond=None)[0]
        zt = z + d
        Ft, Jt = fun1(zt)
        rt = float(np.linalg.norm(Ft))
        if not rt < best:
            break
        z, F, J, best = zt, Ft, Jt, rt
        if np.linalg.norm(d) < step_tol:
            break
    return z, best


def check_budget(result: BatchResult, tol: float) -> None:
    """Raise when every seed ran out of iterations without settling."""
    if result.exhausted.size and result.exhausted.all() and not (result.residual < tol).any():
        raise SolverBudgetExceeded("iteration cap reached on every seed")


def torus_coordinates(tau: np.ndarray, z: np.ndarray) -> np.ndarray:
    """(a, b) in [0,1)^2g with z = a + tau b modulo Z^g + tau Z^g."""
    z = np.atleast_2d(z)
    b = np.linalg.solve(tau.imag, z.imag.T).T
    a = z.real - b @ tau.real.T
    ab = np.concatenate([a, b], axis=1)
    return ab - np.floor(ab)


def torus_distance(u: np.ndarray, v: np.ndarray) -> float:
    d = np.abs(u - v) % 1.0
    return float(np.max(np.minimum(d, 1.0 - d)))


def dedup_on_torus(tau: np.ndarray, points: list[np.ndarray], radius: float) -> list[int]:
    """Indices of points kept after removing lattice-translates within ``radius``."""
    keep: list[int] = []
    coords = [torus_coordinates(tau, p)[0] for p in points]
    for i, c in enumerate(coords):
        if all(torus_distance(c, coords[j]) >= radius for j in keep):
            keep.append(i)
    return keep


def cell_grid(tau: np.ndarray, per_dim: int, offset: float = 0.0) -> np.ndarray:
    """Seeds a + tau b with a, b on a regular grid of the unit cube."""
    g = tau.shape[0]
    ticks = (np.arange(per_dim) + offset) / per_dim
    grid = np.stack(np.meshgrid(*([ticks] * (2 * g)), indexing="ij"), -1).reshape(-1, 2 * g)
    a, b = grid[:, :g], grid[:, g:]
    return a + b @ tau.T
