"""Singular points of theta divisors and their local invariants.

Functions here take a derivative oracle (a ``ThetaContext`` or a
``PolynomialOracle``) and a point, and work only with the derivative values at
that point.  Ranks are numerical: a singular value counts when it exceeds
``eps`` times the largest one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, NotSingular
from .solve import (
    SolverConfig,
    cell_grid,
    check_budget,
    dedup_on_torus,
    levenberg_marquardt,
    newton_polish,
    torus_coordinates,
)
from .theta import ThetaContext, gradient, hessian, multi_indices, unit_index

EPS_RANK = 1e-8


def numerical_rank(M: np.ndarray, eps: float = EPS_RANK) -> int:
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > eps * s[0]))


@dataclass
class Quadric:
    """Symmetric g x g matrix of second derivatives, possibly indeterminate."""

    g: int
    mat: np.ndarray
    scale: float
    indeterminate: bool

    def form(self, b) -> complex:
        b = np.asarray(b, dtype=complex)
        return complex(b @ self.mat @ b)


@dataclass
class QuadricSystem:
    """Linear system of quadrics spanned by the given symmetric matrices."""

    generators: list
    eps: float = EPS_RANK

    @staticmethod
    def coefficient_vector(Q: np.ndarray) -> np.ndarray:
        g = Q.shape[0]
        return np.array([Q[i, j] for i in range(g) for j in range(i, g)], dtype=complex)

    @property
    def dim_projective(self) -> int:
        if not self.generators:
            return -1
        rows = np.array([self.coefficient_vector(np.asarray(Q, dtype=complex)) for Q in self.generators])
        return numerical_rank(rows, self.eps) - 1


@dataclass
class SingularPointRecord:
    z: np.ndarray
    torus: np.ndarray
    order: int
    corank: int
    residual: float
    hessian: np.ndarray

    def to_json(self) -> dict:
        return {
            "z": [[float(c.real), float(c.imag)] for c in self.z],
            "order": self.order,
            "corank": self.corank,
            "residual": self.residual,
            "hessian": [[[float(c.real), float(c.imag)] for c in row] for row in self.hessian],
        }


@dataclass
class SmoothnessReport:
    matrix: np.ndarray
    rank: int
    smooth: bool
    corank: int
    kernel: np.ndarray
    quadric: Quadric
    conormal: QuadricSystem = field(repr=False)

    @property
    def attains_corank(self) -> bool:
        return self.conormal.dim_projective == self.corank

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "smooth": self.smooth,
            "corank": self.corank,
            "conormal_dim": self.conormal.dim_projective,
            "attains_corank": self.attains_corank,
            "quadric_indeterminate": self.quadric.indeterminate,
        }


# ---------------------------------------------------------------------------
# pointwise invariants


def _order_cap(oracle) -> int:
    return getattr(oracle, "order_cap", oracle.g + 1)


def singularity_order(oracle, z, rank_tol: float = EPS_RANK, max_order: int | None = None) -> int:
    """Multiplicity of the divisor {f = 0} at z, 0 when f(z) != 0.

    The order is the largest r for which every derivative of order < r is
    below ``rank_tol`` times the largest derivative of order exactly r.
    """
    cap = _order_cap(oracle) if max_order is None else max_order
    d = oracle.derivatives(z, cap)
    by_order = [max(abs(complex(d[I])) for I in multi_indices(oracle.g, k)) for k in range(cap + 1)]
    best = 0
    for r in range(1, cap + 1):
        lower = max(by_order[:r])
        top = by_order[r]
        if top > 0 and lower <= rank_tol * top:
            best = r
    return best


def hessian_quadric(oracle, z, eps: float = EPS_RANK) -> Quadric:
    g = oracle.g
    d = oracle.derivatives(z, 3)
    M = np.array([[complex(d[unit_index(g, i, j)]) for j in range(g)] for i in range(g)])
    scale = float(np.linalg.norm(M))
    ref = max(abs(complex(d[I])) for k in (2, 3) for I in multi_indices(g, k))
    indeterminate = ref == 0 or scale <= eps * ref
    return Quadric(g, M, scale, bool(indeterminate))


def corank_and_kernel(Q: Quadric, eps: float = EPS_RANK) -> tuple[int, np.ndarray]:
    """Corank of the quadric and a basis of its kernel (columns)."""
    if Q.indeterminate or Q.scale == 0:
        return Q.g, np.eye(Q.g, dtype=complex)
    _, s, Vh = np.linalg.svd(Q.mat)
    rank = int(np.sum(s > eps * s[0]))
    return Q.g - rank, np.conj(Vh[rank:]).T


def third_contraction(derivs: dict, g: int, b) -> np.ndarray:
    """d_b M: the matrix sum_k b_k d_i d_j d_k f."""
    b = np.asarray(b, dtype=complex)
    return np.array(
        [[sum(b[k] * complex(derivs[unit_index(g, i, j, k)]) for k in range(g)) for j in range(g)]
         for i in range(g)]
    )


def tangent_system_matrix(oracle, z) -> np.ndarray:
    """The (g+1) x (g(g+1)/2 + g) matrix of the tangent-space equations.

    Columns are the tau_ij directions (i <= j, lexicographic) followed by the
    z_k directions; row 0 is d/dtau of f, row k the derivatives of d_k f.
    """
    g = oracle.g
    d = oracle.derivatives(z, 3)
    pairs = [(i, j) for i in range(g) for j in range(i, g)]

    def heat(I, i, j):
        return complex(d[I]) / (2j * np.pi * (1 + (i == j)))

    rows = [[heat(unit_index(g, i, j), i, j) for i, j in pairs] + [0j] * g]
    for k in range(g):
        rows.append(
            [heat(unit_index(g, i, j, k), i, j) for i, j in pairs]
            + [complex(d[unit_index(g, k, l)]) for l in range(g)]
        )
    return np.array(rows)


def smoothness_report(oracle, z, eps: float = EPS_RANK) -> SmoothnessReport:
    """Is the locus of singular divisors smooth of codimension g+1 at (tau, z)?"""
    if singularity_order(oracle, z, eps) < 2:
        raise NotSingular("point is not a singular point of the divisor")
    g = oracle.g
    A = tangent_system_matrix(oracle, z)
    rk = numerical_rank(A, eps)
    Q = hessian_quadric(oracle, z, eps)
    corank, K = corank_and_kernel(Q, eps)
    d = oracle.derivatives(z, 3)
    gens = [] if Q.indeterminate else [Q.mat]
    gens += [third_contraction(d, g, K[:, c]) for c in range(K.shape[1])]
    return SmoothnessReport(A, rk, rk == g + 1, corank, K, Q, QuadricSystem(gens, eps))


# ---------------------------------------------------------------------------
# search over the fundamental cell


def _singular_system(ctx: ThetaContext):
    g = ctx.g

    def fun(Z):
        d = ctx.derivatives_batch(Z, 2)
        F = np.stack([d[(0,) * g]] + [d[unit_index(g, k)] for k in range(g)], axis=1)
        rows = [np.stack([d[unit_index(g, l)] for l in range(g)], axis=1)]
        for k in range(g):
            rows.append(np.stack([d[unit_index(g, k, l)] for l in range(g)], axis=1))
        return F, np.stack(rows, axis=1)

    def fun1(z):
        d = ctx.derivatives(z, 2)
        grad = gradient(d, g)
        F = np.concatenate([[d[(0,) * g]], grad])
        J = np.vstack([grad[None, :], hessian(d, g)])
        return F, J

    return fun, fun1


def find_singular_points(ctx: ThetaContext, grid_per_dim: int = 4, newton_tol: float = 1e-10,
                         config: SolverConfig = SolverConfig()) -> list[SingularPointRecord]:
    """Singular points of the theta divisor found from a grid of seeds in the cell."""
    g = ctx.g
    if g > 4:
        raise InvalidInput("search is supported for g <= 4")
    if grid_per_dim < 4:
        raise InvalidInput("grid_per_dim must be at least 4")
    fun, fun1 = _singular_system(ctx)
    seeds = cell_grid(ctx.tau, grid_per_dim)
    if len(seeds) > config.max_seeds:
        F0, _ = fun(seeds)
        best = np.argsort(np.linalg.norm(F0, axis=1), kind="stable")[: config.max_seeds]
        seeds = seeds[np.sort(best)]
    result = levenberg_marquardt(fun, seeds, config, newton_tol)
    check_budget(result, newton_tol)
    found = []
    for k in np.flatnonzero(result.residual < newton_tol * 100):
        z, res = newton_polish(fun1, result.Z[k])
        if res < newton_tol:
            found.append((z, res))
    found.sort(key=lambda zr: zr[1])
    keep = dedup_on_torus(ctx.tau, [z for z, _ in found], config.dedup_radius)
    records = []
    for i in keep:
        z, res = found[i]
        torus = torus_coordinates(ctx.tau, z)[0]
        z0 = torus[:g] + ctx.tau @ torus[g:]
        Q = hessian_quadric(ctx, z0, config.eps_rank)
        corank, _ = corank_and_kernel(Q, config.eps_rank)
        order = singularity_order(ctx, z0, config.eps_rank)
        records.append(SingularPointRecord(z0, torus, order, corank, res, Q.mat))
    records.sort(key=lambda r: tuple(np.round(r.torus, 8)))
    return records
