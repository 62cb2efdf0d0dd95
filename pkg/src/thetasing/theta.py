"""Riemann theta function with characteristic zero and its z-derivatives.

    theta(tau, z) = sum_{m in Z^g} exp(pi i m.tau.m + 2 pi i m.z)

A derivative d_I theta multiplies each term by (2 pi i)^|I| m^I.  The sum is
truncated to the lattice points m with (m + c).Y.(m + c) <= rho^2, where
Y = Im tau and c = Y^{-1} Im z is the centre of the Gaussian envelope; rho is
chosen so the neglected tail is below the requested absolute tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations_with_replacement

import numpy as np

from .errors import IndexOutOfRange, NotPositiveDefinite, NotSymmetric, OrderTooHigh

MAX_ORDER = 6
SYMMETRY_TOL = 1e-12


def multi_indices(g: int, order: int) -> list[tuple[int, ...]]:
    """All exponent vectors I in N^g with |I| = order, lexicographically descending."""
    out = []
    for combo in combinations_with_replacement(range(g), order):
        I = [0] * g
        for k in combo:
            I[k] += 1
        out.append(tuple(I))
    return out


def multi_indices_upto(g: int, order: int) -> list[tuple[int, ...]]:
    return [I for k in range(order + 1) for I in multi_indices(g, k)]


def index_factorial(I) -> int:
    out = 1
    for k in I:
        out *= math.factorial(k)
    return out


def add_index(I, *ks) -> tuple[int, ...]:
    J = list(I)
    for k in ks:
        J[k] += 1
    return tuple(J)


def unit_index(g: int, *ks) -> tuple[int, ...]:
    return add_index((0,) * g, *ks)


@dataclass(frozen=True)
class ReducedPoint:
    """z = z0 + m + tau n, and theta(z) = exp(log_prefactor) * theta(z0)."""

    z0: np.ndarray
    m: np.ndarray
    n: np.ndarray
    log_prefactor: complex


@dataclass(frozen=True, eq=False)
class ThetaContext:
    tau: np.ndarray
    tol: float = 1e-12
    cholesky_imtau: np.ndarray = field(default=None, repr=False)
    lambda_min: float = 0.0

    @property
    def g(self) -> int:
        return self.tau.shape[0]

    @cached_property
    def imtau_inv(self) -> np.ndarray:
        return np.linalg.inv(self.tau.imag)

    @property
    def order_cap(self) -> int:
        return self.g + 1

    # -- lattice -----------------------------------------------------------

    def _radius(self, centre: np.ndarray, order: int, tol: float) -> float:
        """Y-norm radius rho with a tail bound below ``tol``."""
        Y = self.tau.imag
        cnorm = float(np.linalg.norm(centre))
        envelope = float(np.pi * centre @ Y @ centre)
        R0 = math.sqrt(max(0.0, -math.log(tol) / (math.pi * self.lambda_min)))
        for _ in range(2):
            poly = 1.0 + (2 * math.pi * (R0 + cnorm)) ** order
            t = tol / (poly * math.exp(envelope))
            R0 = math.sqrt(max(0.0, -math.log(t) / (math.pi * self.lambda_min)))
        return math.sqrt(self.lambda_min) * (R0 + 1.0)

    def lattice(self, centres: np.ndarray, order: int, tol: float | None = None) -> np.ndarray:
        """Integer points within the truncation ellipsoid of any of the given centres.

        Points are sorted by increasing Euclidean norm, ties broken
        lexicographically, so summation order is deterministic.
        """
        tol = self.tol if tol is None else tol
        centres = np.atleast_2d(centres)
        Y = self.tau.imag
        rho = max(self._radius(c, order, tol) for c in (centres.min(0), centres.max(0)))
        half = rho * np.sqrt(np.diag(self.imtau_inv))
        lo = np.floor((-centres).min(0) - half).astype(int)
        hi = np.ceil((-centres).max(0) + half).astype(int)
        axes = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, self.g)
        # one ellipsoid around the middle centre, enlarged to cover all of them
        mid = (centres.min(0) + centres.max(0)) / 2
        off = centres - mid
        spread = float(np.sqrt(np.einsum("ki,ij,kj->k", off, Y, off).max()))
        x = pts + mid
        pts = pts[np.einsum("ki,ij,kj->k", x, Y, x) <= (rho + spread) ** 2]
        norms = np.einsum("ki,ki->k", pts, pts)
        order_idx = np.lexsort(tuple(pts[:, ::-1].T) + (norms,))
        return pts[order_idx]

    def _centre(self, z: np.ndarray) -> np.ndarray:
        return self.imtau_inv @ z.imag

    # -- evaluation ----------------------------------------------------------

    def derivatives(self, z, order: int) -> dict[tuple[int, ...], complex]:
        """All d_I theta(z) with |I| <= order, as a dict keyed by exponent vector."""
        return self.derivatives_for(z, multi_indices_upto(self.g, order))

    def derivatives_for(self, z, indices) -> dict[tuple[int, ...], complex]:
        z = self._point(z)
        indices = list(indices)
        order = max((sum(I) for I in indices), default=0)
        if order > MAX_ORDER:
            raise OrderTooHigh(f"derivative order {order} exceeds {MAX_ORDER}")
        m = self.lattice(self._centre(z), order)
        mf = m.astype(float)
        quad = np.einsum("ki,ij,kj->k", mf, self.tau, mf)
        w = np.exp(1j * np.pi * quad + 2j * np.pi * (mf @ z))
        out = {}
        for I in indices:
            mono = np.prod(mf ** np.array(I, dtype=float), axis=1) if any(I) else None
            terms = w if mono is None else w * mono
            s = complex(math.fsum(terms.real), math.fsum(terms.imag))
            out[tuple(I)] = s * (2j * np.pi) ** sum(I)
        return out

    def value(self, z) -> complex:
        return self.derivatives(z, 0)[(0,) * self.g]

    def derivatives_batch(self, Z, order: int) -> dict[tuple[int, ...], np.ndarray]:
        """Vectorised derivatives at the rows of Z (N x g), all |I| <= order.

        Uses one lattice covering every row, so the values agree with
        ``derivatives`` up to the truncation tolerance but not bit for bit.
        """
        if order > MAX_ORDER:
            raise OrderTooHigh(f"derivative order {order} exceeds {MAX_ORDER}")
        Z = np.atleast_2d(np.asarray(Z, dtype=complex))
        idx = multi_indices_upto(self.g, order)
        out = {I: np.empty(len(Z), dtype=complex) for I in idx}
        for start in range(0, len(Z), 256):
            chunk = Z[start:start + 256]
            centres = chunk.imag @ self.imtau_inv.T
            m = self.lattice(centres, order).astype(float)
            quad = np.einsum("ki,ij,kj->k", m, self.tau, m)
            W = np.exp(1j * np.pi * quad[None, :] + 2j * np.pi * (chunk @ m.T))
            for I in idx:
                mono = np.prod(m ** np.array(I, dtype=float), axis=1)
                out[I][start:start + len(chunk)] = (W @ mono) * (2j * np.pi) ** sum(I)
        return out

    def _point(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex).reshape(-1)
        if z.shape != (self.g,):
            raise IndexOutOfRange(f"point has {z.size} coordinates, expected {self.g}")
        return z


def make_context(tau, tol: float = 1e-12) -> ThetaContext:
    tau = np.asarray(tau, dtype=complex)
    if tau.ndim == 0:
        tau = tau.reshape(1, 1)
    if tau.ndim != 2 or tau.shape[0] != tau.shape[1]:
        raise NotSymmetric("period matrix must be square")
    asym = float(np.max(np.abs(tau - tau.T))) if tau.size else 0.0
    if asym >= SYMMETRY_TOL:
        raise NotSymmetric(f"period matrix asymmetry {asym:.3g}")
    tau = (tau + tau.T) / 2
    try:
        L = np.linalg.cholesky(tau.imag)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefinite("imaginary part is not positive definite") from e
    lam = float(np.linalg.eigvalsh(tau.imag).min())
    if lam <= 0:
        raise NotPositiveDefinite("imaginary part is not positive definite")
    if not (0 < tol < 1):
        raise ValueError("tol must lie in (0, 1)")
    return ThetaContext(tau, tol, L, lam)


def reduce_point(ctx: ThetaContext, z) -> ReducedPoint:
    z = ctx._point(z)
    n = np.rint(ctx.imtau_inv @ z.imag)
    z1 = z - ctx.tau @ n
    m = np.rint(z1.real)
    z0 = z1 - m
    log_pref = -1j * np.pi * (n @ ctx.tau @ n) - 2j * np.pi * (n @ z0)
    return ReducedPoint(z0, m.astype(int), n.astype(int), complex(log_pref))


def theta_deriv(ctx: ThetaContext, z, I) -> complex:
    I = tuple(int(k) for k in I)
    if len(I) != ctx.g or min(I) < 0:
        raise IndexOutOfRange(f"multi-index {I} does not match genus {ctx.g}")
    if sum(I) > MAX_ORDER:
        raise OrderTooHigh(f"derivative order {sum(I)} exceeds {MAX_ORDER}")
    return ctx.derivatives_for(z, [I])[I]


def tau_derivative(ctx: ThetaContext, z, i: int, j: int) -> complex:
    """d theta / d tau_ij through the heat equation (indices from 0)."""
    g = ctx.g
    if not (0 <= i < g and 0 <= j < g):
        raise IndexOutOfRange(f"({i}, {j}) outside 0..{g - 1}")
    I = unit_index(g, i, j)
    return theta_deriv(ctx, z, I) / (2j * np.pi * (1 + (i == j)))


def gradient(derivs: dict, g: int) -> np.ndarray:
    return np.array([derivs[unit_index(g, k)] for k in range(g)], dtype=complex)


def hessian(derivs: dict, g: int) -> np.ndarray:
    return np.array([[derivs[unit_index(g, i, j)] for j in range(g)] for i in range(g)], dtype=complex)


def random_period_matrix(g: int, rng: np.random.Generator, spread: float = 0.3) -> np.ndarray:
    """A well-conditioned random point of the Siegel upper half space."""
    X = rng.uniform(-0.5, 0.5, (g, g))
    X = (X + X.T) / 2
    A = rng.normal(0, spread, (g, g))
    Y = np.eye(g) + (A @ A.T) / g
    return X + 1j * Y


def jet2_batch(ctx: ThetaContext, Z) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Values (N,), gradients (N, g) and Hessians (N, g, g) at the rows of Z."""
    g = ctx.g
    d = ctx.derivatives_batch(Z, 2)
    val = d[(0,) * g]
    grad = np.stack([d[unit_index(g, k)] for k in range(g)], axis=1)
    H = np.empty((len(val), g, g), dtype=complex)
    for i in range(g):
        for j in range(g):
            H[:, i, j] = d[unit_index(g, i, j)]
    return val, grad, H


def jet2(ctx: ThetaContext, z) -> tuple[complex, np.ndarray, np.ndarray]:
    d = ctx.derivatives(z, 2)
    return d[(0,) * ctx.g], gradient(d, ctx.g), hessian(d, ctx.g)
