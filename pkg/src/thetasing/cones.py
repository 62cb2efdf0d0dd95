"""Tangent cones, polar quadrics and vertices of homogeneous forms.

The tangent cone of order r at a point of multiplicity r is the leading
homogeneous part of the Taylor expansion,

    theta_r(b) = sum_{|I| = r} d_I theta / I! * b^I.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exact as ex
from .errors import InvalidInput, OrderMismatch
from .sing import EPS_RANK, QuadricSystem, numerical_rank, singularity_order
from .theta import add_index, index_factorial, multi_indices


@dataclass
class HomogeneousForm:
    g: int
    degree: int
    coeffs: dict  # exponent tuple -> coefficient

    def coeff(self, I) -> object:
        return self.coeffs.get(tuple(I), 0)

    def __call__(self, b):
        total = 0
        for I, c in self.coeffs.items():
            t = c
            for bk, k in zip(b, I):
                if k:
                    t = t * bk**k
            total = total + t
        return total

    def derivative_value(self, I) -> object:
        """d_I of the form (|I| = degree), i.e. I! times the coefficient."""
        return index_factorial(I) * self.coeff(I)

    def is_exact(self) -> bool:
        return all(isinstance(c, (int, Fraction)) for c in self.coeffs.values())

    def coefficient_array(self) -> np.ndarray:
        return np.array([complex(self.coeff(I)) for I in multi_indices(self.g, self.degree)])

    @classmethod
    def from_poly(cls, poly) -> "HomogeneousForm":
        d = poly.degree
        if any(sum(e) != d for e, _ in poly.terms):
            raise InvalidInput("polynomial is not homogeneous")
        return cls(poly.g, d, dict(poly.terms))


def tangent_cone(oracle, z, r: int, rank_tol: float = EPS_RANK) -> HomogeneousForm:
    order = singularity_order(oracle, z, rank_tol)
    if order != r:
        raise OrderMismatch(f"point has order {order}, not {r}")
    return _taylor_part(oracle, z, r)


def _taylor_part(oracle, z, k: int) -> HomogeneousForm:
    idx = multi_indices(oracle.g, k)
    d = oracle.derivatives_for(z, idx)
    coeffs = {}
    for I in idx:
        v = d[I]
        f = index_factorial(I)
        coeffs[I] = Fraction(v, f) if isinstance(v, (int, Fraction)) else v / f
    return HomogeneousForm(oracle.g, k, coeffs)


def asymptotic_cone(oracle, z, s: int, rank_tol: float = EPS_RANK) -> list[HomogeneousForm]:
    """Homogeneous Taylor parts theta_r, ..., theta_s where r is the order at z."""
    r = singularity_order(oracle, z, rank_tol)
    if s < r:
        raise OrderMismatch(f"requested order {s} below the multiplicity {r}")
    return [_taylor_part(oracle, z, k) for k in range(r, s + 1)]


def polar_quadrics(form: HomogeneousForm) -> QuadricSystem:
    """Quadrics Q^J with entries d_{J+e_h+e_k} of the form, one per |J| = degree-2."""
    if form.degree < 2:
        raise InvalidInput("polar quadrics need degree >= 2")
    g = form.g
    gens = []
    for J in multi_indices(g, form.degree - 2):
        Q = np.array(
            [[complex(form.derivative_value(add_index(J, h, k))) for k in range(g)] for h in range(g)]
        )
        gens.append(Q)
    return QuadricSystem(gens)


def vertex_of_form(form: HomogeneousForm, eps: float = EPS_RANK) -> list[list]:
    """Basis of {b : d_b form = 0 identically}.

    Exact (rational) forms get an exact basis; numeric ones use the SVD with a
    relative threshold.
    """
    g, r = form.g, form.degree
    rows = []
    for K in multi_indices(g, r - 1):
        rows.append([(K[l] + 1) * form.coeff(add_index(K, l)) for l in range(g)])
    if form.is_exact():
        return ex.nullspace([[ex.as_fraction(x) for x in row] for row in rows], g)
    M = np.array(rows, dtype=complex)
    rank = numerical_rank(M, eps)
    _, _, Vh = np.linalg.svd(M)
    return [list(v) for v in np.conj(Vh[rank:])]


@dataclass
class PolarCoincidence:
    h: np.ndarray
    c: complex
    residual: float


def power_coefficients(h, d: int, g: int) -> np.ndarray:
    """Coefficients of (h . z)^d in the monomial order of ``multi_indices``."""
    h = np.asarray(h, dtype=complex)
    out = []
    for I in multi_indices(g, d):
        out.append(math.factorial(d) / index_factorial(I) * np.prod(h ** np.array(I)))
    return np.array(out)


def polar_coincidence(form: HomogeneousForm, eps: float = EPS_RANK) -> PolarCoincidence | None:
    """If all polar quadrics agree projectively, recover h with form ~ c h^d."""
    if form.degree < 2:
        raise InvalidInput("need degree >= 2")
    gens = polar_quadrics(form).generators
    stack = np.array([Q.reshape(-1) for Q in gens])
    s = np.linalg.svd(stack, compute_uv=False)
    if s[0] == 0 or (len(s) > 1 and s[1] > eps * s[0]):
        return None
    _, _, Vh = np.linalg.svd(stack)
    Q0 = Vh[0].conj().reshape(form.g, form.g)
    U, _, _ = np.linalg.svd(Q0)
    h = U[:, 0]
    h = h / h[np.argmax(np.abs(h))]
    F = form.coefficient_array()
    P = power_coefficients(h, form.degree, form.g)
    c = complex(np.vdot(P, F) / np.vdot(P, P))
    residual = float(np.linalg.norm(F - c * P) / max(np.linalg.norm(F), 1e-300))
    return PolarCoincidence(h, c, residual)
