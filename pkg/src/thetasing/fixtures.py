"""Named test objects shared by the tests and the scripts."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .boundary import Rank1Data, Rank2Data
from .exact import UPoly
from .pencils import Pencil, direct_sum
from .theta import make_context

HALF = (1 + 1j) / 2


def _sym(n: int, entries: dict) -> list:
    M = [[Fraction(0)] * (n + 1) for _ in range(n + 1)]
    for (i, j), v in entries.items():
        M[i][j] = M[j][i] = Fraction(v)
    return M


def diag_pencil() -> Pencil:
    """A = I, B = diag(1, 2, 3) in P^2."""
    return Pencil(2, _sym(2, {(0, 0): 1, (1, 1): 1, (2, 2): 1}), _sym(2, {(0, 0): 1, (1, 1): 2, (2, 2): 3}))


def base_point_pencil() -> Pencil:
    """A = 2 x0 x1, B = x1^2 + 2 x0 x2: the vertex of A is a base point."""
    return Pencil(2, _sym(2, {(0, 1): 1}), _sym(2, {(1, 1): 1, (0, 2): 1}))


def x0_pencil() -> Pencil:
    """Members x0 (lambda x1 + mu x2): every member is singular."""
    return Pencil(2, _sym(2, {(0, 1): 1}), _sym(2, {(0, 2): 1}))


def x0_pencil_p3() -> Pencil:
    return direct_sum(x0_pencil(), 1)


def vertex_curve(*entries) -> list:
    """Polynomial vector from coefficient lists, e.g. vertex_curve([1], [0, 1])."""
    return [UPoly(tuple(Fraction(c) for c in e)) for e in entries]


def triple_product_base():
    return make_context(np.diag([1j, 1j, 1j]))


def indeterminate_rank1(w1: complex = 0.3 + 0.1j, w2: complex = 0.1 + 0.2j):
    """Rank-1 data over the triple product where z and z - omega are both singular
    and u makes the Hessian part cancel, so the bordered quadric vanishes."""
    base = triple_product_base()
    ell = make_context([[1j]])
    z = np.array([HALF, HALF, w1])
    omega = np.array([0, 0, w1 - w2])
    u = -ell.value([w1]) / ell.value([w2])
    return Rank1Data.make(base, omega), z, u


def deep_rank2(t: complex = 0.7 - 0.2j):
    """Rank-2 data with z and z - omega1 - omega2 singular on the triple product."""
    base = triple_product_base()
    s1 = np.array([HALF, HALF, 0.3 + 0.1j])
    s2 = np.array([HALF, HALF, 0.05 + 0.2j])
    total = s1 - s2
    omega1 = np.array([0.21 + 0.05j, 0.1 + 0.1j, 0.07])
    return Rank2Data.make(base, omega1, total - omega1, t), s1
