"""Differential operators of curvilinear jets and the residual conditions they give.

For translation-invariant vector fields D_i = sum_l eta_il d_l the operators

    Delta^(k) = sum over h with h_1 + 2 h_2 + ... + k h_k = k of
                D_1^h_1 ... D_k^h_k / (h_1! ... h_k!)

are the Taylor coefficients of f along a curvilinear jet: the map
f -> sum_k Delta^(k) f t^k is a ring homomorphism.  The D_i commute, so a
monomial is just its exponent vector h = (h_1, ..., h_k).

A jet lies in the singular locus of {f = 0} iff f(z0) = 0 and
d_j Delta^(k) f (z0) = 0 for all j and k <= N; those gradients are the
residual vectors computed below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .errors import BasePointNotSingular, InvalidInput, ZeroLeadingCoefficient
from .polys import MPoly
from .theta import multi_indices_upto, unit_index

MAX_K = 12


@dataclass(frozen=True)
class JetOperator:
    k: int
    terms: dict  # exponent vector (length k) -> Fraction

    def __eq__(self, other):
        return isinstance(other, JetOperator) and self.k == other.k and self.terms == other.terms

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "terms": [
                {"monomial": monomial_str(h), "exponents": list(h), "coefficient": f"{c.numerator}/{c.denominator}"}
                for h, c in sorted(self.terms.items(), reverse=True)
            ],
        }


def monomial_str(h) -> str:
    parts = []
    for i, e in enumerate(h, 1):
        if e == 1:
            parts.append(f"D{i}")
        elif e > 1:
            parts.append(f"D{i}^{e}")
    return "*".join(parts) or "1"


def _check_k(k: int) -> None:
    if not (0 <= k <= MAX_K):
        raise InvalidInput(f"k must lie in 0..{MAX_K}")


def weighted_partitions(k: int) -> list[tuple[int, ...]]:
    """All (h_1..h_k) with sum i h_i = k."""
    out = []

    def rec(i, remaining, acc):
        if i == 0:
            if remaining == 0:
                out.append(tuple(reversed(acc)))
            return
        for h in range(remaining // i, -1, -1):
            rec(i - 1, remaining - h * i, acc + [h])

    rec(k, k, [])
    return out


def delta_expand(k: int) -> JetOperator:
    _check_k(k)
    terms = {}
    for h in weighted_partitions(k):
        c = Fraction(1)
        for e in h:
            c /= math.factorial(e)
        terms[h] = c
    return JetOperator(k, terms)


def delta_recursive(k: int) -> JetOperator:
    """Delta^(k) from the graded recursion i D^(k)_i = sum_j D_j D^(k-j)_(i-1).

    D^(k)_i collects the monomials with i factors; D^(k)_1 = D_k, D^(0)_0 = 1.
    """
    _check_k(k)
    # parts[(k, i)]: dict exponent vector (length k) -> coefficient
    parts: dict = {(0, 0): {(): Fraction(1)}}

    def pad(h, n):
        return tuple(h) + (0,) * (n - len(h))

    for kk in range(1, k + 1):
        parts[(kk, 0)] = {}
        parts[(kk, 1)] = {pad((0,) * (kk - 1) + (1,), kk): Fraction(1)}
        for i in range(2, kk + 1):
            acc: dict = {}
            for j in range(1, kk - i + 2):
                for h, c in parts.get((kk - j, i - 1), {}).items():
                    h2 = list(pad(h, kk))
                    h2[j - 1] += 1
                    h2 = tuple(h2)
                    acc[h2] = acc.get(h2, 0) + c / i
            parts[(kk, i)] = {h: c for h, c in acc.items() if c != 0}
    terms = {}
    for i in range(k + 1):
        for h, c in parts.get((k, i), {}).items():
            terms[pad(h, k)] = terms.get(pad(h, k), 0) + c
    if k == 0:
        terms = {(): Fraction(1)}
    return JetOperator(k, terms)


# ---------------------------------------------------------------------------
# exact action on polynomials


def _field(fields, i: int, g: int):
    return fields[i] if i < len(fields) else [0] * g


def apply_operator(op: JetOperator, fields: Sequence, f: MPoly) -> MPoly:
    """Delta^(k) f with D_i = eta_i . grad, exactly."""
    out = MPoly(f.g, ())
    for h, c in op.terms.items():
        p = f
        for i, e in enumerate(h):
            for _ in range(e):
                p = p.directional(_field(fields, i, f.g))
        out = out + p * c
    return out


def leibniz_check(k: int, f: MPoly, g: MPoly, fields: Sequence, operators: Sequence[JetOperator] | None = None) -> bool:
    """Delta^(k)(fg) == sum_r Delta^(r) f * Delta^(k-r) g as polynomials."""
    ops = list(operators) if operators is not None else [delta_expand(r) for r in range(k + 1)]
    lhs = apply_operator(ops[k], fields, f * g)
    rhs = MPoly(f.g, ())
    for r in range(k + 1):
        rhs = rhs + apply_operator(ops[r], fields, f) * apply_operator(ops[k - r], fields, g)
    return (lhs - rhs).is_zero()


def operator_symbol(op: JetOperator, fields: Sequence, g: int) -> MPoly:
    """The polynomial in xi obtained by replacing d_l with xi_l."""
    xi = [MPoly.var(g, l) for l in range(g)]
    lin = [sum((xi[l] * eta[l] for l in range(g)), MPoly(g, ())) for eta in fields]
    out = MPoly(g, ())
    for h, c in op.terms.items():
        term = MPoly.const(g, c)
        for i, e in enumerate(h):
            if e:
                term = term * lin[i] ** e
        out = out + term
    return out


# ---------------------------------------------------------------------------
# reparametrisation


@dataclass
class Reparametrization:
    literal: list
    composed: list | None
    agree: bool | None
    discrepancy: list | None


def power_series_coefficient(c: Sequence, j: int, i: int):
    """[t^i] (c_1 t + c_2 t^2 + ...)^j."""
    series = [0] * (i + 1)
    series[0] = 1
    for _ in range(j):
        nxt = [0] * (i + 1)
        for a, sa in enumerate(series):
            if sa == 0:
                continue
            for b, cb in enumerate(c, 1):
                if a + b > i:
                    break
                nxt[a + b] = nxt[a + b] + sa * cb
        series = nxt
    return series[i]


def reparametrize(fields: Sequence, c: Sequence, check_up_to: int = 3) -> Reparametrization:
    """New fields under t -> c_1 t + ... + c_N t^N.

    ``literal`` applies D'_i = sum_{j<=i} c_j^(i-j+1) D_j as written.
    ``composed`` re-extracts the fields from the composed jet:
    D'_i = sum_j [t^i] phi(t)^j D_j.  Both are reported, with the
    difference, when N <= check_up_to.
    """
    N = len(fields)
    if not c or c[0] == 0:
        raise ZeroLeadingCoefficient("c_1 must be nonzero")
    c = list(c) + [0] * (N - len(c))
    g = len(fields[0])

    def combo(weights):
        return [sum(w * fields[j][l] for j, w in enumerate(weights)) for l in range(g)]

    literal = [combo([c[j] ** (i - j + 1) if j <= i else 0 for j in range(N)]) for i in range(N)]
    if N > check_up_to:
        return Reparametrization(literal, None, None, None)
    composed = [combo([power_series_coefficient(c, j + 1, i + 1) for j in range(N)]) for i in range(N)]
    diff = [[a - b for a, b in zip(u, v)] for u, v in zip(literal, composed)]
    agree = all(x == 0 for row in diff for x in row)
    return Reparametrization(literal, composed, agree, diff)


def composed_operator_symbol(fields: Sequence, c: Sequence, k: int, g: int) -> MPoly:
    """Symbol of sum_j [t^k] phi^j Delta^(j): the order-k operator of the composed jet."""
    out = MPoly(g, ())
    for j in range(1, k + 1):
        w = power_series_coefficient(c, j, k)
        if w != 0:
            out = out + operator_symbol(delta_expand(j), fields, g) * w
    return out


# ---------------------------------------------------------------------------
# residuals at a point


def contract(derivs: dict, g: int, vectors: Sequence, free: int):
    """sum over l of prod_a v_a[l_a] * d_{e_l1 + ... + e_lp + e_free} f."""
    base = unit_index(g, free)
    total = 0
    supports = [[(l, v[l]) for l in range(g) if v[l] != 0] for v in vectors]
    for choice in product(*supports):
        I = list(base)
        coef = 1
        for l, val in choice:
            I[l] += 1
            coef = coef * val
        total = total + coef * derivs[tuple(I)]
    return total


def _hessian_norm(derivs: dict, g: int) -> float:
    return math.sqrt(sum(abs(complex(derivs[unit_index(g, i, j)])) ** 2 for i in range(g) for j in range(g)))


def _check_base(derivs: dict, g: int, tol: float) -> None:
    scale = max(1.0, _hessian_norm(derivs, g))
    vals = [abs(complex(derivs[(0,) * g]))] + [abs(complex(derivs[unit_index(g, k)])) for k in range(g)]
    if max(vals) > tol * scale:
        raise BasePointNotSingular(f"f and its gradient are not zero at the base point (max {max(vals):.3g})")


def residual_vector(derivs: dict, g: int, op: JetOperator, fields: Sequence) -> list:
    """Gradient of Delta^(k) f at the point: sum_h coeff * (D-monomial) d_j f."""
    out = []
    for j in range(g):
        acc = 0
        for h, c in op.terms.items():
            vecs = [_field(fields, i, g) for i, e in enumerate(h) for _ in range(e)]
            acc = acc + c * contract(derivs, g, vecs, j)
        out.append(acc)
    return out


def curvilinear_vectors(oracle, z0, fields: Sequence, base_tol: float = 1e-8) -> list[list]:
    N = len(fields)
    g = oracle.g
    derivs = oracle.derivatives(z0, N + 1)
    _check_base(derivs, g, base_tol)
    return [residual_vector(derivs, g, delta_expand(k), fields) for k in range(1, N + 1)]


def _norm(v) -> float:
    return math.sqrt(sum(abs(complex(x)) ** 2 for x in v))


def curvilinear_residuals(oracle, z0, fields: Sequence, base_tol: float = 1e-8) -> list[float]:
    """Residual norms for orders 1..N, divided by max(1, |M|_F)."""
    derivs = oracle.derivatives(z0, 2)
    scale = max(1.0, _hessian_norm(derivs, oracle.g))
    return [_norm(v) / scale for v in curvilinear_vectors(oracle, z0, fields, base_tol)]


def constant_field_vectors(oracle, z0, b, N: int, base_tol: float = 1e-8) -> list[list]:
    """b . d_b^j M for j = 0..N-1."""
    g = oracle.g
    derivs = oracle.derivatives(z0, N + 1)
    _check_base(derivs, g, base_tol)
    return [[contract(derivs, g, [b] * (j + 1), l) for l in range(g)] for j in range(N)]


def constant_field_residuals(oracle, z0, b, N: int, base_tol: float = 1e-8) -> list[float]:
    derivs = oracle.derivatives(z0, 2)
    scale = max(1.0, _hessian_norm(derivs, oracle.g))
    return [_norm(v) / scale for v in constant_field_vectors(oracle, z0, b, N, base_tol)]


@dataclass
class JetExtension:
    eta: np.ndarray
    residual: float


def jet_extend(oracle, z0, fields: Sequence, tol: float = 1e-8) -> JetExtension | None:
    """Solve eta_{k+1} . M = -(rest of the order k+1 condition), if consistent."""
    k = len(fields)
    g = oracle.g
    derivs = oracle.derivatives(z0, k + 2)
    _check_base(derivs, g, tol)
    scale = max(1.0, _hessian_norm(derivs, g))
    for order in range(1, k + 1):
        if _norm(residual_vector(derivs, g, delta_expand(order), fields)) / scale > tol:
            raise InvalidInput(f"given fields already fail the order-{order} condition")
    rest = np.array([complex(x) for x in residual_vector(derivs, g, delta_expand(k + 1), list(fields) + [[0] * g])])
    M = np.array([[complex(derivs[unit_index(g, i, j)]) for j in range(g)] for i in range(g)])
    eta = np.linalg.lstsq(M, -rest, rcond=None)[0]
    res = float(np.linalg.norm(M @ eta + rest)) / scale
    if res > tol:
        return None
    return JetExtension(eta, res)


def generating_function_check(k: int, lam: Sequence, fields: Sequence) -> bool:
    """Delta^(k) e^{lam.z} / e^{lam.z} equals [t^k] exp(sum_i (lam.eta_i) t^i), exactly."""
    a = [sum(Fraction(x) * Fraction(y) for x, y in zip(lam, eta)) for eta in fields]
    a = a + [Fraction(0)] * (k - len(a))
    lhs = Fraction(0)
    for h, c in delta_expand(k).terms.items():
        t = c
        for i, e in enumerate(h):
            t *= a[i] ** e
        lhs += t
    # exp series of A(t) = sum_i a_i t^i truncated at t^k
    series = [Fraction(0)] * (k + 1)
    series[0] = Fraction(1)
    power = [Fraction(1)] + [Fraction(0)] * k
    for n in range(1, k + 1):
        nxt = [Fraction(0)] * (k + 1)
        for p, pv in enumerate(power):
            if pv == 0:
                continue
            for i in range(1, k + 1 - p):
                nxt[p + i] += pv * a[i - 1]
        power = nxt
        for p in range(k + 1):
            series[p] += power[p] / math.factorial(n)
    return lhs == series[k]


def all_derivative_indices(g: int, order: int):
    return multi_indices_upto(g, order)
