"""Multivariate polynomials with exact coefficients, and a derivative oracle built on them.

Any object with an integer attribute ``g`` and a method
``derivatives(z, order) -> {I: value}`` (all |I| <= order) can stand in for a
theta function in the singular-locus and jet routines.  ``PolynomialOracle``
is the exact one: with rational z it returns Fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .theta import multi_indices_upto


@dataclass(frozen=True)
class MPoly:
    """Polynomial in g variables as {exponent tuple: coefficient}."""

    g: int
    terms: tuple  # sorted tuple of (exponent, coefficient)

    @classmethod
    def from_dict(cls, g: int, d: dict) -> "MPoly":
        clean = {tuple(e): Fraction(c) for e, c in d.items() if c != 0}
        return cls(g, tuple(sorted(clean.items())))

    @classmethod
    def var(cls, g: int, k: int) -> "MPoly":
        e = [0] * g
        e[k] = 1
        return cls.from_dict(g, {tuple(e): 1})

    @classmethod
    def const(cls, g: int, c) -> "MPoly":
        return cls.from_dict(g, {(0,) * g: c})

    def as_dict(self) -> dict:
        return dict(self.terms)

    @property
    def degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        other = _lift(self.g, other)
        d = self.as_dict()
        for e, c in other.terms:
            d[e] = d.get(e, 0) + c
        return MPoly.from_dict(self.g, d)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.g, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other):
        return self + (-_lift(self.g, other))

    def __rsub__(self, other):
        return _lift(self.g, other) - self

    def __mul__(self, other):
        other = _lift(self.g, other)
        d: dict = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                d[e] = d.get(e, 0) + c1 * c2
        return MPoly.from_dict(self.g, d)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = MPoly.const(self.g, 1)
        for _ in range(k):
            out = out * self
        return out

    def diff(self, k: int, times: int = 1) -> "MPoly":
        d = {}
        for e, c in self.terms:
            if e[k] < times:
                continue
            f = math.perm(e[k], times)
            e2 = list(e)
            e2[k] -= times
            d[tuple(e2)] = c * f
        return MPoly.from_dict(self.g, d)

    def diff_index(self, I) -> "MPoly":
        p = self
        for k, times in enumerate(I):
            if times:
                p = p.diff(k, times)
        return p

    def directional(self, v) -> "MPoly":
        """sum_k v_k d_k p; v may hold exact or numeric entries."""
        out = MPoly(self.g, ())
        for k, vk in enumerate(v):
            if vk != 0:
                out = out + self.diff(k) * vk
        return out

    def __call__(self, z):
        acc = 0
        for e, c in self.terms:
            t = c
            for zk, ek in zip(z, e):
                if ek:
                    t = t * zk**ek
            acc = acc + t
        return acc

    def homogeneous_part(self, d: int) -> "MPoly":
        return MPoly(self.g, tuple((e, c) for e, c in self.terms if sum(e) == d))

    def to_sympy(self, symbols):
        import sympy

        return sum(
            (sympy.Rational(c.numerator, c.denominator) * sympy.Mul(*[s**k for s, k in zip(symbols, e)])
             for e, c in self.terms),
            sympy.Integer(0),
        )

    @classmethod
    def from_sympy(cls, expr, symbols) -> "MPoly":
        import sympy

        poly = sympy.Poly(sympy.expand(expr), *symbols)
        d = {}
        for mon, c in poly.terms():
            if not c.is_Rational:
                raise ValueError("only rational coefficients are supported")
            d[tuple(mon)] = Fraction(int(c.p), int(c.q))
        return cls.from_dict(len(symbols), d)


def _lift(g: int, x) -> MPoly:
    if isinstance(x, MPoly):
        return x
    return MPoly.const(g, x)


def parse_poly(text: str, g: int | None = None) -> MPoly:
    """Parse an expression in z1, z2, ... (``^`` allowed for powers)."""
    import re

    import sympy

    names = sorted({int(k) for k in re.findall(r"z(\d+)", text)} or {1})
    g = max(names) if g is None else g
    symbols = sympy.symbols(" ".join(f"z{k}" for k in range(1, g + 1)), seq=True)
    expr = sympy.sympify(text.replace("^", "**"), locals={f"z{k}": s for k, s in enumerate(symbols, 1)})
    return MPoly.from_sympy(expr, symbols)


class PolynomialOracle:
    """Derivative oracle for an exact polynomial."""

    def __init__(self, poly: MPoly):
        self.poly = poly
        self.g = poly.g
        self._cache: dict = {}

    @property
    def order_cap(self) -> int:
        return max(self.poly.degree, 1)

    def _deriv_poly(self, I) -> MPoly:
        if I not in self._cache:
            self._cache[I] = self.poly.diff_index(I)
        return self._cache[I]

    def derivatives(self, z, order: int) -> dict:
        return {I: self._deriv_poly(I)(z) for I in multi_indices_upto(self.g, order)}

    def derivatives_for(self, z, indices) -> dict:
        return {tuple(I): self._deriv_poly(tuple(I))(z) for I in indices}

    def __repr__(self):
        return f"PolynomialOracle(g={self.g}, terms={len(self.poly.terms)})"
