"""Exact arithmetic over Q, Q[t] and simple number fields Q[t]/(p).

Everything here works on ``fractions.Fraction`` so results are exact.  The
linear-algebra helpers are generic: they accept any field elements that
support ``+ - * /`` and comparison with zero, which lets the same routines run
over Q and over Q(alpha).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd, lcm
from typing import Iterable, Sequence


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("refusing to convert a float to an exact rational")
    return Fraction(x)


# ---------------------------------------------------------------------------
# univariate polynomials over Q


@dataclass(frozen=True)
class UPoly:
    """Polynomial in one variable with rational coefficients, lowest degree first."""

    coeffs: tuple

    def __post_init__(self):
        c = [as_fraction(a) for a in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def const(cls, a) -> "UPoly":
        return cls((a,))

    @classmethod
    def monomial(cls, k: int, a=1) -> "UPoly":
        return cls((0,) * k + (a,))

    @classmethod
    def coerce(cls, x) -> "UPoly":
        return x if isinstance(x, UPoly) else cls((x,))

    @property
    def deg(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, UPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == UPoly((other,)).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        other = UPoly.coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return UPoly(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return UPoly(tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-UPoly.coerce(other))

    def __rsub__(self, other):
        return UPoly.coerce(other) - self

    def __mul__(self, other):
        other = UPoly.coerce(other)
        if not self.coeffs or not other.coeffs:
            return UPoly(())
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UPoly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = UPoly((1,))
        for _ in range(k):
            out = out * self
        return out

    def divmod(self, other: "UPoly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        q = [Fraction(0)] * max(0, len(r) - len(other.coeffs) + 1)
        inv = 1 / other.lc
        while len(r) >= len(other.coeffs) and r:
            k = len(r) - len(other.coeffs)
            c = r[-1] * inv
            q[k] = c
            for i, b in enumerate(other.coeffs):
                r[i + k] -= c * b
            r.pop()
            while r and r[-1] == 0:
                r.pop()
        return UPoly(tuple(q)), UPoly(tuple(r))

    def __floordiv__(self, other):
        return self.divmod(UPoly.coerce(other))[0]

    def __mod__(self, other):
        return self.divmod(UPoly.coerce(other))[1]

    def exquo(self, other) -> "UPoly":
        q, r = self.divmod(UPoly.coerce(other))
        if not r.is_zero():
            raise ArithmeticError("inexact polynomial division")
        return q

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return UPoly(tuple(a / other for a in self.coeffs))
        return self.exquo(other)

    def __call__(self, x):
        acc = 0 * x if not isinstance(x, (int, Fraction)) else Fraction(0)
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def derivative(self) -> "UPoly":
        return UPoly(tuple(k * a for k, a in enumerate(self.coeffs))[1:])

    def monic(self) -> "UPoly":
        return self / self.lc if self.coeffs else self

    def primitive(self) -> "UPoly":
        """Integer coefficients with gcd 1 and positive leading coefficient."""
        if not self.coeffs:
            return self
        den = lcm(*(a.denominator for a in self.coeffs))
        ints = [int(a * den) for a in self.coeffs]
        g = 0
        for v in ints:
            g = gcd(g, v)
        sign = 1 if ints[-1] > 0 else -1
        return UPoly(tuple(Fraction(sign * v, g) for v in ints))

    def __repr__(self):
        return f"UPoly({self.to_str()})"

    def to_str(self, var: str = "t") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            a = self.coeffs[k]
            if a == 0:
                continue
            mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
            if mono and abs(a) == 1:
                s = mono
            elif mono:
                s = f"{abs(a)}*{mono}"
            else:
                s = str(abs(a))
            parts.append(("-" if a < 0 else "+", s))
        head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        return head + "".join(f" {sg} {s}" for sg, s in parts[1:])


def poly_gcd(a: UPoly, b: UPoly) -> UPoly:
    """Monic gcd (zero if both are zero)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def poly_gcd_many(polys: Iterable[UPoly]) -> UPoly:
    g = UPoly(())
    for p in polys:
        g = poly_gcd(g, p)
        if g.deg == 0:
            break
    return g


def poly_xgcd(a: UPoly, b: UPoly):
    """Return (g, s, t) with s*a + t*b = g monic."""
    r0, r1 = a, b
    s0, s1 = UPoly((1,)), UPoly(())
    t0, t1 = UPoly(()), UPoly((1,))
    while not r1.is_zero():
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    c = r0.lc
    return r0 / c, s0 / c, t0 / c


def squarefree_decomposition(f: UPoly) -> list[tuple[UPoly, int]]:
    """Yun's algorithm: f = lc * prod a_i^i with a_i square-free and coprime."""
    if f.deg <= 0:
        return []
    out = []
    a0 = poly_gcd(f, f.derivative())
    b = f.exquo(a0)
    c = f.derivative().exquo(a0)
    d = c - b.derivative()
    i = 1
    while b.deg > 0:
        a = poly_gcd(b, d)
        b = b.exquo(a)
        c = d.exquo(a)
        d = c - b.derivative()
        if a.deg > 0:
            out.append((a.monic(), i))
        i += 1
    return out


def factor_squarefree(f: UPoly) -> list[UPoly]:
    """Split a square-free polynomial into monic irreducible factors over Q."""
    if f.deg <= 1:
        return [f.monic()] if f.deg == 1 else []
    import sympy

    t = sympy.Symbol("t")
    expr = sum(sympy.Rational(a.numerator, a.denominator) * t**k for k, a in enumerate(f.coeffs))
    _, facs = sympy.factor_list(expr, t)
    out = []
    for fac, mult in facs:
        coeffs = sympy.Poly(fac, t).all_coeffs()[::-1]
        p = UPoly(tuple(Fraction(int(c.p), int(c.q)) for c in coeffs)).monic()
        out.extend([p] * mult)
    out.sort(key=lambda p: (p.deg, p.coeffs))
    return out


def factor(f: UPoly) -> list[tuple[UPoly, int]]:
    """Monic irreducible factors with multiplicities, by increasing degree."""
    out = []
    for part, mult in squarefree_decomposition(f):
        out.extend((p, mult) for p in factor_squarefree(part))
    out.sort(key=lambda pm: (pm[0].deg, pm[0].coeffs, pm[1]))
    return out


# ---------------------------------------------------------------------------
# number fields Q[t]/(p)


@dataclass(frozen=True)
class NumberField:
    modulus: UPoly

    def __post_init__(self):
        object.__setattr__(self, "modulus", self.modulus.monic())

    def __call__(self, x) -> "AlgElem":
        if isinstance(x, AlgElem):
            return x
        return AlgElem(self, UPoly.coerce(x) % self.modulus)

    @property
    def generator(self) -> "AlgElem":
        return self(UPoly.monomial(1))


@dataclass(frozen=True, eq=False)
class AlgElem:
    """Element of Q[t]/(p) for irreducible p, stored as a reduced polynomial."""

    field: NumberField
    value: UPoly

    def _lift(self, other) -> UPoly:
        if isinstance(other, AlgElem):
            return other.value
        return UPoly.coerce(other)

    def __add__(self, other):
        return AlgElem(self.field, (self.value + self._lift(other)) % self.field.modulus)

    __radd__ = __add__

    def __neg__(self):
        return AlgElem(self.field, -self.value)

    def __sub__(self, other):
        return AlgElem(self.field, (self.value - self._lift(other)) % self.field.modulus)

    def __rsub__(self, other):
        return AlgElem(self.field, (self._lift(other) - self.value) % self.field.modulus)

    def __mul__(self, other):
        return AlgElem(self.field, (self.value * self._lift(other)) % self.field.modulus)

    __rmul__ = __mul__

    def inverse(self) -> "AlgElem":
        if self.value.is_zero():
            raise ZeroDivisionError("inverse of zero in number field")
        g, s, _ = poly_xgcd(self.value, self.field.modulus)
        if g.deg != 0:
            raise ArithmeticError("modulus is not irreducible")
        return AlgElem(self.field, s % self.field.modulus)

    def __truediv__(self, other):
        if isinstance(other, AlgElem):
            return self * other.inverse()
        return AlgElem(self.field, self.value / as_fraction(other))

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __eq__(self, other):
        return (self - other).value.is_zero()

    def __hash__(self):
        return hash(self.value)

    def __repr__(self):
        return f"[{self.value.to_str('a')} mod {self.field.modulus.to_str('a')}]"


def is_zero(x) -> bool:
    if isinstance(x, AlgElem):
        return x.value.is_zero()
    if isinstance(x, UPoly):
        return x.is_zero()
    return x == 0


# ---------------------------------------------------------------------------
# linear algebra over a field


def to_rows(matrix) -> list[list]:
    return [list(row) for row in matrix]


def rref(matrix) -> tuple[list[list], list[int]]:
    """Reduced row echelon form over a field; returns (rows, pivot columns)."""
    m = to_rows(matrix)
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if not is_zero(m[i][c])), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c] if not isinstance(m[r][c], AlgElem) else m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(nrows):
            if i != r and not is_zero(m[i][c]):
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def rank(matrix) -> int:
    rows = to_rows(matrix)
    if not rows or not rows[0]:
        return 0
    return len(rref(rows)[1])


def nullspace(matrix, ncols: int | None = None) -> list[list]:
    """Basis of {x : M x = 0}, one vector per free column."""
    rows = to_rows(matrix)
    if ncols is None:
        ncols = len(rows[0])
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    r, pivots = rref(rows)
    one = _one_like(rows)
    zero = one - one
    basis = []
    for f in range(ncols):
        if f in pivots:
            continue
        v = [zero] * ncols
        v[f] = one
        for i, c in enumerate(pivots):
            v[c] = -r[i][f]
        basis.append(v)
    return basis


def _one_like(rows):
    for row in rows:
        for x in row:
            if isinstance(x, AlgElem):
                return x.field(1)
    return Fraction(1)


def det(matrix):
    """Determinant over a field by Gaussian elimination."""
    m = to_rows(matrix)
    n = len(m)
    if n == 0:
        return Fraction(1)
    one = _one_like(m)
    acc = one
    for c in range(n):
        p = next((i for i in range(c, n) if not is_zero(m[i][c])), None)
        if p is None:
            return one - one
        if p != c:
            m[c], m[p] = m[p], m[c]
            acc = -acc
        acc = acc * m[c][c]
        inv = 1 / m[c][c] if not isinstance(m[c][c], AlgElem) else m[c][c].inverse()
        for i in range(c + 1, n):
            if not is_zero(m[i][c]):
                f = m[i][c] * inv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return acc


def matmul(a, b):
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), start=Fraction(0)) for col in bt] for row in a]


def transpose(a):
    return [list(col) for col in zip(*a)]


def matvec(a, v):
    return [sum((x * y for x, y in zip(row, v)), start=0 * v[0]) for row in a]


def dot(u, v):
    acc = u[0] * v[0]
    for x, y in zip(u[1:], v[1:]):
        acc = acc + x * y
    return acc


# ---------------------------------------------------------------------------
# fraction-free elimination over Q[t]


def ff_echelon(matrix: Sequence[Sequence[UPoly]]):
    """Fraction-free (Bareiss) row echelon over Q[t].

    Returns (rank, row_order, pivot_columns, sign) where ``row_order`` is the
    permutation of original rows applied and the first ``rank`` entries index
    linearly independent original rows.
    """
    m = [[UPoly.coerce(x) for x in row] for row in matrix]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    order = list(range(nrows))
    prev = UPoly((1,))
    pivots = []
    sign = 1
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if not m[i][c].is_zero()), None)
        if p is None:
            continue
        if p != r:
            m[r], m[p] = m[p], m[r]
            order[r], order[p] = order[p], order[r]
            sign = -sign
        piv = m[r][c]
        for i in range(r + 1, nrows):
            mic = m[i][c]
            m[i] = [(piv * m[i][j] - mic * m[r][j]).exquo(prev) for j in range(ncols)]
        prev = piv
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return r, order, pivots, sign


def bareiss_det(matrix: Sequence[Sequence[UPoly]]) -> UPoly:
    m = [[UPoly.coerce(x) for x in row] for row in matrix]
    n = len(m)
    if n == 0:
        return UPoly((1,))
    sign = 1
    prev = UPoly((1,))
    for k in range(n - 1):
        if m[k][k].is_zero():
            p = next((i for i in range(k + 1, n) if not m[i][k].is_zero()), None)
            if p is None:
                return UPoly(())
            m[k], m[p] = m[p], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[k][k] * m[i][j] - m[i][k] * m[k][j]).exquo(prev)
        prev = m[k][k]
    return m[n - 1][n - 1] if sign > 0 else -m[n - 1][n - 1]


def poly_kernel(matrix: Sequence[Sequence[UPoly]]) -> list[list[UPoly]]:
    """Polynomial vectors spanning the kernel over Q(t), built from maximal minors.

    For each free column f the vector has entry det(N[R,P]) at f and the
    Cramer minors at the pivot columns, so every entry is a polynomial.
    """
    rk, order, pivots, _ = ff_echelon(matrix)
    n = len(matrix[0])
    rows = order[:rk]
    sub = [[UPoly.coerce(matrix[i][c]) for c in pivots] for i in rows]
    d = bareiss_det(sub)
    out = []
    for f in range(n):
        if f in pivots:
            continue
        v = [UPoly(())] * n
        v[f] = d
        col = [UPoly.coerce(matrix[i][f]) for i in rows]
        for k, c in enumerate(pivots):
            repl = [row[:k] + [col[i]] + row[k + 1:] for i, row in enumerate(sub)]
            v[c] = -bareiss_det(repl)
        out.append(v)
    return out


def remove_content(vec: Sequence[UPoly]) -> list[UPoly]:
    """Divide by the polynomial gcd and scale to primitive integer coefficients."""
    g = poly_gcd_many(vec)
    if g.is_zero():
        return list(vec)
    vec = [p.exquo(g) for p in vec]
    den = lcm(*(a.denominator for p in vec for a in p.coeffs))
    num = 0
    for p in vec:
        for a in p.coeffs:
            num = gcd(num, int(a * den))
    lead = next(p for p in vec if not p.is_zero())
    s = 1 if lead.lc > 0 else -1
    return [p * Fraction(s * den, num) for p in vec]


def maximal_minors(cols: Sequence[Sequence[UPoly]]) -> list[UPoly]:
    """All r x r minors of the (n+1) x r matrix whose columns are ``cols``."""
    r = len(cols)
    n1 = len(cols[0])
    out = []
    for rows in combinations(range(n1), r):
        out.append(bareiss_det([[cols[j][i] for j in range(r)] for i in rows]))
    return out


def coefficient_vectors(vec: Sequence[UPoly]) -> list[list[Fraction]]:
    """Coefficient vectors c_k of v(t) = sum_k c_k t^k."""
    d = max((p.deg for p in vec), default=-1)
    return [[p.coeffs[k] if k < len(p.coeffs) else Fraction(0) for p in vec] for k in range(d + 1)]
