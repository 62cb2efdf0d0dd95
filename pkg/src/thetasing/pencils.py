"""Pencils of quadrics in exact arithmetic.

A pencil is the line {lambda*A + mu*B} of symmetric matrices.  The analysis
covers the discriminant binary form and its roots, the generic corank r, the
curve (or scroll) of vertices of the general member, its span and degree, the
count of members of lower rank, and the bound relating r to the joint kernel.
All arithmetic is over Q or over Q[x]/(p) for irreducible p.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from . import exact as ex
from .errors import (
    ConstantVertex,
    DegeneratePencil,
    EmptySolutionSpace,
    InvalidInput,
    UnluckySubspace,
)
from .exact import UPoly


@dataclass(frozen=True)
class Pencil:
    n: int
    A: tuple
    B: tuple

    def __post_init__(self):
        A = tuple(tuple(ex.as_fraction(x) for x in row) for row in self.A)
        B = tuple(tuple(ex.as_fraction(x) for x in row) for row in self.B)
        size = self.n + 1
        for M, name in ((A, "A"), (B, "B")):
            if len(M) != size or any(len(row) != size for row in M):
                raise InvalidInput(f"{name} must be {size}x{size}")
            if any(M[i][j] != M[j][i] for i in range(size) for j in range(i)):
                raise InvalidInput(f"{name} is not symmetric")
        if all(x == 0 for row in A + B for x in row):
            raise InvalidInput("A and B are both zero")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def size(self) -> int:
        return self.n + 1

    def member(self, lam, mu=1):
        """Matrix lam*A + mu*B; entries live wherever lam and mu live."""
        return [[lam * a + mu * b for a, b in zip(ra, rb)] for ra, rb in zip(self.A, self.B)]

    def poly_matrix(self):
        """A + t*B as a matrix over Q[t]."""
        return [[UPoly((a, b)) for a, b in zip(ra, rb)] for ra, rb in zip(self.A, self.B)]

    def lambda_matrix(self):
        """lambda*A + B over Q[lambda]: the pencil with mu = 1."""
        return [[UPoly((b, a)) for a, b in zip(ra, rb)] for ra, rb in zip(self.A, self.B)]

    def restrict(self, W) -> "Pencil":
        Wt = ex.transpose(W)
        A = ex.matmul(ex.matmul(Wt, self.A), W)
        B = ex.matmul(ex.matmul(Wt, self.B), W)
        return Pencil(len(W[0]) - 1, A, B)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "A": [[_q(x) for x in row] for row in self.A],
            "B": [[_q(x) for x in row] for row in self.B],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Pencil":
        try:
            return cls(int(data["n"]), data["A"], data["B"])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
            raise InvalidInput(f"bad pencil JSON: {e}") from e


def _q(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def direct_sum(p: Pencil, zeros: int) -> Pencil:
    """Append ``zeros`` zero rows/columns to both generators."""
    size = p.size + zeros
    A = [[Fraction(0)] * size for _ in range(size)]
    B = [[Fraction(0)] * size for _ in range(size)]
    for i in range(p.size):
        for j in range(p.size):
            A[i][j] = p.A[i][j]
            B[i][j] = p.B[i][j]
    return Pencil(size - 1, A, B)


# ---------------------------------------------------------------------------
# discriminant and its roots


@dataclass(frozen=True)
class BinaryForm:
    """sum_k coeffs[k] * lambda^k * mu^(degree-k)."""

    degree: int
    coeffs: tuple

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def dehomogenize(self) -> UPoly:
        return UPoly(self.coeffs)

    def multiplicity_at_infinity(self) -> int:
        """Order of vanishing at (lambda:mu) = (1:0), i.e. the member A."""
        return self.degree - self.dehomogenize().deg

    def __call__(self, lam, mu):
        return sum(c * lam**k * mu ** (self.degree - k) for k, c in enumerate(self.coeffs))

    def to_str(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "*".join(
                s for s in (
                    "" if k == 0 else ("lambda" if k == 1 else f"lambda^{k}"),
                    "" if self.degree - k == 0 else ("mu" if self.degree - k == 1 else f"mu^{self.degree - k}"),
                ) if s
            )
            terms.append(f"{_q(c)}*{mono}" if mono else _q(c))
        return " + ".join(terms) if terms else "0"


def discriminant(p: Pencil) -> BinaryForm:
    """det(lambda*A + mu*B) by Bareiss elimination over Q[lambda]."""
    d = ex.bareiss_det(p.lambda_matrix())
    coeffs = tuple(d.coeffs) + (Fraction(0),) * (p.size + 1 - len(d.coeffs))
    return BinaryForm(p.size, coeffs)


@dataclass
class RootInfo:
    """A root of the discriminant: either (1:0) or the roots of an irreducible p(lambda)."""

    factor: UPoly | None  # None means the point (lambda:mu) = (1:0)
    multiplicity: int
    rank: int
    kernel_dim: int
    base_point: bool | None = None
    other_smooth_at_vertex: bool | None = None
    bordered_nonzero: bool | None = None

    @property
    def degree(self) -> int:
        return 1 if self.factor is None else self.factor.deg

    def label(self) -> str:
        if self.factor is None:
            return "mu"
        # homogenize p(lambda) with mu
        d = self.factor.deg
        parts = []
        for k, c in enumerate(self.factor.coeffs):
            if c == 0:
                continue
            mono = "*".join(s for s in (
                "" if k == 0 else ("lambda" if k == 1 else f"lambda^{k}"),
                "" if d - k == 0 else ("mu" if d - k == 1 else f"mu^{d - k}"),
            ) if s)
            coef = _q(c)
            parts.append(mono if coef == "1" and mono else (f"{coef}*{mono}" if mono else coef))
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {
            "factor": self.label(),
            "degree": self.degree,
            "multiplicity": self.multiplicity,
            "rank": self.rank,
            "kernel_dim": self.kernel_dim,
            "vertex_is_base_point": self.base_point,
            "other_member_smooth_at_vertex": self.other_smooth_at_vertex,
            "bordered_determinant_nonzero": self.bordered_nonzero,
        }


def _member_at(p: Pencil, factor: UPoly | None):
    """(member, other member) as matrices over Q or Q(alpha)."""
    if factor is None:
        return [list(r) for r in p.A], [list(r) for r in p.B]
    if factor.deg == 1:
        alpha = -factor.coeffs[0] / factor.coeffs[1]
    else:
        alpha = ex.NumberField(factor).generator
    member = p.member(alpha, 1)
    if factor.deg > 1:
        K = alpha.field
        member = [[K(x) for x in row] for row in member]
        other = [[K(x) for x in row] for row in p.A]
    else:
        other = [list(r) for r in p.A]
    return member, other


def _complete_basis(v):
    """Columns [v, e_i (i != j)] where v_j != 0."""
    n = len(v)
    j = next(i for i, x in enumerate(v) if not ex.is_zero(x))
    one = v[j] / v[j]
    zero = one - one
    cols = [list(v)]
    for i in range(n):
        if i != j:
            cols.append([one if k == i else zero for k in range(n)])
    return ex.transpose(cols)


def _analyze_root(p: Pencil, factor: UPoly | None, mult: int) -> RootInfo:
    member, other = _member_at(p, factor)
    rk = ex.rank(member)
    info = RootInfo(factor, mult, rk, p.size - rk)
    if rk == p.n:
        vert = ex.nullspace(member)[0]
        qv = ex.matvec(other, vert)
        info.base_point = ex.is_zero(ex.dot(vert, qv))
        if info.base_point:
            S = _complete_basis(vert)
            St = ex.transpose(S)
            Qt = _mm(_mm(St, member), S)
            Pt = _mm(_mm(St, other), S)
            b = Pt[0][1:]
            info.other_smooth_at_vertex = not all(ex.is_zero(x) for x in b)
            zero = b[0] - b[0]
            bordered = [[zero] + list(b)] + [[b[i]] + Qt[i + 1][1:] for i in range(p.n)]
            info.bordered_nonzero = not ex.is_zero(ex.det(bordered))
    return info


def _mm(a, b):
    bt = list(zip(*b))
    out = []
    for row in a:
        r = []
        for col in bt:
            acc = row[0] * col[0]
            for x, y in zip(row[1:], col[1:]):
                acc = acc + x * y
            r.append(acc)
        out.append(r)
    return out


def singular_members(p: Pencil) -> list[RootInfo]:
    """Roots of the discriminant with multiplicity, member rank and vertex data."""
    disc = discriminant(p)
    if disc.is_zero():
        raise DegeneratePencil("discriminant vanishes identically; use generic_corank")
    roots = []
    k_inf = disc.multiplicity_at_infinity()
    if k_inf > 0:
        roots.append(_analyze_root(p, None, k_inf))
    for fac, mult in ex.factor(disc.dehomogenize()):
        roots.append(_analyze_root(p, fac, mult))
    for r in roots:
        if r.multiplicity < p.size - r.rank:
            raise AssertionError(f"multiplicity bound violated at {r.label()}")
    return roots


def multiplicity_clauses(p: Pencil, roots: Sequence[RootInfo]) -> dict:
    """Check the three statements about root multiplicities on every root."""
    total = sum(r.multiplicity * r.degree for r in roots)
    bound_ok = all(r.multiplicity >= p.size - r.rank for r in roots)
    ge2 = []
    for r in roots:
        predicted = r.rank < p.n or bool(r.base_point)
        ge2.append(predicted == (r.multiplicity >= 2))
    exact2 = []
    for r in roots:
        if r.rank == p.n and r.base_point:
            exact2.append(r.bordered_nonzero == (r.multiplicity == 2))
    return {
        "total_is_n_plus_1": {"pass": total == p.size, "total": total},
        "multiplicity_lower_bound": {"pass": bound_ok},
        "double_root_iff_vertex_condition": {"pass": all(ge2), "checked": len(ge2)},
        "exactly_double_iff_bordered": {"pass": all(exact2), "checked": len(exact2)},
    }


# ---------------------------------------------------------------------------
# generic corank and vertices


def generic_corank(p: Pencil) -> tuple[int, list[list[UPoly]]]:
    """Corank of A + tB over Q(t) and a polynomial kernel basis (content removed)."""
    M = p.poly_matrix()
    rk, _, _, _ = ex.ff_echelon(M)
    r = p.size - rk
    if r == 0:
        return 0, []
    basis = ex.poly_kernel(M)
    if r == 1:
        basis = [ex.remove_content(basis[0])]
    return r, basis


@dataclass
class VertexAnalysis:
    r: int
    m: int
    degree: int
    kernel: list
    span_basis: list
    bounds_ok: bool
    degree_ok: bool

    def to_json(self) -> dict:
        return {
            "generic_corank": self.r,
            "span_dim": self.m,
            "vertex_degree": self.degree,
            "vertex_curve": [[v.to_str() for v in vec] for vec in self.kernel],
            "bounds_ok": self.bounds_ok,
            "degree_ok": self.degree_ok,
        }


def vertex_analysis(p: Pencil) -> VertexAnalysis:
    r, kernel = generic_corank(p)
    if r == 0:
        raise InvalidInput("general member is nonsingular; no vertex to analyse")
    coeff_rows = [row for vec in kernel for row in ex.coefficient_vectors(vec)]
    span_rref, piv = ex.rref(coeff_rows)
    span_basis = [row for row in span_rref[: len(piv)]]
    m = len(piv) - 1
    pl = ex.remove_content(ex.maximal_minors(kernel))
    degree = max(q.deg for q in pl)
    if degree == 0:
        raise ConstantVertex("the vertex of the general member does not move")
    bounds_ok = r <= m and 2 * m <= p.n + r - 1
    return VertexAnalysis(r, m, degree, kernel, span_basis, bounds_ok, degree == m - r + 1)


def segre_intersection_bound(p: Pencil) -> dict:
    """s = projective dimension of ker A cap ker B, with the check 3r <= n + 2s + 3."""
    r, _ = generic_corank(p)
    joint = ex.nullspace([list(row) for row in p.A] + [list(row) for row in p.B])
    s = len(joint) - 1
    return {"s": s, "r": r, "pass": 3 * r <= p.n + 2 * s + 3}


@dataclass
class LowerRankResult:
    count_restriction: int
    count_minors: int
    expected: int
    meetings: int
    weights: list
    attempts: int
    seed: int
    restricted_disc: BinaryForm

    @property
    def ok(self) -> bool:
        return self.count_restriction == self.expected == self.count_minors

    def to_json(self) -> dict:
        return {
            "count_restriction": self.count_restriction,
            "count_minors": self.count_minors,
            "expected": self.expected,
            "vertex_meetings": self.meetings,
            "weights": self.weights,
            "attempts": self.attempts,
            "seed": self.seed,
            "restricted_discriminant": self.restricted_disc.to_str(),
        }


def _random_subspace(rng: random.Random, rows: int, cols: int):
    return [[Fraction(rng.randint(-5, 5)) for _ in range(cols)] for _ in range(rows)]


def _member_rank(p: Pencil, factor: UPoly | None) -> int:
    return ex.rank(_member_at(p, factor)[0])


def lower_rank_count(p: Pencil, seed: int = 0, max_attempts: int = 10) -> LowerRankResult:
    """Count members of rank below the generic one, by restriction and by minors."""
    va = vertex_analysis(p)
    r, m = va.r, va.m
    generic = p.size - r
    expected = p.n + r - 2 * m - 1
    rng = random.Random(seed)
    for attempt in range(1, max_attempts + 1):
        W = _random_subspace(rng, p.size, p.n - r + 1)
        if ex.rank(W) < p.n - r + 1:
            continue
        sub = p.restrict(W)
        disc = discriminant(sub)
        if disc.is_zero():
            continue
        roots = []
        if disc.multiplicity_at_infinity():
            roots.append((None, disc.multiplicity_at_infinity()))
        roots.extend(ex.factor(disc.dehomogenize()))
        meetings = 0
        weights = []
        transversal = True
        for fac, mult in roots:
            rk = _member_rank(p, fac)
            deg = 1 if fac is None else fac.deg
            if rk == generic:
                if mult != 2:
                    transversal = False
                meetings += deg
            else:
                weights.append({
                    "factor": RootInfo(fac, mult, rk, p.size - rk).label(),
                    "degree": deg,
                    "weight": mult,
                    "rank": rk,
                    "lower_bound": generic - rk,
                })
        if not transversal:
            continue
        count = sum(w["weight"] * w["degree"] for w in weights)
        return LowerRankResult(
            count, _lower_rank_by_minors(p, generic), expected, meetings, weights, attempt, seed, disc
        )
    raise UnluckySubspace(f"no transversal restriction found in {max_attempts} attempts (seed {seed})")


def _lower_rank_by_minors(p: Pencil, generic: int) -> int:
    """Sum of (generic - rank) over members whose k x k minors all vanish, k = generic rank."""
    M = p.lambda_matrix()
    minors = []
    idx = range(p.size)
    for rows in combinations(idx, generic):
        for cols in combinations(idx, generic):
            minors.append(ex.bareiss_det([[M[i][j] for j in cols] for i in rows]))
    g = ex.poly_gcd_many(minors)
    count = 0
    for fac, _ in ex.factor(g) if g.deg > 0 else []:
        count += fac.deg * (generic - _member_rank(p, fac))
    rkA = ex.rank(p.A)
    if rkA < generic:
        count += generic - rkA
    return count


@dataclass
class TangencyCriterion:
    holds: bool
    pi_in_base_locus: bool
    common_tangent_dim: int | None
    expected_dim: int | None
    pointwise_rank: int | None

    def to_json(self) -> dict:
        return dict(self.__dict__)


def tangency_criterion(p: Pencil, seed: int = 0) -> TangencyCriterion:
    """Base locus contains the span of the vertices, with a common tangent space."""
    r, _ = generic_corank(p)
    if r == 0:
        return TangencyCriterion(False, False, None, None, None)
    va = vertex_analysis(p)
    P = va.span_basis
    in_base = all(
        ex.dot(x, ex.matvec(M, y)) == 0 for M in (p.A, p.B) for x in P for y in P
    )
    rows = [ex.matvec(M, x) for M in (p.A, p.B) for x in P]
    dim = p.n - ex.rank(rows)
    expected = p.n + r - va.m - 1
    rng = random.Random(seed)
    coeffs = [Fraction(rng.randint(1, 9)) for _ in P]
    x = [sum((c * v[i] for c, v in zip(coeffs, P)), start=Fraction(0)) for i in range(p.size)]
    pointwise = ex.rank([ex.matvec(p.A, x), ex.matvec(p.B, x)])
    return TangencyCriterion(in_base and dim == expected, in_base, dim, expected, pointwise)


# ---------------------------------------------------------------------------
# pencils with a prescribed vertex curve


def _sym_index(size: int):
    return {(i, j): k for k, (i, j) in enumerate((i, j) for i in range(size) for j in range(i, size))}


def vertex_constraint_system(nu: Sequence[UPoly]):
    """Rows of the linear system (A + tB) nu(t) = 0 in the entries a_ij, b_ij (i <= j)."""
    size = len(nu)
    idx = _sym_index(size)
    N = len(idx)
    d = max(q.deg for q in nu)

    def coeff(q: UPoly, k: int) -> Fraction:
        return q.coeffs[k] if 0 <= k < len(q.coeffs) else Fraction(0)

    rows = []
    for k in range(d + 2):
        for i in range(size):
            row = [Fraction(0)] * (2 * N)
            for j in range(size):
                key = (min(i, j), max(i, j))
                row[idx[key]] += coeff(nu[j], k)
                row[N + idx[key]] += coeff(nu[j], k - 1)
            rows.append(row)
    return rows, idx


def prescribed_vertex_generator(nu: Sequence, seed: int = 0, max_attempts: int = 50) -> Pencil:
    """Random pencil whose general member is singular exactly along nu(t)."""
    nu = [UPoly.coerce(q) for q in nu]
    if all(q.is_zero() for q in nu) or ex.poly_gcd_many(nu).deg > 0:
        raise InvalidInput("vertex curve entries must be coprime polynomials")
    size = len(nu)
    rows, idx = vertex_constraint_system(nu)
    basis = ex.nullspace(rows, 2 * len(idx))
    if not basis:
        raise EmptySolutionSpace("only the zero pencil has this vertex curve")
    rng = random.Random(seed)
    target = ex.remove_content(nu)
    for _ in range(max_attempts):
        c = [Fraction(rng.randint(-3, 3)) for _ in basis]
        x = [sum((ci * v[k] for ci, v in zip(c, basis)), start=Fraction(0)) for k in range(2 * len(idx))]
        A = [[Fraction(0)] * size for _ in range(size)]
        B = [[Fraction(0)] * size for _ in range(size)]
        for (i, j), k in idx.items():
            A[i][j] = A[j][i] = x[k]
            B[i][j] = B[j][i] = x[len(idx) + k]
        flatA = [v for row in A for v in row]
        flatB = [v for row in B for v in row]
        if ex.rank([flatA, flatB]) < 2:
            continue
        pencil = Pencil(size - 1, A, B)
        r, kernel = generic_corank(pencil)
        if r != 1:
            continue
        if kernel[0] != target:
            continue
        return pencil
    raise EmptySolutionSpace(
        f"no pencil with corank 1 and vertex curve nu found in {max_attempts} samples (seed {seed})"
    )


def parse_vertex(text: str) -> list[UPoly]:
    """Parse "1,t,t^2,0,0" into polynomial entries."""
    import sympy

    t = sympy.Symbol("t")
    out = []
    for part in text.split(","):
        try:
            expr = sympy.sympify(part.strip().replace("^", "**"), locals={"t": t})
            poly = sympy.Poly(expr, t)
        except (sympy.SympifyError, sympy.PolynomialError, TypeError) as e:
            raise InvalidInput(f"cannot parse vertex entry {part!r}") from e
        cs = poly.all_coeffs()[::-1]
        if any(not c.is_Rational for c in cs):
            raise InvalidInput(f"vertex entry {part!r} is not a rational polynomial in t")
        out.append(UPoly(tuple(Fraction(int(c.p), int(c.q)) for c in cs)))
    return out


# ---------------------------------------------------------------------------
# full report


@dataclass
class PencilReport:
    pencil: Pencil
    disc: BinaryForm
    disc_zero: bool
    roots: list = field(default_factory=list)
    generic_corank: int = 0
    vertex: VertexAnalysis | None = None
    lower_rank: LowerRankResult | None = None
    intersection: dict | None = None
    tangency: TangencyCriterion | None = None
    segre_checks: dict = field(default_factory=dict)
    seed: int = 0

    def to_json(self) -> dict:
        out = {
            "pencil": self.pencil.to_json(),
            "disc": [_q(c) for c in self.disc.coeffs],
            "disc_str": self.disc.to_str(),
            "disc_zero": self.disc_zero,
            "roots": [r.to_json() for r in self.roots],
            "generic_corank": self.generic_corank,
            "segre_checks": self.segre_checks,
            "seed": self.seed,
        }
        if self.vertex is not None:
            out.update(self.vertex.to_json())
        if self.lower_rank is not None:
            out["lower_rank"] = self.lower_rank.to_json()
            out["lower_rank_count"] = self.lower_rank.count_restriction
        if self.intersection is not None:
            out["joint_kernel"] = self.intersection
        if self.tangency is not None:
            out["tangency_criterion"] = self.tangency.to_json()
        return out


def analyze(p: Pencil, seed: int = 0) -> PencilReport:
    disc = discriminant(p)
    rep = PencilReport(p, disc, disc.is_zero(), seed=seed)
    checks = rep.segre_checks
    if not rep.disc_zero:
        rep.roots = singular_members(p)
        checks.update(multiplicity_clauses(p, rep.roots))
    r, _ = generic_corank(p)
    rep.generic_corank = r
    if r == 0:
        rep.tangency = tangency_criterion(p, seed)
        checks["corollary"] = {"pass": not rep.tangency.holds and r == 0, "r": 0}
        return rep
    try:
        rep.vertex = vertex_analysis(p)
    except ConstantVertex as e:
        checks["vertex_moves"] = {"pass": False, "reason": str(e)}
        rep.intersection = segre_intersection_bound(p)
        checks["joint_kernel_bound"] = {"pass": rep.intersection["pass"], **rep.intersection}
        return rep
    va = rep.vertex
    checks["span_bounds"] = {"pass": va.bounds_ok, "r": r, "m": va.m, "n": p.n}
    checks["minimal_degree"] = {"pass": va.degree_ok, "degree": va.degree, "m_minus_r_plus_1": va.m - r + 1}
    rep.intersection = segre_intersection_bound(p)
    checks["joint_kernel_bound"] = {"pass": rep.intersection["pass"], **rep.intersection}
    rep.lower_rank = lower_rank_count(p, seed)
    lr = rep.lower_rank
    checks["lower_rank_count"] = {
        "pass": lr.ok and all(w["weight"] >= w["lower_bound"] for w in lr.weights),
        "restriction": lr.count_restriction,
        "minors": lr.count_minors,
        "expected": lr.expected,
    }
    rep.tangency = tangency_criterion(p, seed)
    checks["corollary"] = {
        "pass": rep.tangency.holds,
        "common_tangent_dim": rep.tangency.common_tangent_dim,
        "expected": rep.tangency.expected_dim,
    }
    return rep
