import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from thetasing import exact as ex
from thetasing import pencils as pc
from thetasing.errors import ConstantVertex, DegeneratePencil, EmptySolutionSpace, InvalidInput
from thetasing.fixtures import base_point_pencil, diag_pencil, vertex_curve, x0_pencil, x0_pencil_p3

lam, mu = sympy.symbols("lambda mu")


def sympy_disc(p):
    A = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in p.A])
    B = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in p.B])
    return sympy.expand((lam * A + mu * B).det())


def as_sympy(form):
    return sympy.expand(sum(sympy.Rational(c.numerator, c.denominator) * lam**k * mu ** (form.degree - k)
                            for k, c in enumerate(form.coeffs)))


def test_discriminant_fixtures():
    assert as_sympy(pc.discriminant(diag_pencil())) == sympy.expand((lam + mu) * (lam + 2 * mu) * (lam + 3 * mu))
    assert as_sympy(pc.discriminant(base_point_pencil())) == -mu**3
    assert pc.discriminant(x0_pencil()).is_zero()


def test_diag_roots():
    roots = pc.singular_members(diag_pencil())
    assert len(roots) == 3
    assert all(r.multiplicity == 1 and r.rank == 2 for r in roots)


def test_base_point_pencil_clauses():
    p = base_point_pencil()
    (root,) = pc.singular_members(p)
    assert root.factor is None and root.multiplicity == 3 and root.rank == 2
    assert root.base_point is True
    assert root.other_smooth_at_vertex is True
    assert root.bordered_nonzero is False
    clauses = pc.multiplicity_clauses(p, [root])
    assert all(c["pass"] for c in clauses.values())


def test_degenerate_pencil_rejected():
    with pytest.raises(DegeneratePencil):
        pc.singular_members(x0_pencil())


def test_generic_corank_fixtures():
    assert pc.generic_corank(diag_pencil())[0] == 0
    r, (v,) = pc.generic_corank(x0_pencil())
    assert r == 1
    assert [q.coeffs for q in v] in ([(), (0, -1), (1,)], [(), (0, 1), (-1,)])
    assert pc.generic_corank(x0_pencil_p3())[0] == 2


def test_vertex_analysis_fixtures():
    va = pc.vertex_analysis(x0_pencil())
    assert (va.r, va.m, va.degree, va.degree_ok, va.bounds_ok) == (1, 1, 1, True, True)
    va = pc.vertex_analysis(x0_pencil_p3())
    assert (va.r, va.m, va.degree, va.degree_ok, va.bounds_ok) == (2, 2, 1, True, True)


def test_constant_vertex():
    A = [[0, 0, 0], [0, 1, 0], [0, 0, 1]]
    B = [[0, 0, 0], [0, 1, 0], [0, 0, 2]]
    with pytest.raises(ConstantVertex):
        pc.vertex_analysis(pc.Pencil(2, A, B))


def test_generator_conic():
    p = pc.prescribed_vertex_generator(vertex_curve([1], [0, 1], [0, 0, 1], [0], [0]), seed=7)
    va = pc.vertex_analysis(p)
    assert (va.m, va.degree) == (2, 2)
    lr = pc.lower_rank_count(p, seed=7)
    assert lr.count_restriction == lr.count_minors == lr.expected == 0
    tc = pc.tangency_criterion(p)
    assert tc.holds and tc.common_tangent_dim == 2


def test_generator_line():
    p = pc.prescribed_vertex_generator(vertex_curve([1], [0, 1], [0], [0], [0]), seed=7)
    va = pc.vertex_analysis(p)
    assert (va.m, va.degree) == (1, 1)
    lr = pc.lower_rank_count(p, seed=7)
    assert lr.count_restriction == lr.count_minors == lr.expected == 2
    assert all(w["weight"] >= w["lower_bound"] for w in lr.weights)


def test_generator_impossible_curve():
    with pytest.raises(EmptySolutionSpace):
        pc.prescribed_vertex_generator(pc.parse_vertex("1,t,t^2"))


def test_generator_rejects_common_factor():
    with pytest.raises(InvalidInput):
        pc.prescribed_vertex_generator(pc.parse_vertex("t,t^2,0"))


def test_x0_report():
    rep = pc.analyze(x0_pencil())
    assert rep.disc_zero and rep.generic_corank == 1
    assert rep.intersection["s"] == -1
    assert rep.lower_rank.count_restriction == 0
    assert rep.tangency.common_tangent_dim == 1
    assert all(c["pass"] for c in rep.segre_checks.values())


def test_p3_report():
    rep = pc.analyze(x0_pencil_p3())
    assert rep.intersection["s"] == 0
    assert rep.tangency.common_tangent_dim == 2
    assert all(c["pass"] for c in rep.segre_checks.values())


def test_json_round_trip():
    p = pc.prescribed_vertex_generator(vertex_curve([1], [0, 1], [0], [0], [0]), seed=3)
    assert pc.Pencil.from_json(p.to_json()) == p


def test_bad_json():
    with pytest.raises(InvalidInput):
        pc.Pencil.from_json({"n": 1, "A": [["1", "2"], ["3", "1"]], "B": [["0", "0"], ["0", "1"]]})


entries = st.integers(-4, 4)


@st.composite
def pencils(draw, n_max=3):
    n = draw(st.integers(1, n_max))
    size = n + 1

    def sym():
        M = [[0] * size for _ in range(size)]
        for i in range(size):
            for j in range(i, size):
                M[i][j] = M[j][i] = draw(entries)
        return M

    A, B = sym(), sym()
    if all(x == 0 for row in A + B for x in row):
        A[0][0] = 1
    return pc.Pencil(n, A, B)


@given(pencils())
def test_discriminant_matches_sympy(p):
    assert as_sympy(pc.discriminant(p)) == sympy_disc(p)


@given(pencils())
def test_root_multiplicities(p):
    disc = pc.discriminant(p)
    if disc.is_zero():
        return
    roots = pc.singular_members(p)
    assert sum(r.multiplicity * r.degree for r in roots) == p.size
    assert all(r.multiplicity >= p.size - r.rank for r in roots)
    assert all(c["pass"] for c in pc.multiplicity_clauses(p, roots).values())


def _vertex_base_point_fixture(rng: random.Random, n: int) -> pc.Pencil:
    """A with vertex e0 in new coordinates, e0 a base point of B, then a random change of basis."""
    size = n + 1
    A0 = [[Fraction(0)] * size for _ in range(size)]
    for i in range(1, size):
        A0[i][i] = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]))
    B0 = [[Fraction(0)] * size for _ in range(size)]
    for i in range(size):
        for j in range(i, size):
            if (i, j) != (0, 0):
                B0[i][j] = B0[j][i] = Fraction(rng.randint(-3, 3))
    while True:
        P = [[Fraction(rng.randint(-2, 2)) for _ in range(size)] for _ in range(size)]
        if ex.det(P) != 0:
            break
    Pt = ex.transpose(P)
    return pc.Pencil(n, ex.matmul(ex.matmul(Pt, A0), P), ex.matmul(ex.matmul(Pt, B0), P))


@pytest.mark.parametrize("k", range(30))
def test_vertex_base_point_forces_double_root(k):
    rng = random.Random(100 + k)
    p = _vertex_base_point_fixture(rng, rng.randint(2, 3))
    if pc.discriminant(p).is_zero():
        return
    roots = pc.singular_members(p)
    (at_a,) = [r for r in roots if r.factor is None]
    assert at_a.base_point is True
    assert at_a.multiplicity >= 2
    if at_a.rank == p.n:
        assert (at_a.multiplicity == 2) == at_a.bordered_nonzero
    assert all(c["pass"] for c in pc.multiplicity_clauses(p, roots).values())


@settings(max_examples=10)
@given(st.sampled_from(["1,t,0,0,0", "1,t,t^2,0,0", "0,-t,1", "1,t,0,0", "t,1,0,0,0"]), st.integers(0, 20))
def test_generator_kernel_is_prescribed(text, seed):
    nu = pc.parse_vertex(text)
    p = pc.prescribed_vertex_generator(nu, seed=seed)
    r, (v,) = pc.generic_corank(p)
    assert r == 1 and v == ex.remove_content(nu)
