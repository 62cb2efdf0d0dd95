import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from thetasing import jets
from thetasing.errors import BasePointNotSingular, InvalidInput, ZeroLeadingCoefficient
from thetasing.jets import JetOperator, delta_expand, delta_recursive
from thetasing.polys import MPoly, PolynomialOracle, parse_poly

F = Fraction


def oracle(text, g=None):
    return PolynomialOracle(parse_poly(text, g))


def test_low_order_operators():
    assert delta_expand(1).terms == {(1,): 1}
    assert delta_expand(2).terms == {(2, 0): F(1, 2), (0, 1): 1}
    assert delta_expand(3).terms == {(3, 0, 0): F(1, 6), (1, 1, 0): 1, (0, 0, 1): 1}
    assert delta_expand(4).terms == {
        (4, 0, 0, 0): F(1, 24),
        (2, 1, 0, 0): F(1, 2),
        (0, 2, 0, 0): F(1, 2),
        (1, 0, 1, 0): 1,
        (0, 0, 0, 1): 1,
    }


@pytest.mark.parametrize("k", range(1, 9))
def test_expansion_matches_recursion(k):
    assert delta_expand(k) == delta_recursive(k)


@pytest.mark.parametrize("k", range(1, 13))
def test_top_exponent_at_most_one(k):
    assert all(h[-1] <= 1 for h in delta_expand(k).terms)
    assert all(sum(i * e for i, e in enumerate(h, 1)) == k for h in delta_expand(k).terms)


def test_out_of_range_k():
    with pytest.raises(InvalidInput):
        delta_expand(13)


def test_half_coefficient_on_mixed_term_breaks_leibniz():
    # D1 D2 with weight 1/2 in the order-3 operator is not a ring homomorphism
    ops = [delta_expand(r) for r in range(4)]
    bad = JetOperator(3, {**ops[3].terms, (1, 1, 0): F(1, 2)})
    z1, z2 = MPoly.var(2, 0), MPoly.var(2, 1)
    fields = [[1, 0], [0, 1], [0, 0]]
    assert jets.leibniz_check(3, z1, z2, fields)
    assert not jets.leibniz_check(3, z1, z2, fields, ops[:3] + [bad])


def test_leibniz_examples():
    z1, z2 = MPoly.var(2, 0), MPoly.var(2, 1)
    assert jets.leibniz_check(1, z1 * z1 + z2, z2 * z2 * z1, [[F(2), F(-1)]])
    fields = [[F(1, 2), F(3)], [F(-2), F(1, 3)], [F(5), F(1)]]
    assert jets.leibniz_check(3, z1 * z1, z2, fields)
    ops = [delta_expand(0), delta_expand(1), JetOperator(2, {(2, 0): F(1, 3), (0, 1): 1})]
    assert not jets.leibniz_check(2, z1, z1, [[1, 0], [0, 0]], ops)


small = st.fractions(min_value=-3, max_value=3, max_denominator=3)


@st.composite
def polys(draw, g):
    n = draw(st.integers(1, 4))
    d = {}
    for _ in range(n):
        e = tuple(draw(st.integers(0, 3)) for _ in range(g))
        d[e] = draw(small)
    return MPoly.from_dict(g, d)


@st.composite
def leibniz_cases(draw):
    g = draw(st.integers(1, 3))
    k = draw(st.integers(1, 5))
    fields = [[draw(small) for _ in range(g)] for _ in range(k)]
    return k, draw(polys(g)), draw(polys(g)), fields


@settings(max_examples=50)
@given(leibniz_cases())
def test_leibniz_random(case):
    k, f, g, fields = case
    assert jets.leibniz_check(k, f, g, fields)


@given(st.integers(1, 8), st.lists(small, min_size=2, max_size=2), st.lists(st.lists(small, min_size=2, max_size=2), min_size=1, max_size=8))
def test_generating_function(k, lam, fields):
    assert jets.generating_function_check(k, lam, fields)


# ---------------------------------------------------------------------------
# reparametrisation


def test_reparametrize_identity_and_scaling():
    fields = [[F(1), F(2)], [F(-1), F(3)], [F(0), F(1)]]
    rep = jets.reparametrize(fields, [1, 0, 0])
    assert rep.composed == fields
    # the literal powers c_j^(i-j+1) put c_1^i D_1 into every new field
    assert rep.literal == [fields[0]] * 3 and rep.agree is False
    rep = jets.reparametrize([[F(1), F(2)]], [F(5)])
    assert rep.literal == [[5, 10]] and rep.agree
    with pytest.raises(ZeroLeadingCoefficient):
        jets.reparametrize(fields, [0, 1, 0])


def test_reparametrize_reports_discrepancy():
    fields = [[F(1), F(2)], [F(-1), F(3)]]
    rep = jets.reparametrize(fields, [2, 3])
    assert rep.literal[1] == [1, 17]
    assert rep.composed[1] == [-1, 18]
    assert rep.agree is False
    assert rep.discrepancy == [[0, 0], [2, -1]]


@given(st.lists(st.lists(small, min_size=2, max_size=2), min_size=3, max_size=3),
       st.lists(small, min_size=3, max_size=3).filter(lambda c: c[0] != 0))
def test_composed_fields_reproduce_composed_jet(fields, c):
    rep = jets.reparametrize(fields, c)
    for k in range(1, 4):
        lhs = jets.operator_symbol(delta_expand(k), rep.composed, 2)
        assert lhs == jets.composed_operator_symbol(fields, c, k, 2)


# ---------------------------------------------------------------------------
# residuals


def test_single_field_examples():
    o = oracle("z1^2", 2)
    assert jets.curvilinear_vectors(o, [0, 0], [[0, 1]]) == [[0, 0]]
    assert jets.curvilinear_vectors(o, [0, 0], [[1, 0]]) == [[2, 0]]
    assert jets.curvilinear_residuals(o, [0, 0], [[1, 0]]) == [1.0]
    with pytest.raises(BasePointNotSingular):
        jets.curvilinear_residuals(o, [1, 0], [[1, 0]])


def test_family_tangent_residuals(prod3):
    h = (1 + 1j) / 2
    z0 = np.array([h, h, 0.3 + 0.1j])
    res = jets.curvilinear_residuals(prod3, z0, [[0, 0, 1], [0, 0, 0], [0, 0, 0]])
    assert max(res) < 1e-8
    off = jets.curvilinear_residuals(prod3, z0, [[1, 0, 0]])
    assert off[0] > 1e-2


def test_constant_field_examples():
    assert jets.constant_field_vectors(oracle("z1^2", 2), [0, 0], [0, 1], 3) == [[0, 0]] * 3
    v = jets.constant_field_vectors(oracle("z1^2 + z2^3"), [0, 0], [0, 1], 2)
    assert v == [[0, 0], [0, 6]]


def test_jet_extend_examples():
    ext = jets.jet_extend(oracle("z1^2", 2), [0, 0], [[0, 1]])
    assert ext is not None and np.allclose(ext.eta, 0)
    ext = jets.jet_extend(oracle("z1^2 + z2^4"), [0, 0], [[0, 1]])
    assert ext is not None and np.allclose(ext.eta, 0) and ext.residual == 0
    assert jets.jet_extend(oracle("z1^2 + z2^3"), [0, 0], [[0, 1]]) is None
    with pytest.raises(InvalidInput):
        jets.jet_extend(oracle("z1^2 + z2^3"), [0, 0], [[1, 0]])


def test_jet_extend_solution_satisfies_next_order():
    o = oracle("z1^2 + z1*z2^2 + z2^4")
    ext = jets.jet_extend(o, [0, 0], [[0, 1]])
    assert ext is not None
    fields = [[0, 1], list(ext.eta)]
    assert max(jets.curvilinear_residuals(o, [0, 0], fields)) < 1e-12


def jet_series_vectors(poly: MPoly, z0, fields, N):
    """Independent route: [t^k] d_j f(z0 + sum_i eta_i t^i), via sympy."""
    t = sympy.Symbol("t")
    zs = sympy.symbols(f"z1:{poly.g + 1}")
    f = poly.to_sympy(zs)
    path = {zs[l]: z0[l] + sum(sympy.Rational(fields[i][l]) * t ** (i + 1) for i in range(N)) for l in range(poly.g)}
    out = []
    for k in range(1, N + 1):
        row = []
        for j in range(poly.g):
            series = sympy.expand(sympy.diff(f, zs[j]).subs(path, simultaneous=True))
            c = series.coeff(t, k)
            row.append(Fraction(int(c.p), int(c.q)))
        out.append(row)
    return out


@st.composite
def singular_polys(draw):
    """h(z - z0) with every monomial of h of degree at least 2."""
    g = draw(st.integers(1, 3))
    d = {}
    for _ in range(draw(st.integers(1, 4))):
        e = [draw(st.integers(0, 4)) for _ in range(g)]
        while sum(e) < 2:
            e[draw(st.integers(0, g - 1))] += 1
        while sum(e) > 4:
            e[e.index(max(e))] -= 1
        d[tuple(e)] = draw(small.filter(lambda x: x != 0))
    h = MPoly.from_dict(g, d)
    z0 = [draw(st.integers(-2, 2)) for _ in range(g)]
    shifted = sympy.expand(h.to_sympy(sympy.symbols(f"z1:{g + 1}")).subs(
        {s: s - c for s, c in zip(sympy.symbols(f"z1:{g + 1}"), z0)}, simultaneous=True))
    return MPoly.from_sympy(shifted, sympy.symbols(f"z1:{g + 1}")), z0


@settings(max_examples=15)
@given(singular_polys(), st.data())
def test_residuals_match_jet_series(case, data):
    poly, z0 = case
    fields = [[data.draw(small) for _ in range(poly.g)] for _ in range(3)]
    vecs = jets.curvilinear_vectors(PolynomialOracle(poly), z0, fields)
    assert vecs == jet_series_vectors(poly, z0, fields, 3)


def test_low_order_conditions_written_out():
    # order 1: eta1.M, order 2: 1/2 eta1.d_eta1 M + eta2.M, order 3 with weight 1 on eta2.d_eta1 M
    poly = parse_poly("z1^2*z2 + z2^3 - 2*z1*z2*z3 + z3^4 + z1^2")
    o = PolynomialOracle(poly)
    e1, e2, e3 = [F(1), F(2), F(-1)], [F(0), F(1, 2), F(3)], [F(2), F(0), F(1)]
    vecs = jets.curvilinear_vectors(o, [0, 0, 0], [e1, e2, e3])
    d = o.derivatives([0, 0, 0], 4)
    c = lambda vs, j: jets.contract(d, 3, vs, j)  # noqa: E731
    a1 = [c([e1], j) for j in range(3)]
    a2 = [F(1, 2) * c([e1, e1], j) + c([e2], j) for j in range(3)]
    a3 = [F(1, 6) * c([e1, e1, e1], j) + c([e2, e1], j) + c([e3], j) for j in range(3)]
    assert vecs == [a1, a2, a3]


@given(st.integers(1, 4), st.lists(st.integers(-2, 2), min_size=2, max_size=2))
def test_constant_field_relation(k, b):
    o = oracle("z1^2*z2 + z2^4 - z1^3 + 3*z1*z2^3 + z1^2")
    cf = jets.constant_field_vectors(o, [0, 0], b, k)
    cv = jets.curvilinear_vectors(o, [0, 0], [b] + [[0, 0]] * (k - 1))
    for j in range(k):
        assert cf[j] == [math.factorial(j + 1) * x for x in cv[j]]
