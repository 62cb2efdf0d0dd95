import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from thetasing.boundary import (
    ADOPTED_SIGN,
    TYPE_DEEP,
    TYPE_OFF,
    TYPE_PARTIAL,
    Rank1Data,
    Rank2Data,
    gen_theta_rank1,
    gen_theta_rank2,
    quadric_rank1,
    rank2_equations,
    rank_from_gradients,
    scan_rank1,
    scan_rank2,
    symmetric_offd_witness,
    vsing_classify_rank2,
    vsing_residual_rank1,
)
from thetasing.errors import InvalidInput, NotAVerticalSingularity, ZeroShift
from thetasing.fixtures import HALF, deep_rank2, indeterminate_rank1, triple_product_base
from thetasing.gauss import degeneracy_residual, sample_theta_divisor
from thetasing.theta import gradient, make_context, random_period_matrix


@pytest.fixture(scope="module")
def base2():
    return make_context(random_period_matrix(2, np.random.default_rng(1)))


@pytest.fixture(scope="module")
def xs(base2):
    return sample_theta_divisor(base2, np.random.default_rng(6), 10)


def test_elliptic_value_against_series():
    d = Rank1Data.make(make_context([[1j]]), [0.3])
    z, u = 0.17 + 0.05j, 0.4 - 1.2j

    def th(w):
        return sum(cmath.exp(1j * math.pi * m * m * 1j + 2j * math.pi * m * w) for m in range(-12, 13))

    assert abs(gen_theta_rank1(d, [z], u) - (th(z) + u * th(z - 0.3))) < 1e-13
    assert gen_theta_rank1(d, [z], 0) == d.base.value([z])


def test_zero_shift_rejected(base2):
    with pytest.raises(ZeroShift):
        Rank1Data.make(base2, [0, 0])
    with pytest.raises(ZeroShift):
        Rank2Data.make(base2, [0.1, 0.2], [-0.1, -0.2], 1)


def test_parity_witness_rank1(base2, xs):
    for x in xs:
        d = Rank1Data.make(base2, 2 * x)
        rec = vsing_residual_rank1(d, x, 1)
        assert rec.residual < 1e-9 and rec.location_type == TYPE_OFF
        Q = rec.quadric
        assert Q.mat.shape == (3, 3) and Q.mat[0, 0] == 0
        assert np.allclose(Q.mat[0, 1:], gradient(base2.derivatives(-x, 1), 2))
        assert np.linalg.norm(Q.mat[0, 1:]) > 1e-3


def test_quadric_requires_vertical_singularity(base2, xs):
    d = Rank1Data.make(base2, [0.3 + 0.1j, 0.2])
    with pytest.raises(NotAVerticalSingularity):
        quadric_rank1(d, xs[0], 1)


def test_on_d_point_over_product(prod2):
    d = Rank1Data.make(prod2, [0.31 + 0.2j, -0.14 + 0.05j])
    rec = vsing_residual_rank1(d, [HALF, HALF], 0)
    assert rec.residual < 1e-12 and rec.location_type == TYPE_PARTIAL
    assert rec.quadric.mat[0, 0] == 0 and not rec.quadric.mat[0, 1:].any()
    assert rec.corank >= 1


def test_indeterminate_quadric():
    d, z, u = indeterminate_rank1()
    rec = vsing_residual_rank1(d, z, u)
    assert rec.residual < 1e-12
    assert rec.quadric.indeterminate and rec.quadric.mat[0, 0] == 0


mods = st.floats(0.1, 10)
phases = st.floats(0, 2 * math.pi)
coords = st.floats(-0.5, 0.5)


@given(mods, phases, st.lists(coords, min_size=4, max_size=4))
def test_chart_symmetry(r, phi, c):
    base = make_context(random_period_matrix(2, np.random.default_rng(1)))
    omega = np.array([0.21 + 0.13j, -0.17 + 0.3j])
    z = np.array([c[0] + 1j * c[1], c[2] + 1j * c[3]])
    u = r * cmath.exp(1j * phi)
    a = vsing_residual_rank1(Rank1Data.make(base, omega), z, u, with_quadric=False)
    b = vsing_residual_rank1(Rank1Data.make(base, -omega), z - omega, 1 / u, with_quadric=False)
    assert abs(a.residual - b.residual) < 2e-8


def test_offd_equivalence_and_u_consistency(base2, xs):
    rng = np.random.default_rng(8)
    for x in xs:
        om = 2 * x
        dz = base2.derivatives(x, 1)
        dw = base2.derivatives(x - om, 1)
        ratios = [-dz[I] / dw[I] for I in [(1, 0), (0, 1)] if abs(dw[I]) > 1e-6]
        assert max(abs(a - b) for a in ratios for b in ratios) < 1e-6
        u = ratios[0]
        assert vsing_residual_rank1(Rank1Data.make(base2, om), x, u).residual < 1e-8
        assert degeneracy_residual(base2, x, [om]).residual < 1e-8
        # a shift away from 2x breaks both conditions together
        om2 = om + 0.2 * (rng.normal(size=2) + 1j * rng.normal(size=2))
        dw = base2.derivatives(x - om2, 1)
        u2 = -dz[(1, 0)] / dw[(1, 0)]
        assert vsing_residual_rank1(Rank1Data.make(base2, om2), x, u2).residual > 1e-8
        assert degeneracy_residual(base2, x, [om2]).residual > 1e-8


def test_elliptic_rank1_scan_empty(elliptic):
    for om in ([0.31 + 0.2j], [0.5], [0.13 + 0.55j]):
        scan = scan_rank1(Rank1Data.make(elliptic, om))
        assert scan.records == [] and scan.min_residual > 1e-6


def test_rank2_expansion(base2):
    rng = np.random.default_rng(9)
    for t in (0.7 - 0.2j, 0):
        d = Rank2Data.make(base2, [0.1 + 0.2j, 0.3], [-0.2 + 0.1j, 0.05j], t)
        z = rng.normal(size=2) * 0.3 + 0.2j * rng.normal(size=2)
        u1, u2 = complex(rng.normal(), rng.normal()), complex(rng.normal(), rng.normal())
        xi = base2.value
        terms = {(): 1, (1,): u1, (2,): u2, (1, 2): t * u1 * u2}
        shift = {(): 0, (1,): d.omega1, (2,): d.omega2, (1, 2): d.omega1 + d.omega2}
        ref = sum(c * xi(z - shift[I]) for I, c in terms.items())
        assert abs(gen_theta_rank2(d, z, u1, u2) - ref) < 1e-12
        assert gen_theta_rank2(d, z, 0, 0) == xi(z)
        eq = rank2_equations(d, z, u1, u2)
        assert abs(eq["E1"] + eq["E2"] + eq["E3"] - eq["f"]) < 1e-12


def test_rank2_partial_witness_both_signs(base2, xs):
    for x in xs[:5]:
        d = Rank2Data.make(base2, [0.23 + 0.11j, -0.3 + 0.2j], 2 * x, 0.6 + 0.3j)
        for sign in (-1, 1):
            rec = vsing_classify_rank2(d, x, 0, 1, sign)
            assert rec.residual < 1e-8 and rec.location_type == TYPE_PARTIAL and rec.aux_residual < 1e-8


def test_rank2_sign_choice(base2):
    z = np.array([0.1 + 0.2j, 0.3 - 0.1j])
    d, (u1, u2) = symmetric_offd_witness(base2, z, [0.2 + 0.1j, -0.1 + 0.3j])
    assert ADOPTED_SIGN == -1
    minus = vsing_classify_rank2(d, z, u1, u2, -1)
    plus = vsing_classify_rank2(d, z, u1, u2, 1)
    assert minus.residual < 1e-12 and minus.location_type == TYPE_OFF
    assert plus.residual > 1e-3
    with pytest.raises(InvalidInput):
        vsing_classify_rank2(d, z, u1, u2, 0)


def test_rank2_reduces_to_rank1(base2):
    rng = np.random.default_rng(10)
    d2 = Rank2Data.make(base2, [0.23 + 0.11j, -0.3 + 0.2j], [0.1 - 0.2j, 0.35j], 0.6 + 0.3j)
    d1 = Rank1Data.make(base2, d2.omega1)
    for _ in range(5):
        z = rng.normal(size=2) * 0.3 + 0.2j * rng.normal(size=2)
        u1 = complex(rng.normal(), rng.normal())
        r1 = vsing_residual_rank1(d1, z, u1, with_quadric=False).residual
        for u2 in (1e-2, 1e-4, 1e-6):
            r2 = vsing_classify_rank2(d2, z, u1, u2).residual
            assert abs(r2 - r1) < 50 * u2


def test_type_i_fixture():
    d, s1 = deep_rank2()
    rec = vsing_classify_rank2(d, s1, 0, 0)
    assert rec.location_type == TYPE_DEEP and rec.residual < 1e-12 and rec.aux_residual < 1e-12
    # with t = 0 the condition moves to z - omega_1 and z - omega_2, which are not singular here
    d0, _ = deep_rank2(0)
    assert vsing_classify_rank2(d0, s1, 0, 0).aux_residual > 1e-3


def test_type_i_fixture_degenerate_variant():
    base = triple_product_base()
    a, b, c = 0.3 + 0.1j, 0.05 + 0.2j, -0.2 + 0.35j
    s = np.array([HALF, HALF, a])
    d = Rank2Data.make(base, [0, 0, a - b], [0, 0, a - c], 0)
    rec = vsing_classify_rank2(d, s, 0, 0)
    assert rec.location_type == TYPE_DEEP and rec.residual < 1e-12 and rec.aux_residual < 1e-12


def test_type_iii_tangency_only_in_rank():
    # the gradients of the translates are dependent, but z itself is off the divisor
    base = make_context(random_period_matrix(3, np.random.default_rng(7)))
    z = np.array([0.1 + 0.2j, 0.3 - 0.1j, 0.05 + 0.1j])
    d, (u1, u2) = symmetric_offd_witness(base, z, [0.2 + 0.1j, -0.1 + 0.3j, 0.15j])
    assert vsing_classify_rank2(d, z, u1, u2).residual < 1e-12
    w = degeneracy_residual(base, z, [d.omega1, d.omega2])
    assert w.residual_rank < 1e-8 and rank_from_gradients(base, z, [d.omega1, d.omega2]) == 2
    assert w.residual_theta > 1e-3


@pytest.mark.parametrize("t", [0.7 + 0.2j, 0])
def test_elliptic_rank2_scan_empty(elliptic, t):
    scan = scan_rank2(Rank2Data.make(elliptic, [0.31 + 0.2j], [0.12 - 0.3j], t))
    assert scan.records == [] and scan.min_residual > 1e-6
