import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from thetasing.errors import IndexOutOfRange, NotPositiveDefinite, NotSymmetric, OrderTooHigh
from thetasing.theta import (
    make_context,
    multi_indices,
    random_period_matrix,
    reduce_point,
    tau_derivative,
    theta_deriv,
)


def box_sum(tau, z, I=None, box=7):
    """Plain summation over a cube of lattice points, term by term."""
    g = len(z)
    I = I or (0,) * g
    total = 0j
    for m in itertools.product(range(-box, box + 1), repeat=g):
        q = sum(m[a] * tau[a][b] * m[b] for a in range(g) for b in range(g))
        lin = sum(m[a] * z[a] for a in range(g))
        mono = 1
        for a in range(g):
            mono *= m[a] ** I[a]
        total += mono * cmath.exp(1j * math.pi * q + 2j * math.pi * lin)
    return total * (2j * math.pi) ** sum(I)


def test_theta_at_i_closed_form():
    # theta_3(0, e^{-pi}) = pi^{1/4} / Gamma(3/4)
    ctx = make_context([[1j]])
    assert abs(ctx.value([0]) - math.pi ** 0.25 / math.gamma(0.75)) < 1e-14


def test_product_value_is_square():
    one = make_context([[1j]]).value([0])
    two = make_context(np.diag([1j, 1j])).value([0, 0])
    assert abs(two - one ** 2) < 1e-14
    assert abs(two - 1.1803405990160962) < 1e-14


@pytest.mark.parametrize("g", [1, 2, 3])
def test_against_box_summation(g):
    rng = np.random.default_rng(g)
    tau = random_period_matrix(g, rng)
    ctx = make_context(tau)
    z = rng.uniform(-0.5, 0.5, g) + 1j * rng.uniform(-0.4, 0.4, g)
    box = 5 if g == 3 else 7
    for I in [(0,) * g] + multi_indices(g, 2)[:2]:
        ref = box_sum(tau.tolist(), list(z), I, box)
        assert abs(theta_deriv(ctx, z, I) - ref) < 1e-10 * max(1, abs(ref))


def test_direct_sum_factorises():
    rng = np.random.default_rng(5)
    t1, t2 = random_period_matrix(1, rng), random_period_matrix(2, rng)
    tau = np.zeros((3, 3), dtype=complex)
    tau[:1, :1], tau[1:, 1:] = t1, t2
    c, c1, c2 = make_context(tau), make_context(t1), make_context(t2)
    for _ in range(5):
        z = rng.normal(size=3) + 0.3j * rng.normal(size=3)
        assert abs(c.value(z) - c1.value(z[:1]) * c2.value(z[1:])) < 1e-12
        d = c.derivatives(z, 2)
        assert abs(d[(1, 1, 0)] - c1.derivatives(z[:1], 1)[(1,)] * c2.derivatives(z[1:], 1)[(1, 0)]) < 1e-10


coord = st.floats(-1.5, 1.5, allow_nan=False)


@given(st.lists(coord, min_size=4, max_size=4))
def test_parity(xs):
    ctx = make_context(np.array([[0.2 + 1.1j, 0.35 + 0.3j], [0.35 + 0.3j, -0.1 + 0.95j]]))
    z = np.array([xs[0] + 0.4j * xs[1], xs[2] + 0.4j * xs[3]])
    a, b = ctx.derivatives(z, 3), ctx.derivatives(-z, 3)
    scale = max(1.0, max(abs(v) for v in a.values()))
    for I, v in a.items():
        assert abs(b[I] - (-1) ** sum(I) * v) < 1e-11 * scale


@given(st.lists(coord, min_size=4, max_size=4), st.lists(st.integers(-2, 2), min_size=4, max_size=4))
def test_quasi_periodicity(xs, shifts):
    tau = np.array([[0.2 + 1.1j, 0.35 + 0.3j], [0.35 + 0.3j, -0.1 + 0.95j]])
    ctx = make_context(tau)
    z = np.array([xs[0] + 0.3j * xs[1], xs[2] + 0.3j * xs[3]])
    m, n = np.array(shifts[:2]), np.array(shifts[2:])
    w = z + m + tau @ n
    lhs = ctx.value(w)
    rhs = np.exp(-1j * np.pi * n @ tau @ n - 2j * np.pi * n @ z) * ctx.value(z)
    assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(rhs))
    red = reduce_point(ctx, w)
    assert abs(np.exp(red.log_prefactor) * ctx.value(red.z0) - lhs) < 1e-10 * max(1.0, abs(lhs))


def test_reduce_point_example():
    red = reduce_point(make_context([[1j]]), [1j])
    assert red.n.tolist() == [1]
    assert abs(red.log_prefactor - math.pi) < 1e-14


@pytest.mark.parametrize("g", [1, 2, 3])
def test_heat_equation_finite_difference(g):
    rng = np.random.default_rng(10 + g)
    tau = random_period_matrix(g, rng)
    ctx = make_context(tau)
    z = rng.normal(size=g) * 0.3 + 0.2j * rng.normal(size=g)
    h = 1e-5
    for i in range(g):
        for j in range(i, g):
            E = np.zeros((g, g))
            E[i, j] = E[j, i] = 1
            fd = (make_context(tau + h * E).value(z) - make_context(tau - h * E).value(z)) / (2 * h)
            assert abs(tau_derivative(ctx, z, i, j) - fd) < 1e-6


def test_truncation_stable_under_tolerance():
    rng = np.random.default_rng(3)
    tau = random_period_matrix(3, rng)
    a, b = make_context(tau, 1e-8), make_context(tau, 1e-14)
    for _ in range(5):
        z = rng.normal(size=3) + 0.5j * rng.normal(size=3)
        da, db = a.derivatives(z, 3), b.derivatives(z, 3)
        for I in da:
            assert abs(da[I] - db[I]) < 1e-7 * max(1.0, abs(db[I]))


def test_batch_matches_scalar():
    rng = np.random.default_rng(4)
    ctx = make_context(random_period_matrix(2, rng))
    Z = rng.normal(size=(40, 2)) + 0.5j * rng.normal(size=(40, 2))
    batch = ctx.derivatives_batch(Z, 2)
    for k in range(0, 40, 7):
        d = ctx.derivatives(Z[k], 2)
        for I, v in d.items():
            assert abs(batch[I][k] - v) < 1e-11 * max(1.0, abs(v))


def test_validation_errors():
    with pytest.raises(NotPositiveDefinite):
        make_context([[1j, 3j], [3j, 1j]])
    with pytest.raises(NotSymmetric):
        make_context([[1j, 0.1], [0.2, 1j]])
    ctx = make_context([[1j]])
    with pytest.raises(OrderTooHigh):
        theta_deriv(ctx, [0], (7,))
    with pytest.raises(IndexOutOfRange):
        theta_deriv(ctx, [0], (1, 0))
    with pytest.raises(IndexOutOfRange):
        tau_derivative(ctx, [0], 0, 1)
