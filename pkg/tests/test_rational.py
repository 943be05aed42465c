import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from swisscheese.geometry import generate_cheese
from swisscheese.rational import (
    NO_POLES,
    GenerationError,
    PoleEvaluationError,
    Polynomial,
    RationalFunction,
    add,
    derivative,
    evaluate,
    multiply,
    pole_clearance,
    poly_eval,
    poly_from_roots,
    random_member,
    scale,
)

RF = RationalFunction


def sample_points(k=32, seed=0):
    rng = np.random.default_rng(seed)
    return rng.uniform(-1.1, 1.1, k) + 1j * rng.uniform(-1.1, 1.1, k)


def test_evaluate_examples():
    f = RF.from_parts([1], [(0.5, 1)])
    assert evaluate(f, 1.5) == pytest.approx(1.0)
    g = RF.from_parts([0, 0, 1], [(2, 2)])
    assert evaluate(g, 1j) == pytest.approx(-1 / (1j - 2) ** 2)
    assert evaluate(RF.monomial(-3), 2.0) == pytest.approx(0.125)


def test_evaluate_vectorized_and_scalar():
    f = RF.from_parts([1, 2], [(0.3j, 1)])
    z = sample_points()
    vec = f(z)
    assert vec.shape == z.shape
    for zi, vi in zip(z, vec):
        assert f(complex(zi)) == vi


def test_pole_guard():
    f = RF.from_parts([1], [(0.25, 1)])
    with pytest.raises(PoleEvaluationError):
        f(0.25)
    with pytest.raises(ZeroDivisionError):
        f(np.array([0.0, 0.25 + 1e-14]))


def test_zero_function():
    z = RF.polynomial([])
    assert z.is_zero
    assert np.all(z(sample_points()) == 0)
    assert derivative(z).is_zero
    assert scale(RF.monomial(2), 0).is_zero


def test_rejects_repeated_poles_and_bad_multiplicity():
    with pytest.raises(ValueError):
        RF.from_parts([1], [(0.1, 1), (0.1, 2)])
    with pytest.raises(ValueError):
        RF.from_parts([1], [(0.1, 0)])


def test_numerator_trimmed():
    assert Polynomial((1, 2, 0, 0)).coefficients == (1, 2)
    assert Polynomial((1, 2, 0)).degree == 1


def _mp_value(f, z):
    """Independent evaluation at the caller's working precision."""
    z = mpmath.mpc(z)
    num = mpmath.polyval([mpmath.mpc(c) for c in reversed(f.num)], z) if f.num else 0
    den = mpmath.mpc(1)
    for a, m in f.factors:
        den *= (z - mpmath.mpc(a)) ** m
    return num / den


def _mp_derivative(f, z):
    # analytic, so the derivative along the real direction is f'(z)
    with mpmath.workdps(40):
        z = mpmath.mpc(z)
        return complex(mpmath.diff(lambda t: _mp_value(f, z + t), 0))


CASES = [
    RF.from_parts([1, -2, 0.5j], [(0.2 + 0.1j, 1), (1.7, 2)]),
    RF.from_parts([0.3, 1j], [(-0.4j, 3)]),
    RF.monomial(5),
    RF.monomial(-4, 2 - 1j),
    RF.from_parts([1], [(0.5, 1), (-0.5, 1), (0.5j, 2)]),
]


@pytest.mark.parametrize("f", CASES)
def test_derivative_matches_finite_difference(f):
    z = sample_points(32, 1)
    z = z[np.min([np.abs(z - a) for a in f.poles] or [np.ones_like(z)], axis=0) > 0.1]
    h = 1e-6
    fd = (f(z + h) - f(z - h)) / (2 * h)
    exact = derivative(f)(z)
    assert np.all(np.abs(exact - fd) <= 1e-6 * (1 + np.abs(exact)))


@pytest.mark.parametrize("f", CASES)
def test_derivative_matches_high_precision(f):
    df = derivative(f)
    for z in (0.9 + 0.3j, -0.7j, 1.3 - 0.2j):
        assert df(z) == pytest.approx(_mp_derivative(f, z), rel=1e-12, abs=1e-12)


def test_derivative_multiplicities():
    f = RF.from_parts([1], [(0.5, 2), (-0.5j, 1)])
    df = derivative(f)
    assert dict(df.factors) == {0.5: 3, -0.5j: 2}
    assert derivative(RF.polynomial([3, 2, 1])).factors == ()
    assert derivative(RF.polynomial([3, 2, 1])).num == (2, 2)


def test_multiply_add_pointwise():
    z = sample_points(32, 2)
    for f in CASES:
        for g in CASES:
            assert np.allclose(multiply(f, g)(z), f(z) * g(z), rtol=1e-12, atol=1e-12)
            assert np.allclose(add(f, g)(z), f(z) + g(z), rtol=1e-12, atol=1e-12)


def test_add_uses_least_common_denominator():
    f = RF.from_parts([1], [(0.5, 2)])
    g = RF.from_parts([1], [(0.5, 1), (0.1, 1)])
    assert dict(add(f, g).factors) == {0.5: 2, 0.1: 1}
    assert dict(multiply(f, g).factors) == {0.5: 3, 0.1: 1}


def test_operators():
    f, g = CASES[0], CASES[1]
    z = sample_points(8, 3)
    assert np.allclose((f + g)(z), add(f, g)(z))
    assert np.allclose((f * g)(z), multiply(f, g)(z))
    assert f.derivative() == derivative(f)


def test_derivative_linearity_and_product_rule():
    z = sample_points(32, 4)
    f, g = CASES[0], CASES[4]
    c = 0.7 - 1.3j
    lin = derivative(add(scale(f, c), g))(z)
    assert np.allclose(lin, c * derivative(f)(z) + derivative(g)(z), rtol=1e-12, atol=1e-12)
    prod = derivative(multiply(f, g))(z)
    expect = derivative(f)(z) * g(z) + f(z) * derivative(g)(z)
    assert np.allclose(prod, expect, rtol=1e-10, atol=1e-10)


def test_poly_helpers_generic_over_mpmath():
    roots = [mpmath.mpc(1, 1), mpmath.mpc(-2)]
    p = poly_from_roots(roots, mpmath.mpc(1))
    assert abs(poly_eval(p, mpmath.mpc(1, 1))) == 0
    assert p == poly_from_roots([1 + 1j, -2 + 0j])


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_serialization_round_trip(seed):
    cheese = generate_cheese(1.0, 3, 2, 5)
    f = random_member(cheese, 6, 3, 0.02, seed)
    back = RF.from_json(f.to_json())
    assert back == f
    assert back.to_json() == f.to_json()
    assert RF.from_dict(f.to_dict()) == f


def test_pole_clearance_examples(default_cheese):
    assert pole_clearance(RF.monomial(3), default_cheese) == NO_POLES
    assert pole_clearance(RF.from_parts([1], [(2.0, 1)]), default_cheese) == pytest.approx(1.0)
    d = default_cheese.discs[0]
    assert pole_clearance(RF.from_parts([1], [(d.center, 1)]), default_cheese) == pytest.approx(d.radius)
    assert pole_clearance(RF.from_parts([1], [(0.0, 1)]), default_cheese) == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 8), st.integers(0, 5))
def test_random_member_properties(default_cheese, seed, max_degree, max_poles):
    f = random_member(default_cheese, max_degree, max_poles, 0.02, seed)
    assert f == random_member(default_cheese, max_degree, max_poles, 0.02, seed)
    assert len(f.num) - 1 <= max_degree
    assert len(f.factors) <= max_poles
    for a in f.poles:
        if abs(a) > 1:
            assert abs(a) >= 1.02
        else:
            host = [d for d in default_cheese.discs if abs(a - d.center) < d.radius]
            assert len(host) == 1
            d = host[0]
            assert d.radius - abs(a - d.center) >= min(0.02, 0.5 * d.radius) * (1 - 1e-9)
    hosts = [d for a in f.poles for d in default_cheese.discs if abs(a - d.center) < d.radius]
    assert len(hosts) == len(set(hosts))
    assert pole_clearance(f, default_cheese) > 0


def test_random_member_inside_only(default_cheese):
    f = random_member(default_cheese, 2, 3, 0.02, 9, allow_outside=False, inside_prob=0.0)
    assert all(abs(a) < 1 for a in f.poles)
    with pytest.raises(GenerationError):
        for seed in range(200):
            random_member(default_cheese, 2, 20, 0.02, seed, allow_outside=False)


def test_random_member_bad_outside(default_cheese):
    with pytest.raises(ValueError):
        random_member(default_cheese, 2, 2, 0.02, 0, outside=(0.5, 2.0))


def test_listed_examples():
    assert evaluate(RF.polynomial([0, 1]), 1j) == 1j
    assert evaluate(RF.from_parts([1], [(0, 1)]), 2) == 0.5
    assert evaluate(RF.from_parts([1, 0, 1], [(3, 1)]), 1) == -1
    z_times_inv = multiply(RF.polynomial([0, 1]), RF.monomial(-1))
    assert z_times_inv(0.5) == 1
    assert add(RF.from_parts([1], [(2, 1)]), RF.from_parts([1], [(-2, 1)]))(0) == 0
    pts = np.exp(2j * np.pi * np.arange(16) / 16)
    assert np.allclose(derivative(RF.monomial(2))(pts), 2 * pts, rtol=0, atol=1e-15)
    assert np.allclose(derivative(RF.monomial(-1))(pts), -(pts**-2), atol=1e-15)


@pytest.mark.parametrize("seed", range(10))
def test_random_derivative_finite_difference(default_cheese, seed):
    f = random_member(default_cheese, 6, 3, 0.02, seed)
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < 32:
        z = complex(rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2))
        if all(abs(z - a) > 0.05 for a in f.poles):
            pts.append(z)
    z = np.array(pts)
    h = 1e-6
    fd = (f(z + h) - f(z - h)) / (2 * h)
    exact = derivative(f)(z)
    assert np.all(np.abs(exact - fd) <= 1e-6 * (1 + np.abs(exact)))
