import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from dcf import numerics
from dcf.errors import GridMismatch, TruncationCapExceeded
from dcf.numerics import GridProfile, TruncationPolicy

mpmath.mp.dps = 50


def h_mp(n, z):
    """Normalized Hermite function at 50 digits."""
    z = mpmath.mpf(z)
    return mpmath.hermite(n, z) * mpmath.exp(-z * z / 2) / mpmath.sqrt(2 ** n * mpmath.factorial(n) * mpmath.sqrt(mpmath.pi))


def test_hermite_known_values():
    assert numerics.hermite_function(0, 0.0) == pytest.approx(math.pi ** -0.25, abs=1e-15)
    assert numerics.hermite_function(0, 0.0) == pytest.approx(0.7511255, abs=1e-7)
    assert numerics.hermite_function(1, 0.0) == 0.0


def test_hermite_high_order_against_mpmath():
    ref = float(h_mp(25, 3))
    assert abs(numerics.hermite_function(25, 3.0) - ref) <= 1e-12 * abs(ref)


@given(n=st.integers(0, 120), z=st.floats(-25, 25))
def test_hermite_recurrence_matches_mpmath(n, z):
    ref = float(h_mp(n, z))
    assert abs(numerics.hermite_function(n, z) - ref) <= 1e-11 * max(1.0, abs(ref)) + 1e-300


def test_hermite_functions_shape():
    z = np.linspace(-1, 1, 7).reshape(7, 1)
    assert numerics.hermite_functions(4, z).shape == (5, 7, 1)
    with pytest.raises(ValueError):
        numerics.hermite_functions(-1, z)


def test_hermite_bounded_to_cap():
    z = np.linspace(-30, 30, 12001)
    assert np.max(np.abs(numerics.hermite_functions(200, z))) <= 1.1


def test_hermite_orthonormal_on_default_like_grid():
    x = np.linspace(-20, 20, 8001)
    h = numerics.hermite_functions(50, x)
    gram = (h * numerics.trapezoid_rule(x).weights) @ h.T
    assert np.max(np.abs(gram - np.eye(51))) < 1e-9


def test_pcf_d_examples():
    assert numerics.pcf_d(0, 1.0) == pytest.approx(math.exp(-0.25), abs=1e-15)
    assert numerics.pcf_d(0, 1.0) == pytest.approx(0.7788008, abs=1e-7)
    assert numerics.pcf_d(1, 0.0) == 0.0
    x = math.sqrt(2)
    h4 = 16 * x ** 4 - 48 * x ** 2 + 12
    assert numerics.pcf_d(4, 2.0) == pytest.approx(h4 * 2 ** -2 * math.exp(-1), rel=1e-13)


@given(n=st.integers(0, 40), z=st.floats(-12, 12))
def test_pcf_d_matches_mpmath(n, z):
    ref = float(mpmath.pcfd(n, z))
    assert abs(numerics.pcf_d(n, z) - ref) <= 1e-11 * max(1.0, abs(ref))


def test_pcf_reproduces_hermite_function_with_prefactor():
    z = np.linspace(-8, 8, 321)
    for n in range(51):
        lhs = numerics.pcf_d(n, math.sqrt(2) * z) / math.sqrt(math.factorial(n) * math.sqrt(math.pi))
        assert np.max(np.abs(lhs - numerics.hermite_function(n, z))) < 1e-12


def _direct_order(alpha_mod, tol):
    """Smallest N with sum_{n>N} r^n/n! < tol e^r, by exact summation at 50 digits."""
    r = mpmath.mpf(alpha_mod) ** 2
    total = mpmath.exp(r)
    partial = mpmath.mpf(0)
    n = 0
    while True:
        partial += r ** n / mpmath.factorial(n)
        if total - partial < tol * total:
            return n
        n += 1


def test_truncation_order_examples():
    assert numerics.truncation_order(0.0) == 0
    assert numerics.truncation_order(4.0, TruncationPolicy(tol=1e-12)) == _direct_order(4.0, 1e-12)
    with pytest.raises(TruncationCapExceeded):
        numerics.truncation_order(4.0, TruncationPolicy(tol=1e-12, hard_cap=10))


@given(a=st.floats(0.01, 6.0), tol_exp=st.integers(4, 14))
def test_truncation_order_matches_direct_sum(a, tol_exp):
    assert numerics.truncation_order(a, TruncationPolicy(tol=10.0 ** -tol_exp)) == _direct_order(a, 10.0 ** -tol_exp)


@given(a=st.floats(0.0, 5.0), b=st.floats(0.0, 5.0))
def test_truncation_order_monotone(a, b):
    lo, hi = sorted((a, b))
    assert numerics.truncation_order(lo) <= numerics.truncation_order(hi)


def test_policy_validation():
    for bad in (dict(tol=0.0), dict(tol=1.0), dict(hard_cap=0)):
        with pytest.raises(ValueError):
            TruncationPolicy(**bad)


def test_integrate_examples():
    x = np.linspace(0, 1, 11)
    assert numerics.integrate(GridProfile(x, np.ones_like(x)), numerics.trapezoid_rule(x)) == pytest.approx(1.0, abs=1e-15)
    x = np.linspace(-10, 10, 2001)
    rule = numerics.trapezoid_rule(x)
    assert abs(numerics.integrate(GridProfile(x, np.exp(-x * x)), rule) - math.sqrt(math.pi)) < 1e-10
    h0 = numerics.hermite_function(0, x)
    assert abs(numerics.integrate(GridProfile(x, h0 * h0), rule) - 1.0) < 1e-10


def test_integrate_rejects_mismatched_grid():
    x = np.linspace(0, 1, 11)
    with pytest.raises(GridMismatch):
        numerics.integrate(GridProfile(x, x), numerics.trapezoid_rule(np.linspace(0, 1, 12)))
    with pytest.raises(GridMismatch):
        numerics.integrate(GridProfile(x, x), numerics.trapezoid_rule(np.linspace(0, 2, 11)))


def test_gauss_hermite_rule_integrates_polynomials():
    rule = numerics.gauss_hermite_rule(20)
    assert np.all(np.diff(rule.nodes) > 0) and np.all(rule.weights > 0)
    # int x^4 e^{-x^2} = 3 sqrt(pi) / 4
    assert rule.weights @ rule.nodes ** 4 == pytest.approx(0.75 * math.sqrt(math.pi), rel=1e-13)


def test_gauss_legendre_rule_on_interval():
    rule = numerics.gauss_legendre_rule(12, 0.0, 2.0)
    assert rule.weights @ rule.nodes ** 5 == pytest.approx(2 ** 6 / 6, rel=1e-13)


@given(n=st.integers(0, 30), r=st.floats(0.0, 40.0))
def test_poisson_tail_matches_sum(n, r):
    r_mp = mpmath.mpf(r)
    direct = 1 - sum(r_mp ** j * mpmath.exp(-r_mp) / mpmath.factorial(j) for j in range(n + 1))
    assert abs(numerics.poisson_tail(n, r) - float(direct)) < 1e-12


def test_poisson_weights_finite_for_large_r():
    w = numerics.poisson_weights(900.0, 200)
    assert np.all(np.isfinite(w)) and np.all(w >= 0)


def test_central_difference_orders():
    x = np.linspace(0, 2 * np.pi, 801)
    h = x[1] - x[0]
    for order, tol in ((2, 1e-4), (4, 1e-8), (6, 1e-11)):
        d = numerics.central_difference(np.sin(x), h, order=order)
        m = order // 2
        assert np.max(np.abs(d[m:-m] - np.cos(x[m:-m]))) < tol
    with pytest.raises(ValueError):
        numerics.central_difference(np.sin(x), h, order=3)


def test_support_grid_respects_max_spacing():
    x = numerics.support_grid(-5.0, 5.0, points=11, max_spacing=0.01)
    assert x[0] == -5.0 and x[-1] == 5.0
    assert np.max(np.diff(x)) <= 0.01 * (1 + 1e-12)
