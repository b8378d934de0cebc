import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from dcf import coherent as co
from dcf import eigensystem as es
from dcf import numerics
from dcf.errors import GridSupportWarning, TruncationCapExceeded, TruncationInsufficient
from dcf.numerics import TruncationPolicy


def quad(x, f):
    return float(numerics.trapezoid_rule(x).weights @ f)


def test_spec_validation():
    with pytest.raises(ValueError):
        co.CoherentSpec(-1.0)
    with pytest.raises(ValueError):
        co.CoherentSpec(1.0, trunc=-2)
    spec = co.CoherentSpec.from_complex(1 - 1j, delta=0.3)
    assert spec.alpha == pytest.approx(1 - 1j)
    assert spec.alpha_tilde == pytest.approx((1 - 1j) * np.exp(-0.3j))


def test_zero_alpha_is_ground_state():
    a = co.coherent_coefficients(co.CoherentSpec(0.0)).coeffs
    assert a[0] == 1.0 and np.all(a[1:] == 0)


def test_first_coefficient_ratio():
    spec = co.CoherentSpec.from_complex(np.exp(0.8j))
    a = co.coherent_coefficients(spec).coeffs
    assert a[1] / a[0] == pytest.approx(math.sqrt(2) * spec.alpha, abs=1e-14)


def test_coefficients_against_high_precision():
    mpmath.mp.dps = 40
    spec = co.CoherentSpec(2.5, 1.2, 0.4)
    a = co.coherent_coefficients(spec).coeffs
    at = mpmath.mpc(spec.alpha_tilde)
    norm = 1 / mpmath.sqrt(2 * mpmath.exp(abs(at) ** 2) - 1)
    for n in (0, 1, 5, 20, len(a) - 1):
        ref = norm if n == 0 else norm * mpmath.sqrt(2) * at ** n / mpmath.sqrt(mpmath.factorial(n))
        assert abs(a[n] - complex(ref)) < 1e-14


def test_norm_sums_to_one_at_four():
    a = co.coherent_coefficients(co.CoherentSpec(4.0, 0.3)).coeffs
    assert abs(np.sum(np.abs(a) ** 2) - 1.0) < 1e-10


@given(a=st.floats(0, 6), ph=st.floats(-math.pi, math.pi), d=st.floats(0, 2 * math.pi))
def test_phase_covariance(a, ph, d):
    lhs = co.coherent_coefficients(co.CoherentSpec(a, ph, d)).coeffs
    rhs = co.coherent_coefficients(co.CoherentSpec(a, ph - d, 0.0)).coeffs
    assert np.allclose(lhs, rhs, rtol=1e-13, atol=1e-300)


def test_explicit_truncation_checked():
    with pytest.raises(TruncationInsufficient):
        co.coherent_coefficients(co.CoherentSpec(4.0, trunc=10))
    a = co.coherent_coefficients(co.CoherentSpec(4.0, trunc=10), strict=False).coeffs
    assert len(a) == 11
    with pytest.raises(TruncationCapExceeded):
        co.coherent_coefficients(co.CoherentSpec(20.0))


def test_eigenvalue_residual_examples():
    assert co.eigenvalue_residual(co.CoherentSpec(0.0)) == 0.0
    r0 = co.eigenvalue_residual(co.CoherentSpec(4.0, math.pi / 3, 0.0))
    r1 = co.eigenvalue_residual(co.CoherentSpec(4.0, math.pi / 3, math.pi / 2))
    assert r0 < 1e-9 and r1 < 1e-9
    assert abs(r0 - r1) < 1e-12


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0, 4.0])
@pytest.mark.parametrize("delta", [0.0, math.pi / 2])
def test_eigenvalue_phase_sweep(a, delta):
    for j in range(8):
        assert co.eigenvalue_residual(co.CoherentSpec(a, j * math.pi / 4, delta)) < 1e-8


@given(a=st.floats(0, 5), ph=st.floats(0, 2 * math.pi), d=st.floats(0, 2 * math.pi))
def test_eigenvalue_property(a, ph, d):
    assert co.eigenvalue_residual(co.CoherentSpec(a, ph, d)) < 1e-9


def test_truncation_uses_amplitude_tolerance():
    # the dropped coefficient amplitudes, not their squares, sit below tol
    spec = co.CoherentSpec(3.0)
    n = spec.order()
    tail = numerics.poisson_tail(n, 9.0)
    assert math.sqrt(tail) < 1e-12


@pytest.mark.parametrize("beta", [0.0, 0.25, 0.5, 0.75, 0.9])
@pytest.mark.parametrize("a", [0.0, 1.0, 2.0, 4.0])
def test_render_norm(beta, a):
    spec = co.CoherentSpec(a, 0.7)
    phi, psi = co.render_coherent(spec, es.FieldConfig(B=0.5, beta=beta))
    assert abs(quad(psi.x, np.sum(np.abs(psi.values) ** 2, axis=0)) - 1.0) < 1e-8
    if beta == 0.0:
        assert abs(quad(phi.x, np.sum(np.abs(phi.values) ** 2, axis=0)) - 1.0) < 1e-8


def test_phi_norm_matches_sampled_gram():
    """At beta > 0 the Phi_n overlap on the line, so |Phi_alpha|^2 follows their Gram matrix."""
    cfg = es.FieldConfig(B=0.5, beta=0.5)
    spec = co.CoherentSpec(1.5, 0.2)
    phi, _ = co.render_coherent(spec, cfg)
    a = co.coherent_coefficients(spec).coeffs
    x = phi.x
    basis = np.array([es.phi_n(n, x, cfg) for n in range(len(a))])
    w = numerics.trapezoid_rule(x).weights
    gram = np.einsum("mcx,ncx,x->mn", basis.conj(), basis, w)
    expected = np.real(np.conj(a) @ gram @ a)
    assert abs(quad(x, np.sum(np.abs(phi.values) ** 2, axis=0)) - expected) < 1e-10
    assert abs(expected - 1.0) > 1e-3


def test_zero_alpha_profile_is_gaussian():
    cfg = es.FieldConfig(B=0.5)
    _, psi = co.render_coherent(co.CoherentSpec(0.0), cfg)
    g = es.psi_scalar(0, psi.x, cfg) ** 2
    assert np.max(np.abs(np.sum(np.abs(psi.values) ** 2, axis=0) - g)) < 1e-15


def test_norm_against_closed_denominator():
    """|Psi_alpha|^2 integrates to N^2 D only where the beta Re(alpha) term is absent."""
    for beta, phase, should_match in ((0.0, 0.3, True), (0.6, math.pi / 2, True), (0.6, 0.3, False)):
        spec = co.CoherentSpec(1.2, phase)
        cfg = es.FieldConfig(B=0.5, beta=beta)
        _, psi = co.render_coherent(spec, cfg)
        total = quad(psi.x, np.sum(np.abs(psi.values) ** 2, axis=0))
        at = spec.alpha_tilde
        r = abs(at) ** 2
        s1 = sum(r ** n / (math.factorial(n) * math.sqrt(n + 1)) for n in range(80))
        closed = (2 * math.exp(r) - 1 - 2 * beta * at.real * s1) / (2 * math.exp(r) - 1)
        assert (abs(total - closed) < 1e-8) == should_match


def test_grid_support_warning():
    cfg = es.FieldConfig(B=0.5, beta=0.5)
    with pytest.warns(GridSupportWarning):
        co.render_coherent(co.CoherentSpec(2.0), cfg, np.linspace(-3, 3, 301))
    with warnings.catch_warnings():
        warnings.simplefilter("error", GridSupportWarning)
        co.render_coherent(co.CoherentSpec(2.0), cfg)


def test_completeness():
    c = co.completeness_matrix(6)
    assert np.max(np.abs(np.diag(c) - 1)) < 1e-6
    assert np.max(np.abs(c - np.diag(np.diag(c)))) < 1e-6
    assert co.radial_tail(6, 8.0) < 1e-10


def test_completeness_needs_zero_term():
    c = co.completeness_matrix(3)
    # without the half projector on Phi_0 the first diagonal entry is 1/2
    assert abs(c[0, 0] - 0.5 - 0.5) < 1e-6
