"""Acceptance criteria 1-12.

Each test carries a ``criterion`` marker; the terminal summary prints one
PASS/FAIL line per criterion. Clauses of one criterion share its runtime
budget, tracked by ``budget``. Tolerances are the stated ones; nothing here
is loosened to make a clause pass.
"""
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from dcf import classical as cl
from dcf import coherent as co
from dcf import eigensystem as es
from dcf import ladder, numerics
from dcf import observables as ob
from dcf.ladder import KetSum, SpinorExpansion

criterion = pytest.mark.criterion
_spent = {}


@contextmanager
def budget(cid: int, limit: float):
    """Accumulate wall time per criterion and fail once the total passes ``limit``."""
    t0 = time.perf_counter()
    yield
    _spent[cid] = _spent.get(cid, 0.0) + time.perf_counter() - t0
    assert _spent[cid] < limit, f"criterion {cid}: {_spent[cid]:.2f}s over the {limit}s budget"


def quad(x, f):
    return float(numerics.trapezoid_rule(x).weights @ f)


BETA_MATRIX = (0.0, 0.25, 0.5, 0.75, 0.9)
ALPHA_MATRIX = (0.0, 1.0, 2.0, 4.0)


# ------------------------------------------------------------------ 1 spectrum

@criterion("1", "E_n = sqrt(2n) at beta=0 and (1-beta^2)^(3/4) scaling")
def test_spectrum():
    with budget(1, 1.0):
        cfg = es.FieldConfig(B=1.0)
        for n in range(11):
            assert abs(es.energy(n, cfg) - math.sqrt(2 * n)) < 1e-12
        k = 0.8
        for beta in (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99):
            c = es.FieldConfig(B=1.0, beta=beta, k=k)
            for n in range(1, 11):
                ratio = (es.energy(n, c) + k * beta) / es.energy(n, cfg)
                assert abs(ratio - (1 - beta ** 2) ** 0.75) < 1e-10


# ------------------------------------------------------------------ 2 M identities

@criterion("2", "M relations and spectral decomposition for 12 beta values")
def test_matrix_m_identities():
    with budget(2, 1.0):
        for beta in np.linspace(0.0, 0.99, 12):
            m = es.matrix_m(beta)
            md = m.conj().T
            c = math.sqrt(1 - beta * beta)
            assert np.max(np.abs(md @ m - (es.IDENTITY - beta * es.SIGMA_Y))) < 1e-12
            assert np.max(np.abs(md @ es.SIGMA_X @ m - c * es.SIGMA_X)) < 1e-12
            assert np.max(np.abs(md @ es.SIGMA_Y @ m - (es.SIGMA_Y - beta * es.IDENTITY))) < 1e-12
            mu, u = es.matrix_m_eigen(beta)
            assert np.max(np.abs(u @ np.diag(mu) @ np.linalg.inv(u) - m)) < 1e-12


# ------------------------------------------------------------------ 3 normalization

@criterion("3a", "eigenstate densities integrate to 1 for n <= 20")
@pytest.mark.parametrize("beta", BETA_MATRIX)
def test_eigen_normalization(beta):
    with budget(3, 30.0):
        cfg = es.FieldConfig(B=0.5, beta=beta, k=1.0)
        x = es.default_grid(cfg, 20)
        for n in range(21):
            assert abs(quad(x, ob.density_eigen(n, cfg, x).rho.values) - 1) < 1e-8


@criterion("3b", "coherent densities integrate to 1 over the beta x |alpha| matrix")
@pytest.mark.parametrize("eta", [1, -1])
@pytest.mark.parametrize("beta", BETA_MATRIX)
def test_coherent_normalization(beta, eta):
    with budget(3, 30.0):
        cfg = es.FieldConfig(B=0.5, beta=beta, k=1.0, eta=eta)
        for a in ALPHA_MATRIX:
            d = ob.density_direct(co.CoherentSpec(a, 0.7), cfg)
            assert abs(quad(d.x, d.rho.values) - 1) < 1e-8


# ------------------------------------------------------------------ 4 ladder algebra

@criterion("4", "Q commutator, operator actions, k-fold reconstruction, c(n)")
def test_ladder_algebra():
    with budget(4, 1.0):
        for n in range(21):
            ks = KetSum.of(n, n)
            comm = ks.apply(ladder.q_plus).apply(ladder.q_minus) - ks.apply(ladder.q_minus).apply(ladder.q_plus)
            assert abs(comm.coefficient(n, n) - 1.0) < 1e-12
            assert all(abs(c) < 1e-12 for key, c in comm.terms.items() if key != (n, n))

        # action coefficients on Phi_n, both in coefficient space and through the 2x2 operator matrices
        for delta in (0.0, 0.6, math.pi / 2):
            for n in range(16):
                down = ladder.big_theta_minus(SpinorExpansion.basis(n, delta)).padded(n + 1)
                want = np.zeros(n + 1, complex)
                if n:
                    want[n - 1] = np.exp(1j * delta) * math.sqrt(n) / (math.sqrt(2) if n == 1 else 1.0)
                assert np.max(np.abs(down - want)) < 1e-15
                up = ladder.tilde_theta_plus(SpinorExpansion.basis(n, delta)).padded(n + 2)
                want = np.zeros(n + 2, complex)
                want[n + 1] = (math.sqrt(2) if n == 0 else 2.0) * np.exp(-1j * delta) * math.sqrt(n + 1)
                assert np.max(np.abs(up - want)) < 1e-14
                for eta in (1, -1):
                    phi = ladder.phi_kets(n, eta)
                    diff = ladder.matrix_theta_minus(phi, delta, eta) - ladder.expand_kets(
                        ladder.big_theta_minus(SpinorExpansion.basis(n, delta)).coeffs, eta)
                    assert abs(diff.inner(diff)) < 1e-24
                    diff = ladder.matrix_tilde_theta_plus(phi, delta, eta) - ladder.expand_kets(
                        ladder.tilde_theta_plus(SpinorExpansion.basis(n, delta)).coeffs, eta)
                    assert abs(diff.inner(diff)) < 1e-24

        for delta in (0.0, 0.9):
            state = SpinorExpansion.basis(0, delta)
            for k in range(1, 16):
                state = ladder.tilde_theta_plus(state)
                got = state.padded(k + 1) * np.exp(1j * k * delta) / math.sqrt(2.0 ** (2 * k - 1) * math.factorial(k))
                assert np.max(np.abs(got - SpinorExpansion.basis(k, length=k + 1).coeffs)) < 1e-12

        assert [ladder.commutator_c(n) for n in range(10)] == [1, 3] + [2] * 8


# ------------------------------------------------------------------ 5 eigenvalue property

@criterion("5", "Theta^- Phi_alpha = alpha Phi_alpha")
def test_coherent_eigenvalue():
    with budget(5, 5.0):
        worst = 0.0
        for a in np.linspace(0.0, 4.0, 17):
            for ph in np.arange(8) * 2 * np.pi / 8:
                for delta in (0.0, math.pi / 2):
                    worst = max(worst, co.eigenvalue_residual(co.CoherentSpec(a, ph, delta)))
        assert worst < 1e-9


# ------------------------------------------------------------------ 6 dual routes

@criterion("6a", "density series as printed vs direct |Psi_alpha|^2 (fails for beta > 0)")
@pytest.mark.parametrize("beta", BETA_MATRIX)
def test_printed_density_series(beta):
    with budget(6, 60.0):
        cfg = es.FieldConfig(B=0.5, beta=beta)
        worst = 0.0
        for a in ALPHA_MATRIX:
            for ph in (0.0, 0.5, math.pi / 2):
                d = ob.density_coherent(co.CoherentSpec(a, ph), cfg, form="printed")
                worst = max(worst, d.deviation)
        print(f"beta={beta}: worst relative deviation {worst:.3e}")
        assert worst < 1e-8


@criterion("6b", "level-consistent density series vs direct |Psi_alpha|^2")
@pytest.mark.parametrize("beta", BETA_MATRIX)
def test_consistent_density_series(beta):
    with budget(6, 60.0):
        for eta in (1, -1):
            cfg = es.FieldConfig(B=0.5, beta=beta, eta=eta)
            for a in ALPHA_MATRIX:
                for ph in (0.0, 0.5, math.pi / 2):
                    d = ob.density_coherent(co.CoherentSpec(a, ph), cfg, form="consistent")
                    assert d.deviation < 1e-8


@criterion("6c", "HUR closed forms vs matrix-contraction oracle")
@pytest.mark.parametrize("beta", BETA_MATRIX)
def test_hur_closed_vs_oracle(beta):
    with budget(6, 60.0):
        for eta in (1, -1):
            cfg = es.FieldConfig(B=0.5, beta=beta, k=0.3, eta=eta)
            for a in ALPHA_MATRIX:
                for ph in (0.0, 1.0, -2.0):
                    for delta in (0.0, 0.7):
                        spec = co.CoherentSpec(a, ph, delta)
                        h, o = ob.hur_closed_form(spec, cfg), ob.hur_oracle(spec, cfg)
                        for f in ("mean_s0", "mean_s1", "var_s0", "var_s1"):
                            assert abs(getattr(h, f) - getattr(o, f)) < 1e-8


@criterion("6d", "mean energy closed form vs coefficient-weighted sum")
@pytest.mark.parametrize("beta", BETA_MATRIX)
def test_energy_two_routes(beta):
    with budget(6, 60.0):
        for k in (0.0, 1.0, -2.0):
            cfg = es.FieldConfig(B=0.5, beta=beta, k=k)
            for a in ALPHA_MATRIX:
                for ph in (0.0, 1.0):
                    spec = co.CoherentSpec(a, ph)
                    assert abs(ob.mean_energy(spec, cfg) - ob.mean_energy_coefficients(spec, cfg)) < 1e-8


# ------------------------------------------------------------------ 7 HUR

HUR_BETAS = (0.0, 0.25, 0.5, 0.75, 0.9, 0.99)


@criterion("7a", "sigma_zeta sigma_p >= 1/2 on the Re/Im alpha grid")
@pytest.mark.parametrize("beta", HUR_BETAS)
def test_hur_bound(beta):
    with budget(7, 60.0):
        cfg = es.FieldConfig(B=0.5, beta=beta)
        axis = np.linspace(-4, 4, 33)
        products = [ob.hur_closed_form(co.CoherentSpec.from_complex(complex(re, im)), cfg).product
                    for re in axis for im in axis]
        assert min(products) >= 0.5 - 1e-9


@criterion("7b", "product = 1/2 at alpha = 0 for all beta")
def test_hur_zero_alpha():
    with budget(7, 60.0):
        for beta in np.linspace(0.0, 0.99, 12):
            for eta in (1, -1):
                h = ob.hur_closed_form(co.CoherentSpec(0.0), es.FieldConfig(B=0.5, beta=beta, eta=eta))
                assert abs(h.product - 0.5) < 1e-10


@criterion("7c", "sigma_p <= sigma_zeta for |phi| <= pi/8, beta >= 0.5 (fails at small |alpha|)")
@pytest.mark.parametrize("beta", [0.5, 0.75, 0.9])
def test_variance_ordering(beta):
    with budget(7, 60.0):
        cfg = es.FieldConfig(B=0.5, beta=beta)
        bad = []
        for a in np.linspace(0.0, 4.0, 41):
            for ph in np.linspace(-math.pi / 8, math.pi / 8, 9):
                h = ob.hur_closed_form(co.CoherentSpec(a, ph), cfg)
                if h.sigma_p > h.sigma_zeta:
                    bad.append((round(a, 2), round(ph, 3), h.sigma_p - h.sigma_zeta))
        if bad:
            print(f"beta={beta}: {len(bad)} violations, |alpha| in [{min(b[0] for b in bad)}, {max(b[0] for b in bad)}], "
                  f"largest excess {max(b[2] for b in bad):.3e}")
        assert not bad


# ------------------------------------------------------------------ 8 drift velocities

@criterion("8", "eigenstate and coherent drift velocities")
def test_drift_velocities():
    with budget(8, 5.0):
        for beta in (0.0, 0.3, 0.6, 0.9, 0.99):
            cfg = es.FieldConfig(B=0.5, beta=beta, k=0.4)
            assert abs(es.mean_velocity_eigen(cfg) + beta) < 1e-12
            for n in range(8):
                assert abs(ob.eigen_velocity_fd(n, cfg) + beta) < 1e-6
            assert abs(ob.mean_velocity_coherent(co.CoherentSpec(0.0), cfg) + beta) < 1e-12
            for a in (0.5, 1.0, 2.0, 4.0):
                for ph in (0.0, math.pi / 3, math.pi):
                    spec = co.CoherentSpec(a, ph)
                    assert abs(ob.mean_velocity_fd(spec, cfg) - ob.mean_velocity_coherent(spec, cfg)) < 1e-6


# ------------------------------------------------------------------ 9 completeness

@criterion("9", "resolution of identity on span{Phi_0..Phi_6}")
def test_completeness():
    with budget(9, 30.0):
        acc = co.completeness_matrix(6)
        assert co.radial_tail(6, 8.0) < 1e-12
        assert np.max(np.abs(np.diag(acc) - 1)) < 1e-6
        assert np.max(np.abs(acc - np.diag(np.diag(acc)))) < 1e-6


# ------------------------------------------------------------------ 10 parity

def _reflected(n, cfg, half_width=15.0, points=3001):
    center = es.level_center(n, cfg)
    x = center + np.linspace(-half_width, half_width, points)
    pair = ob.density_eigen(n, cfg, x)
    return pair.rho.values, pair.jy.values


@criterion("10", "rho_n even and j_y odd at beta=0, broken at beta=0.5")
def test_parity():
    with budget(10, 5.0):
        for n in range(6):
            rho, jy = _reflected(n, es.FieldConfig(B=0.5, k=1.0))
            assert np.max(np.abs(rho - rho[::-1])) < 1e-9
            assert np.max(np.abs(jy + jy[::-1])) < 1e-9
        for n in range(1, 6):
            rho, _ = _reflected(n, es.FieldConfig(B=0.5, beta=0.5, k=1.0))
            assert np.max(np.abs(rho - rho[::-1])) > 1e-2
        # the ground state is a pure Gaussian in zeta_0 and stays symmetric about its center
        rho, _ = _reflected(0, es.FieldConfig(B=0.5, beta=0.5, k=1.0))
        assert np.max(np.abs(rho - rho[::-1])) < 1e-9


# ------------------------------------------------------------------ 11 collapse

@criterion("11", "density peaks shrink and move as beta grows")
def test_collapse():
    with budget(11, 30.0):
        for n in (0, 1, 2):
            peaks = {}
            for beta in (0.75, 0.99):
                cfg = es.FieldConfig(B=0.5, beta=beta, k=1.0)
                peaks[beta] = ob.density_eigen(n, cfg).rho.values.max()
            assert peaks[0.99] < peaks[0.75]
        where = []
        for beta in (0.0, 0.25, 0.5, 0.75, 0.9):
            d = ob.density_direct(co.CoherentSpec(4.0, 0.0), es.FieldConfig(B=0.5, beta=beta))
            where.append(d.x[np.argmax(d.rho.values)])
        assert np.all(np.diff(where) < 0), where


# ------------------------------------------------------------------ 12 classical

@criterion("12", "moving-circle residual and period closure")
def test_classical():
    with budget(12, 1.0):
        rng = np.random.default_rng(20261018)
        for _ in range(1000):
            cfg = cl.ClassicalConfig(
                x0=rng.uniform(-5, 5), y0=rng.uniform(-5, 5), v0x=rng.uniform(-1, 1), v0y=rng.uniform(-1, 1),
                omega_B=rng.uniform(0.1, 5), v_d=rng.uniform(0, 0.99),
            )
            t = rng.uniform(0, 100)
            assert abs(cl.circle_residual(cfg, t)) < 1e-10 * max(cfg.radius ** 2, 1e-300)
        for _ in range(50):
            cfg = cl.ClassicalConfig(v0x=rng.uniform(-1, 1), v0y=rng.uniform(-1, 1), omega_B=rng.uniform(0.1, 5))
            t = rng.uniform(0, 10, size=20)
            x0, y0 = cl.trajectory(cfg, t)
            x1, y1 = cl.trajectory(cfg, t + 2 * math.pi / cfg.omega_B)
            assert np.max(np.abs(x1 - x0)) < 1e-10 and np.max(np.abs(y1 - y0)) < 1e-10
