"""Named invariant checks across all modules, for ``dcf verify``.

Each check reports a measured value against a tolerance. Status is
``pass``/``fail`` for checks that gate the exit code and ``info`` for
observations that are reported but do not gate it (known disagreements of
printed closed forms with their independent routes).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import exp, factorial, pi, sqrt
from typing import Callable

import numpy as np

from . import classical, ladder, numerics
from . import coherent as co
from . import eigensystem as es
from . import observables as ob
from .errors import GridSupportWarning

BETAS_M = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99)


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    tolerance: float
    status: str  # pass | fail | info
    note: str = ""


def _gate(name, measured, tol, note=""):
    ok = bool(np.isfinite(measured) and measured <= tol)
    return Check(name, float(measured), tol, "pass" if ok else "fail", note)


def _info(name, measured, tol, note):
    return Check(name, float(measured), tol, "info", note)


def corrupted_matrix_m(beta: float) -> np.ndarray:
    """Fault-injection stand-in for M with the sign of the sigma_y term flipped."""
    c = sqrt(1.0 - beta * beta)
    return sqrt(0.5) * (sqrt(1.0 + c) * es.IDENTITY + sqrt(1.0 - c) * es.SIGMA_Y)


def _hermite_exact(n: int, z: int) -> float:
    """h_n(z) for integer z from the exact integer polynomial H_n(z)."""
    h0, h1 = 1, 2 * z
    if n == 0:
        hn = h0
    else:
        for k in range(1, n):
            h0, h1 = h1, 2 * z * h1 - 2 * k * h0
        hn = h1
    return hn * exp(-z * z / 2) / sqrt(2.0 ** n * factorial(n) * sqrt(pi))


def check_numerics():
    out = []
    ref = _hermite_exact(25, 3)
    out.append(_gate("hermite h_25(3) vs exact polynomial (rel)", abs(numerics.hermite_function(25, 3.0) - ref) / abs(ref), 1e-12))
    z = np.linspace(-30, 30, 6001)
    out.append(_gate("hermite |h_n| bound, n<=200", float(np.max(np.abs(numerics.hermite_functions(200, z)))) - 1.1, 0.0))
    x = np.linspace(-20, 20, 8001)
    h = numerics.hermite_functions(50, x)
    w = numerics.trapezoid_rule(x).weights
    gram = (h * w) @ h.T
    out.append(_gate("hermite orthonormality n<=50", float(np.max(np.abs(gram - np.eye(51)))), 1e-9))
    n4 = numerics.truncation_order(4.0)
    terms = [16.0 ** n / factorial(n) for n in range(150)]
    tail_ok = sum(terms[n4 + 1:]) < 1e-12 * exp(16.0) <= sum(terms[n4:]) * (1 + 1e-12)
    out.append(_gate("truncation order |alpha|=4 vs direct sum", 0.0 if tail_ok else 1.0, 0.0))
    return out


def check_classical():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(200):
        cfg = classical.ClassicalConfig(*rng.uniform(-2, 2, 4), omega_B=rng.uniform(0.2, 3), v_d=rng.uniform(-3, 3))
        t = rng.uniform(-20, 20, 5)
        worst = max(worst, float(np.max(np.abs(classical.circle_residual(cfg, t)))) / max(cfg.radius ** 2, 1e-30))
    out = [_gate("classical circle residual / R^2", worst, 1e-10)]
    cfg = classical.ClassicalConfig(0.3, -0.2, 0.7, 1.1, omega_B=1.7, v_d=0.0)
    T = 2 * pi / cfg.omega_B
    t = np.linspace(0, 5, 11)
    a, b = np.array(classical.trajectory(cfg, t)), np.array(classical.trajectory(cfg, t + T))
    out.append(_gate("classical period closure at v_d=0", float(np.max(np.abs(a - b))), 1e-10))
    return out


def check_eigensystem(matrix_m: Callable = es.matrix_m):
    out = []
    worst = 0.0
    for beta in (0.1, 0.3, 0.5, 0.7, 0.9, 0.99):
        for n in range(0, 11):
            e = es.energy(n, es.FieldConfig(B=1.0, beta=beta, k=0.7)) + 0.7 * beta
            e0 = es.energy(n, es.FieldConfig(B=1.0))
            if n:
                worst = max(worst, abs(e / e0 / (1 - beta ** 2) ** 0.75 - 1.0))
    out.append(_gate("spectrum (1-beta^2)^(3/4) scaling", worst, 1e-10))

    ids = {"M^dag M = I - beta sigma_y": 0.0, "M^dag sigma_x M = sqrt(1-beta^2) sigma_x": 0.0,
           "M^dag sigma_y M = sigma_y - beta I": 0.0, "M = U diag(mu) U^-1": 0.0}
    for beta in BETAS_M:
        m = matrix_m(beta)
        md = m.conj().T
        c = sqrt(1 - beta * beta)
        ids["M^dag M = I - beta sigma_y"] = max(ids["M^dag M = I - beta sigma_y"], np.max(np.abs(md @ m - (es.IDENTITY - beta * es.SIGMA_Y))))
        ids["M^dag sigma_x M = sqrt(1-beta^2) sigma_x"] = max(
            ids["M^dag sigma_x M = sqrt(1-beta^2) sigma_x"], np.max(np.abs(md @ es.SIGMA_X @ m - c * es.SIGMA_X)))
        ids["M^dag sigma_y M = sigma_y - beta I"] = max(
            ids["M^dag sigma_y M = sigma_y - beta I"], np.max(np.abs(md @ es.SIGMA_Y @ m - (es.SIGMA_Y - beta * es.IDENTITY))))
        mu, u = es.matrix_m_eigen(beta)
        ids["M = U diag(mu) U^-1"] = max(ids["M = U diag(mu) U^-1"], np.max(np.abs(u @ np.diag(mu) @ np.linalg.inv(u) - m)))
    out += [_gate(name, val, 1e-12) for name, val in ids.items()]

    worst_norm, worst_orth, worst_ham = 0.0, 0.0, 0.0
    for beta in (0.0, 0.5, 0.9):
        cfg = es.FieldConfig(B=0.5, beta=beta, k=1.0)
        x = es.default_grid(cfg, 20)
        w = numerics.trapezoid_rule(x).weights
        m = matrix_m(beta)
        psis = np.array([es.apply_matrix(m, es.phi_n(n, x, cfg)) for n in range(21)])
        gram = np.einsum("mcx,ncx,x->mn", psis.conj(), psis, w)
        worst_norm = max(worst_norm, float(np.max(np.abs(np.diag(gram) - 1))))
        worst_orth = max(worst_orth, float(np.max(np.abs(gram - np.diag(np.diag(gram))))))
        if matrix_m is es.matrix_m:
            xs = es.default_grid(cfg, 5, points=20001)
            worst_ham = max(worst_ham, max(float(np.max(np.abs(es.hamiltonian_residual(n, xs, cfg, order=6)))) for n in range(6)))
    out.append(_gate("eigenspinor normalization n<=20", worst_norm, 1e-8))
    out.append(_gate("eigenspinor orthogonality n<=20", worst_orth, 1e-8))
    if matrix_m is es.matrix_m:
        out.append(_gate("Hamiltonian residual (H - E_n) M Phi_n", worst_ham, 1e-6))
    z = np.linspace(-12, 12, 4801)
    weber = max(
        float(np.max(np.abs(es.weber_residual(n, comp, z, es.FieldConfig(beta=b)))))
        for b in (0.0, 0.5) for n in range(1, 6) for comp in (1, 2)
    )
    out.append(_gate("Weber equation residual in zeta", weber, 1e-6))
    return out


def check_ladder():
    out = []
    worst = 0.0
    for n in range(21):
        ks = ladder.KetSum.of(n, n)
        comm = ks.apply(ladder.q_plus).apply(ladder.q_minus) - ks.apply(ladder.q_minus).apply(ladder.q_plus)
        worst = max(worst, max(abs(c - (1.0 if key == (n, n) else 0.0)) for key, c in comm.terms.items()))
    out.append(_gate("[Q-, Q+] = 1, n<=20", worst, 1e-12))
    cs = [ladder.commutator_c(n) for n in range(12)]
    out.append(_gate("c(n) = 1, 3, 2, 2, ...", 0.0 if cs == [1, 3] + [2] * 10 else 1.0, 0.0))
    worst = 0.0
    for delta in (0.0, 0.4):
        for k in range(16):
            state = ladder.SpinorExpansion.basis(0, delta)
            for _ in range(k):
                state = ladder.tilde_theta_plus(state)
            coeffs = state.padded(k + 1) * np.exp(1j * k * delta) / sqrt(2.0 ** (2 * k - 1) * factorial(k))
            target = ladder.SpinorExpansion.basis(k, length=k + 1).coeffs
            if k == 0:
                coeffs = state.padded(1)
            worst = max(worst, float(np.max(np.abs(coeffs - target))))
    out.append(_gate("tilde Theta+^k reconstruction of Phi_k, k<=15", worst, 1e-12))
    worst = 0.0
    for delta in (0.0, 0.9):
        for eta in (1, -1):
            for n in range(12):
                got = ladder.matrix_theta_minus(ladder.phi_kets(n, eta), delta, eta)
                want = ladder.expand_kets(ladder.big_theta_minus(ladder.SpinorExpansion.basis(n, delta)).coeffs, eta)
                diff = got - want
                worst = max(worst, sqrt(abs(diff.inner(diff))) + ladder.residual_outside_phi(got, n + 1, eta))
    out.append(_gate("matrix Theta- realization vs net action", worst, 1e-12))
    return out


def check_coherent(policy=numerics.DEFAULT_POLICY):
    out = []
    worst = 0.0
    for a in (0.5, 1.0, 2.0, 4.0):
        for j in range(8):
            for delta in (0.0, pi / 2):
                worst = max(worst, co.eigenvalue_residual(co.CoherentSpec(a, j * pi / 4, delta), policy))
    out.append(_gate("coherent eigenvalue residual", worst, 1e-9))
    worst = 0.0
    for beta in (0.0, 0.25, 0.5, 0.75, 0.9):
        for a in (0.0, 1.0, 2.0, 4.0):
            d = ob.density_direct(co.CoherentSpec(a, 0.3), es.FieldConfig(B=0.5, beta=beta), policy=policy)
            worst = max(worst, abs(numerics.integrate(d.rho, numerics.trapezoid_rule(d.x)) - 1.0))
    out.append(_gate("coherent density normalization", worst, 1e-8))
    c = co.completeness_matrix(6)
    out.append(_gate("completeness on span{Phi_0..Phi_6}", float(np.max(np.abs(c - np.eye(7)))), 1e-6))
    return out


def check_observables(policy=numerics.DEFAULT_POLICY):
    out = []
    hur_dev, e_dev, v_dev, hur_min = 0.0, 0.0, 0.0, np.inf
    for beta in (0.0, 0.5, 0.9):
        for eta in (1, -1):
            cfg = es.FieldConfig(B=0.5, beta=beta, k=0.4, eta=eta)
            for a in (0.0, 0.7, 2.0, 4.0):
                for ph in (0.0, 1.0, 2.5):
                    spec = co.CoherentSpec(a, ph)
                    h1, h2 = ob.hur_closed_form(spec, cfg, policy), ob.hur_oracle(spec, cfg, policy)
                    hur_dev = max(hur_dev, abs(h1.mean_s0 - h2.mean_s0), abs(h1.mean_s1 - h2.mean_s1),
                                  abs(h1.var_s0 - h2.var_s0), abs(h1.var_s1 - h2.var_s1))
                    hur_min = min(hur_min, h1.product)
                    e1 = ob.mean_energy(spec, cfg, policy)
                    e_dev = max(e_dev, abs(e1 - ob.mean_energy_coefficients(spec, cfg, policy)) / max(1.0, abs(e1)))
                    v_dev = max(v_dev, abs(ob.mean_velocity_coherent(spec, cfg, policy) - ob.mean_velocity_fd(spec, cfg, policy=policy)))
    out.append(_gate("quadrature moments closed form vs ket contraction", hur_dev, 1e-8))
    out.append(_gate("uncertainty product >= 1/2", 0.5 - hur_min, 1e-9))
    out.append(_gate("mean energy closed form vs coefficient route", e_dev, 1e-8))
    out.append(_gate("coherent velocity vs d<H>/dk", v_dev, 1e-6))
    worst = max(abs(ob.mean_velocity_coherent(co.CoherentSpec(0.0), es.FieldConfig(beta=b)) + b) for b in (0.0, 0.3, 0.9))
    out.append(_gate("coherent velocity at alpha=0 equals -v_d", worst, 1e-12))
    worst = max(abs(ob.eigen_velocity_quadrature(n, es.FieldConfig(B=0.5, beta=b, k=1.0)) + b) for b in (0.0, 0.5, 0.9) for n in range(6))
    out.append(_gate("eigenstate velocity from currents equals -beta", worst, 1e-6))

    cfg = es.FieldConfig(B=0.5, beta=0.5)
    spec = co.CoherentSpec(2.0, 0.5)
    disc = ob.series_discrepancy(spec, cfg, policy=policy)
    out.append(_gate("coherent density series (index-consistent form) vs sampled state", disc["consistent"], ob.SERIES_RTOL))
    out.append(_info("coherent density series (printed form) vs sampled state", disc["printed"], ob.SERIES_RTOL,
                     "printed cross-term argument and normalization disagree with |M Phi_alpha|^2 for beta > 0"))
    worst = 0.0
    for beta in (0.5, 0.75, 0.9):
        for a in np.linspace(0.0, 4.0, 21):
            for ph in np.linspace(-pi / 8, pi / 8, 5):
                h = ob.hur_closed_form(co.CoherentSpec(float(a), float(ph)), es.FieldConfig(B=0.5, beta=beta), policy)
                worst = max(worst, h.sigma_p - h.sigma_zeta)
    out.append(_info("max(sigma_p - sigma_zeta), |phi|<=pi/8, beta>=0.5", worst, 0.0,
                     "positive for 0 < |alpha| below roughly beta"))
    return out


def check_grid_support():
    """A fixed figure grid that is fine at beta = 0 must warn at beta = 0.999."""
    x = np.linspace(-12.0, 12.0, 4001)
    caught = []
    for beta in (0.0, 0.999):
        with warnings.catch_warnings(record=True) as rec:
            warnings.simplefilter("always")
            ob.density_eigen(2, es.FieldConfig(B=0.5, beta=beta, k=1.0), x)
        caught.append(any(issubclass(w.category, GridSupportWarning) for w in rec))
    ok = caught == [False, True]
    return [Check("grid-support warning at beta=0.999 on a fixed grid", 0.0 if ok else 1.0, 0.0,
                  "pass" if ok else "fail", "warning raised" if caught[1] else "no warning")]


def run_all(fault: str | None = None, policy=numerics.DEFAULT_POLICY) -> list[Check]:
    matrix_m = corrupted_matrix_m if fault == "corrupt-m" else es.matrix_m
    checks = []
    checks += check_numerics()
    checks += check_classical()
    checks += check_eigensystem(matrix_m)
    checks += check_ladder()
    checks += check_coherent(policy)
    checks += check_observables(policy)
    checks += check_grid_support()
    return checks


def passed(checks) -> bool:
    return all(c.status != "fail" for c in checks)
