"""Coherent states: eigenstates of the matrix annihilation operator.

Phi_alpha = N [Phi_0 + sum_{n>=1} sqrt(2) at^n / sqrt(n!) Phi_n] with
at = alpha e^{-i delta} and N = (2 e^{|at|^2} - 1)^{-1/2}. The physical
state is Psi_alpha = M Phi_alpha.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from math import sqrt

import numpy as np
from scipy.special import gammaincc, gammaln

from . import eigensystem as es
from . import numerics
from .errors import GridSupportWarning, TruncationInsufficient
from .ladder import SpinorExpansion, big_theta_minus
from .numerics import DEFAULT_POLICY, GridProfile, TruncationPolicy

SUPPORT_TOL = 1e-6


@dataclass(frozen=True)
class CoherentSpec:
    """Eigenvalue alpha = alpha_mod e^{i phase}, operator phase delta, series order trunc.

    ``trunc=None`` picks the order from the truncation policy; an explicit
    value is taken as an override.
    """

    alpha_mod: float
    phase: float = 0.0
    delta: float = 0.0
    trunc: int | None = None

    def __post_init__(self):
        if not (np.isfinite(self.alpha_mod) and self.alpha_mod >= 0):
            raise ValueError("alpha_mod must be a non-negative real")
        if self.trunc is not None and self.trunc < 0:
            raise ValueError("trunc must be non-negative")

    @classmethod
    def from_complex(cls, alpha: complex, delta: float = 0.0, trunc: int | None = None):
        return cls(abs(alpha), float(np.angle(alpha)), delta, trunc)

    @property
    def alpha(self) -> complex:
        return self.alpha_mod * np.exp(1j * self.phase)

    @property
    def alpha_tilde(self) -> complex:
        return self.alpha_mod * np.exp(1j * (self.phase - self.delta))

    def order(self, policy: TruncationPolicy = DEFAULT_POLICY) -> int:
        return self.trunc if self.trunc is not None else state_truncation(self.alpha_mod, policy)


def state_truncation(alpha_mod: float, policy: TruncationPolicy = DEFAULT_POLICY) -> int:
    """Series order at which the dropped amplitudes are below ``policy.tol``.

    The tail bound of ``truncation_order`` is on squared coefficients, so the
    amplitude criterion asks it for tol^2.
    """
    return numerics.truncation_order(alpha_mod, replace(policy, tol=policy.tol ** 2))


def coefficients_array(alpha_tilde: complex, order: int) -> np.ndarray:
    """a_0..a_order; magnitudes go through logs so large |alpha| stays finite."""
    r = abs(alpha_tilde) ** 2
    a = np.zeros(order + 1, dtype=complex)
    # N^2 = 1 / (2 e^r - 1) = e^{-r} / (2 - e^{-r})
    norm = sqrt(np.exp(-r) / (2.0 - np.exp(-r)))
    a[0] = norm
    if order == 0 or r == 0.0:
        return a
    n = np.arange(1, order + 1)
    log_mag = 0.5 * np.log(2.0) + n * np.log(abs(alpha_tilde)) - 0.5 * gammaln(n + 1) - 0.5 * r
    a[1:] = np.exp(log_mag + 1j * n * np.angle(alpha_tilde)) / sqrt(2.0 - np.exp(-r))
    return a


def coherent_coefficients(
    spec: CoherentSpec, policy: TruncationPolicy = DEFAULT_POLICY, strict: bool = True
) -> SpinorExpansion:
    """Expansion of Phi_alpha over Phi_0..Phi_N.

    With ``strict`` an explicit ``spec.trunc`` shorter than the policy's
    squared-tail order raises TruncationInsufficient.
    """
    if strict and spec.trunc is not None:
        needed = numerics.truncation_order(spec.alpha_mod, policy)
        if spec.trunc < needed:
            raise TruncationInsufficient(
                f"trunc={spec.trunc} < {needed} required for tol={policy.tol} at |alpha|={spec.alpha_mod}"
            )
    return SpinorExpansion(coefficients_array(spec.alpha_tilde, spec.order(policy)), spec.delta)


def eigenvalue_residual(spec: CoherentSpec, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """|Theta^- Phi_alpha - alpha Phi_alpha| / |Phi_alpha| in coefficient space."""
    state = coherent_coefficients(spec, policy)
    lowered = big_theta_minus(state)
    n = len(state.coeffs)
    diff = lowered.padded(n) - spec.alpha * state.padded(n)
    return float(np.linalg.norm(diff) / state.norm())


def coherent_grid(spec: CoherentSpec, cfg: es.FieldConfig, policy: TruncationPolicy = DEFAULT_POLICY):
    return es.default_grid(cfg, max(spec.order(policy), 1))


def render_phi(coeffs: np.ndarray, x, cfg: es.FieldConfig) -> np.ndarray:
    """sum_n a_n Phi_n(x) with one Hermite recurrence per level center."""
    x = np.asarray(x, dtype=float)
    out = np.zeros((2,) + x.shape, dtype=complex)
    pref = (1.0 - cfg.beta ** 2) ** 0.125 / sqrt(cfg.l_B)
    for n, a in enumerate(coeffs):
        if a == 0:
            continue
        h = numerics.hermite_functions(n, es.zeta(n, x, cfg)) * pref
        if n == 0:
            out[1] += a * 1j * cfg.eta * h[0]
        else:
            out[0] += a * h[n - 1] / sqrt(2.0)
            out[1] += a * 1j * cfg.eta * h[n] / sqrt(2.0)
    return out


def check_support(psi: np.ndarray, x, expected_norm: float, what: str = "state") -> float:
    """Fraction of the expected norm missing from the grid; warns above SUPPORT_TOL."""
    rule = numerics.trapezoid_rule(x)
    dens = np.sum(np.abs(psi) ** 2, axis=0)
    inside = float(numerics.integrate(GridProfile(x, dens), rule))
    missing = max(0.0, 1.0 - inside / expected_norm)
    if missing > SUPPORT_TOL:
        warnings.warn(
            f"{what}: {missing:.2e} of the norm lies outside [{x[0]:.4g}, {x[-1]:.4g}]",
            GridSupportWarning,
            stacklevel=3,
        )
    return missing


def spatial_gram(n_max: int, cfg: es.FieldConfig) -> np.ndarray:
    """<Psi_m|Psi_n> on the line for m, n <= n_max, by quadrature on a grid wide enough for all levels."""
    x = es.default_grid(cfg, max(n_max, 1))
    w = numerics.trapezoid_rule(x).weights
    m = es.matrix_m(cfg.beta)
    psis = np.array([es.apply_matrix(m, es.phi_n(n, x, cfg)) for n in range(n_max + 1)])
    return np.einsum("mcx,ncx,x->mn", psis.conj(), psis, w)


def spatial_norm2(coeffs: np.ndarray, cfg: es.FieldConfig) -> float:
    """|Psi_alpha|^2 on the line.

    For eta = +1 (or beta = 0) the Psi_n are orthonormal and this is sum |a_n|^2.
    With eta = -1 and beta > 0 the spinors M Phi_n keep unit norm but overlap,
    so the full Gram matrix is needed.
    """
    coeffs = np.asarray(coeffs)
    if cfg.eta == 1 or cfg.beta == 0.0:
        return float(np.sum(np.abs(coeffs) ** 2))
    gram = spatial_gram(len(coeffs) - 1, cfg)
    return float(np.real(np.conj(coeffs) @ gram @ coeffs))


def render_coherent(spec: CoherentSpec, cfg: es.FieldConfig, x=None, policy: TruncationPolicy = DEFAULT_POLICY):
    """Sample Phi_alpha and Psi_alpha = M Phi_alpha.

    The expected integral of |Psi_alpha|^2 comes from ``spatial_norm2``;
    a shortfall above SUPPORT_TOL on the given grid raises a
    GridSupportWarning. Returns (phi_profile, psi_profile).
    """
    state = coherent_coefficients(spec, policy)
    if x is None:
        x = coherent_grid(spec, cfg, policy)
    phi = render_phi(state.coeffs, x, cfg)
    psi = es.apply_matrix(es.matrix_m(cfg.beta), phi)
    norm2 = spatial_norm2(state.coeffs, cfg)
    check_support(psi, x, norm2, what=f"coherent state |alpha|={spec.alpha_mod}")
    meta = {"order": len(state.coeffs) - 1, "norm2": norm2}
    return GridProfile(x, phi, meta), GridProfile(x, psi, dict(meta))


def completeness_matrix(
    n_max: int = 6, r_max: float = 8.0, radial_nodes: int = 200, angular_nodes: int = 64
) -> np.ndarray:
    """Resolution of identity on span{Phi_0..Phi_n_max} from coherent projectors.

    Integrates |Phi_alpha><Phi_alpha| against
        dmu = (2 e^{r^2} - 1) / (2 pi) * e^{-r^2} r dr dtheta,   r = |alpha|,
    and adds |Phi_0><Phi_0| / 2. Radial nodes are Gauss-Legendre on [0, r_max],
    angular nodes a uniform periodic grid (exact for the trigonometric degrees
    that occur when angular_nodes > 2 n_max).
    """
    radial = numerics.gauss_legendre_rule(radial_nodes, 0.0, r_max)
    thetas = 2 * np.pi * np.arange(angular_nodes) / angular_nodes
    acc = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    for r, wr in zip(radial.nodes, radial.weights):
        # weight (2 e^{r^2} - 1) e^{-r^2} = 2 - e^{-r^2}
        w_rad = wr * (2.0 - np.exp(-r * r)) * r / (2 * np.pi)
        for th in thetas:
            a = coefficients_array(r * np.exp(1j * th), n_max)
            acc += (w_rad * 2 * np.pi / angular_nodes) * np.outer(a, a.conj())
    acc[0, 0] += 0.5
    return acc


def radial_tail(n_max: int, r_max: float) -> float:
    """Largest neglected diagonal mass past r_max: Gamma(n+1, r_max^2) / n! for n <= n_max."""
    return float(max(gammaincc(n + 1, r_max * r_max) for n in range(n_max + 1)))
