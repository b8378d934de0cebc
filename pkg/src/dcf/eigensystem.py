"""Dirac-Weyl eigensystem of graphene in crossed fields.

Natural units hbar = v_F = c = e = 1: l_B^2 = 1/B and omega_B = 2/l_B^2.
The plane wave exp(iky) is factored out of every state, so spinors here are
functions of x only, stored as complex arrays of shape ``(2, len(x))``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial, sqrt

import numpy as np

from . import numerics

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class FieldConfig:
    """Magnetic strength B, drift ratio beta = E/B (in units of v_F), momentum k, valley eta."""

    B: float = 0.5
    beta: float = 0.0
    k: float = 0.0
    eta: int = 1

    def __post_init__(self):
        if not (np.isfinite(self.B) and self.B > 0):
            raise ValueError(f"B must be positive, got {self.B}")
        if not 0.0 <= self.beta < 1.0:
            raise ValueError(f"beta must satisfy 0 <= beta < 1, got {self.beta}")
        if not np.isfinite(self.k):
            raise ValueError("k must be finite")
        if self.eta not in (1, -1):
            raise ValueError(f"eta must be +1 or -1, got {self.eta}")

    @property
    def l_B(self) -> float:
        return 1.0 / sqrt(self.B)

    @property
    def omega_B(self) -> float:
        return 2.0 * self.B

    @property
    def contraction(self) -> float:
        """sqrt(1 - beta^2), the Lorentz-like factor behind level collapse."""
        return sqrt(1.0 - self.beta * self.beta)

    def replace(self, **changes) -> "FieldConfig":
        fields = dict(B=self.B, beta=self.beta, k=self.k, eta=self.eta)
        fields.update(changes)
        return FieldConfig(**fields)


def _sgn(n: int, band: int) -> int:
    if band not in (1, -1):
        raise ValueError("band must be +1 (conduction) or -1 (valence)")
    if n < 0:
        raise ValueError("level index must be non-negative")
    return band


def energy(n: int, cfg: FieldConfig, band: int = 1) -> float:
    """E_n = sgn (1-beta^2)^{3/4} sqrt(2n)/l_B - k beta, with sgn(0) = +1."""
    s = _sgn(n, band)
    return s * (1.0 - cfg.beta ** 2) ** 0.75 * sqrt(2.0 * n) / cfg.l_B - cfg.k * cfg.beta


def zeta(n: int, x, cfg: FieldConfig, band: int = 1):
    """Shifted, compressed coordinate in which level n is a Hermite function."""
    s = _sgn(n, band)
    q = (1.0 - cfg.beta ** 2) ** 0.25
    lB = cfg.l_B
    x = np.asarray(x, dtype=float)
    return q / lB * (x + lB * lB * cfg.k + s * cfg.beta * lB * sqrt(2.0 * n) / q)


def level_center(n: int, cfg: FieldConfig) -> float:
    """The x at which zeta_n vanishes."""
    q = (1.0 - cfg.beta ** 2) ** 0.25
    lB = cfg.l_B
    return -lB * lB * cfg.k - cfg.beta * lB * sqrt(2.0 * n) / q


def psi_level(level: int, center: int, x, cfg: FieldConfig):
    """psi_level evaluated at zeta_center: (1-beta^2)^{1/8} l_B^{-1/2} h_level(zeta_center)."""
    pref = (1.0 - cfg.beta ** 2) ** 0.125 / sqrt(cfg.l_B)
    return pref * numerics.hermite_function(level, zeta(center, x, cfg))


def psi_scalar(n: int, x, cfg: FieldConfig):
    """Normalized scalar wavefunction psi_n(zeta_n), written with D_n.

    Equal to (1-beta^2)^{1/8} / sqrt(n!) (omega_B / 2 pi)^{1/4} D_n(sqrt(2) zeta_n).
    Evaluation goes through the Hermite-function recurrence (psi_level);
    this form exists to pin the parabolic-cylinder normalization.
    """
    z = zeta(n, x, cfg)
    pref = (1.0 - cfg.beta ** 2) ** 0.125 * (cfg.omega_B / (2 * np.pi)) ** 0.25
    if n <= 170:
        return pref / sqrt(factorial(n)) * numerics.pcf_d(n, sqrt(2.0) * z)
    return psi_level(n, n, x, cfg)


def matrix_m(beta: float) -> np.ndarray:
    """Hermitian similarity matrix (sqrt(C+) I - sqrt(C-) sigma_y) / sqrt(2)."""
    if not 0.0 <= beta < 1.0:
        raise ValueError("beta must satisfy 0 <= beta < 1")
    c = sqrt(1.0 - beta * beta)
    return sqrt(0.5) * (sqrt(1.0 + c) * IDENTITY - sqrt(1.0 - c) * SIGMA_Y)


def matrix_m_eigen(beta: float):
    """Eigenvalues mu_1, mu_2 and the x-rotation U(pi/4) = exp(i pi/4 sigma_x)."""
    c = sqrt(1.0 - beta * beta)
    cp, cm = sqrt(1.0 + c), sqrt(1.0 - c)
    mu = np.array([(cp - cm) / sqrt(2.0), (cp + cm) / sqrt(2.0)])
    tau = np.pi / 4
    u = np.cos(tau) * IDENTITY + 1j * np.sin(tau) * SIGMA_X
    return mu, u


def phi_n(n: int, x, cfg: FieldConfig) -> np.ndarray:
    """Auxiliary spinor (psi_{n-1}(zeta_n), i eta psi_n(zeta_n)) / sqrt(2), or (0, i eta psi_0) at n=0."""
    x = np.asarray(x, dtype=float)
    out = np.zeros((2,) + x.shape, dtype=complex)
    lower = 1j * cfg.eta * psi_level(n, n, x, cfg)
    if n == 0:
        out[1] = lower
    else:
        out[0] = psi_level(n - 1, n, x, cfg) / sqrt(2.0)
        out[1] = lower / sqrt(2.0)
    return out


def apply_matrix(m: np.ndarray, spinor: np.ndarray) -> np.ndarray:
    return np.tensordot(m, spinor, axes=(1, 0))


def psi_spinor(n: int, x, cfg: FieldConfig) -> np.ndarray:
    """Physical eigenspinor M Phi_n; unit norm, though M itself is not unitary."""
    return apply_matrix(matrix_m(cfg.beta), phi_n(n, x, cfg))


def mean_velocity_eigen(cfg: FieldConfig) -> float:
    """dE_n/dk = -beta, the same for every level."""
    return -cfg.beta


def k_matrix(beta: float) -> np.ndarray:
    """K = i (beta sigma_x + sigma_x sigma_y) from the second-order decoupling."""
    return 1j * (beta * SIGMA_X + SIGMA_X @ SIGMA_Y)


def k_matrix_eigensystem(beta: float):
    """Eigenvalues lambda_k = (-1)^k sqrt(1-beta^2), k = 1, 2, and eigenvectors chi as columns."""
    c = sqrt(1.0 - beta * beta)
    cp, cm = sqrt(1.0 + c), sqrt(1.0 - c)
    lam = np.array([-c, c])
    chi = np.array([[cp, -cm], [-1j * cm, 1j * cp]]) / sqrt(2.0)
    return lam, chi


def weber_residual(n: int, component: int, z, cfg: FieldConfig) -> np.ndarray:
    """Finite-difference residual of the Weber equation in zeta.

    ``component`` 1 checks psi_{n-1} against lambda_1, component 2 checks
    psi_n against lambda_2. Edge points of the stencil are returned as 0.
    """
    if component not in (1, 2):
        raise ValueError("component must be 1 or 2")
    if component == 1 and n == 0:
        raise ValueError("level 0 has no upper component")
    z = np.asarray(z, dtype=float)
    s = 1.0 - cfg.beta ** 2
    lam = k_matrix_eigensystem(cfg.beta)[0][component - 1]
    eps0_lB = s ** 0.75 * sqrt(2.0 * n)
    level = n - 1 if component == 1 else n
    f = numerics.hermite_function(level, z)
    d2 = numerics.second_difference(f, z[1] - z[0])
    res = d2 + (-z * z + eps0_lB ** 2 / s ** 1.5 + lam / sqrt(s)) * f
    res[:2] = res[-2:] = 0.0
    return res


def hamiltonian_residual(n: int, x, cfg: FieldConfig, order: int = 2) -> np.ndarray:
    """(H - E_n) M Phi_n on the grid, with H = -i sigma_x d/dx + sigma_y xi/l_B + beta x/l_B^2.

    The derivative uses a centered stencil of the given order; the stencil
    edges are zeroed.
    """
    x = np.asarray(x, dtype=float)
    spinor = psi_spinor(n, x, cfg)
    d = numerics.central_difference(spinor, x[1] - x[0], order=order)
    lB = cfg.l_B
    xi = (x + lB * lB * cfg.k) / lB
    h_psi = (
        -1j * apply_matrix(SIGMA_X, d)
        + apply_matrix(SIGMA_Y, spinor) * xi / lB
        + cfg.beta * x / (lB * lB) * spinor
    )
    res = h_psi - energy(n, cfg) * spinor
    m = order // 2
    res[:, :m] = res[:, -m:] = 0.0
    return res


def default_grid(cfg: FieldConfig, n_max: int, points: int = 4001, n_min: int = 0) -> np.ndarray:
    """Grid covering levels n_min..n_max with 12 Gaussian widths of margin.

    Widths are l_B (1-beta^2)^{-1/4}; the margin also includes the classical
    turning point sqrt(2 n_max + 1) of the highest level.
    """
    width = cfg.l_B * (1.0 - cfg.beta ** 2) ** -0.25
    margin = (12.0 + sqrt(2.0 * n_max + 1.0)) * width
    lo = level_center(n_max, cfg) - margin
    hi = level_center(n_min, cfg) + margin
    # keep the highest level's oscillations resolved: ~20 points per node spacing
    max_spacing = width * np.pi / sqrt(2.0 * n_max + 1.0) / 20.0
    return numerics.support_grid(lo, hi, points, max_spacing=max_spacing)
