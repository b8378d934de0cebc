"""Densities, currents, quadrature variances, mean energy and drift velocity.

Every closed-form series is paired with a route that does not use it:
spatial sampling of M Phi for the densities, ket-algebra contraction for the
quadratures and the normalization. Closed forms written in the level-paired
inner product (see ``ladder``) normalize by

    D = 2 e^{r} - 1 - 2 beta eta Re(at) sum_n r^n / (n! sqrt(n+1)),   r = |at|^2,

which is not the spatial norm of Psi_alpha once beta Re(at) != 0. For
eta = +1 the Psi_n are orthonormal on the line and the spatial norm is
sum |a_n|^2 = 1; for eta = -1 it comes from ``coherent.spatial_norm2``.
All series below are carried with a factor e^{-r} to stay finite.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from . import eigensystem as es
from . import ladder, numerics
from .coherent import CoherentSpec, check_support, coherent_coefficients, render_coherent, spatial_norm2
from .errors import NegativeVariance, SeriesMismatch
from .numerics import DEFAULT_POLICY, GridProfile, TruncationPolicy

SERIES_RTOL = 1e-8


@dataclass(frozen=True)
class DensityPair:
    rho: GridProfile
    jy: GridProfile

    @property
    def x(self):
        return self.rho.x


@dataclass(frozen=True)
class HurResult:
    mean_s0: float
    mean_s1: float
    var_s0: float
    var_s1: float

    @property
    def sigma_zeta(self) -> float:
        return sqrt(self.var_s0)

    @property
    def sigma_p(self) -> float:
        return sqrt(self.var_s1)

    @property
    def product(self) -> float:
        return sqrt(self.var_s0 * self.var_s1)


def spinor_densities(psi: np.ndarray):
    """rho, j_x, j_y (units of e v_F) of a physical spinor sampled on a grid."""
    up, lo = psi
    rho = (np.abs(up) ** 2 + np.abs(lo) ** 2).real
    jx = 2.0 * np.real(np.conj(up) * lo)
    jy = 2.0 * np.imag(np.conj(up) * lo)
    return rho, jx, jy


def _phi_forms(phi: np.ndarray):
    """|Phi|^2 and Phi^dag sigma_y Phi."""
    up, lo = phi
    norm2 = (np.abs(up) ** 2 + np.abs(lo) ** 2).real
    sy = 2.0 * np.imag(np.conj(up) * lo)
    return norm2, sy


def density_eigen(n: int, cfg: es.FieldConfig, x=None) -> DensityPair:
    """rho_n = |Phi_n|^2 - beta Phi_n^dag sigma_y Phi_n and j_y = Phi_n^dag sigma_y Phi_n - beta |Phi_n|^2."""
    if x is None:
        x = es.default_grid(cfg, max(n, 1))
    x = np.asarray(x, dtype=float)
    phi = es.phi_n(n, x, cfg)
    check_support(es.apply_matrix(es.matrix_m(cfg.beta), phi), x, 1.0, what=f"level {n}")
    norm2, sy = _phi_forms(phi)
    meta = {"n": n, "beta": cfg.beta}
    return DensityPair(GridProfile(x, norm2 - cfg.beta * sy, meta), GridProfile(x, sy - cfg.beta * norm2, meta))


# ---------------------------------------------------------------- coherent densities

def _series_pieces(spec: CoherentSpec, cfg: es.FieldConfig, x, order: int, printed_cross: bool):
    """U, W, psi_0(zeta_0) and the cross double sum, all scaled by e^{-r/2} per factor."""
    at = spec.alpha_tilde
    r = abs(at) ** 2
    x = np.asarray(x, dtype=float)
    pref = (1.0 - cfg.beta ** 2) ** 0.125 / sqrt(cfg.l_B)
    # b_n = at^n / sqrt(n!) e^{-r/2}
    b = np.sqrt(numerics.poisson_weights(r, order)) * np.exp(1j * np.arange(order + 1) * np.angle(at))
    psi0 = pref * numerics.hermite_function(0, es.zeta(0, x, cfg))
    U = np.zeros(x.shape, dtype=complex)
    W = np.zeros(x.shape, dtype=complex)
    cross = np.zeros(x.shape, dtype=complex)
    for n in range(1, order + 1):
        h = pref * numerics.hermite_functions(n, es.zeta(n, x, cfg))
        U += b[n] * h[n - 1]
        W += b[n] * h[n]
        if printed_cross:
            # sum_m conj(b_m) psi_{m-1}(zeta_n), all m, at this n's argument
            hm = pref * numerics.hermite_functions(order - 1, es.zeta(n, x, cfg))
            inner = np.tensordot(np.conj(b[1:]), hm, axes=(0, 0))
            cross += inner * b[n] * h[n]
    if not printed_cross:
        cross = np.conj(U) * W
    return U, W, psi0, cross


def normalization_paper(spec: CoherentSpec, cfg: es.FieldConfig, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """e^{-r} D, the closed-form normalization shared by the coherent-state series."""
    at = spec.alpha_tilde
    r = abs(at) ** 2
    p = numerics.poisson_weights(r, spec.order(policy))
    s1 = np.sum(p / np.sqrt(np.arange(len(p)) + 1.0))
    return 2.0 - np.exp(-r) - 2.0 * cfg.beta * cfg.eta * at.real * s1


def density_series(
    spec: CoherentSpec, cfg: es.FieldConfig, x, form: str = "printed", policy: TruncationPolicy = DEFAULT_POLICY
) -> DensityPair:
    """Coherent-state rho and j_y from the closed double series.

    ``form="printed"`` evaluates the series as published: cross term
    psi_{m-1}(zeta_n) psi_n(zeta_n) and normalization D. ``form="consistent"``
    evaluates psi_{m-1}(zeta_m) psi_n(zeta_n) and normalizes by 2 e^{r} - 1,
    which is what expanding |M Phi_alpha|^2 gives; the two coincide at beta = 0.
    """
    if form not in ("printed", "consistent", "printed-cross", "printed-norm"):
        raise ValueError(f"unknown form {form!r}")
    order = spec.order(policy)
    printed_cross = form in ("printed", "printed-cross")
    U, W, psi0, cross = _series_pieces(spec, cfg, x, order, printed_cross)
    r = abs(spec.alpha_tilde) ** 2
    if form in ("printed", "printed-norm"):
        denom = normalization_paper(spec, cfg, policy)
    else:
        # e^{-r} |Psi_alpha|^2 / N^2; equals 2 - e^{-r} when the Psi_n are orthonormal
        a = coherent_coefficients(spec, policy).coeffs
        denom = spatial_norm2(a, cfg) * (2.0 - np.exp(-r))
    e0 = np.exp(-r)
    same = e0 * psi0 ** 2 + np.abs(W) ** 2 + np.abs(U) ** 2 + 2.0 * np.sqrt(e0) * np.real(W * psi0)
    mixed = np.sqrt(e0) * np.real(U * psi0) + np.real(cross)
    beta, eta = cfg.beta, cfg.eta
    rho = (same - 2.0 * beta * eta * mixed) / denom
    jy = (2.0 * eta * mixed - beta * same) / denom
    meta = {"form": form, "order": order}
    return DensityPair(GridProfile(x, rho, meta), GridProfile(x, jy, meta))


@dataclass(frozen=True)
class CoherentDensity:
    direct: DensityPair
    series: DensityPair
    deviation: float  # max |series - direct| over rho and j_y, relative to max rho

    @property
    def x(self):
        return self.direct.x

    @property
    def rho(self):
        return self.direct.rho

    @property
    def jy(self):
        return self.direct.jy


def density_direct(spec: CoherentSpec, cfg: es.FieldConfig, x=None, policy: TruncationPolicy = DEFAULT_POLICY) -> DensityPair:
    """rho = Psi^dag Psi / |Psi|^2 and j_y = Psi^dag sigma_y Psi / |Psi|^2 from the sampled state."""
    _, psi = render_coherent(spec, cfg, x, policy)
    norm2 = psi.meta["norm2"]
    rho, _, jy = spinor_densities(psi.values)
    meta = {"order": psi.meta["order"]}
    return DensityPair(GridProfile(psi.x, rho / norm2, meta), GridProfile(psi.x, jy / norm2, meta))


def density_coherent(
    spec: CoherentSpec,
    cfg: es.FieldConfig,
    x=None,
    form: str = "printed",
    check: bool = False,
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> CoherentDensity:
    """Coherent densities by both routes.

    With ``check=True`` a deviation above SERIES_RTOL * max(rho) raises
    SeriesMismatch; otherwise it is returned for reporting.
    """
    direct = density_direct(spec, cfg, x, policy)
    series = density_series(spec, cfg, direct.x, form, policy)
    scale = float(np.max(np.abs(direct.rho.values)))
    dev = max(
        float(np.max(np.abs(series.rho.values - direct.rho.values))),
        float(np.max(np.abs(series.jy.values - direct.jy.values))),
    ) / scale
    if check and dev > SERIES_RTOL:
        raise SeriesMismatch(f"{form} density series vs sampled state", dev, SERIES_RTOL)
    return CoherentDensity(direct, series, dev)


def series_discrepancy(spec: CoherentSpec, cfg: es.FieldConfig, x=None, policy: TruncationPolicy = DEFAULT_POLICY) -> dict:
    """Deviation from the sampled density for each combination of the two suspect pieces."""
    direct = density_direct(spec, cfg, x, policy)
    scale = float(np.max(direct.rho.values))
    out = {}
    for form in ("printed", "printed-cross", "printed-norm", "consistent"):
        s = density_series(spec, cfg, direct.x, form, policy)
        out[form] = max(
            float(np.max(np.abs(s.rho.values - direct.rho.values))),
            float(np.max(np.abs(s.jy.values - direct.jy.values))),
        ) / scale
    out["norm_ratio"] = float((2.0 - np.exp(-abs(spec.alpha_tilde) ** 2)) / normalization_paper(spec, cfg, policy))
    return out


# ---------------------------------------------------------------- quadratures

def hur_closed_form(spec: CoherentSpec, cfg: es.FieldConfig, policy: TruncationPolicy = DEFAULT_POLICY) -> HurResult:
    """Means of S_q and S_q^2 (q = 0, 1) from the closed series, then variances."""
    at = spec.alpha_tilde
    atc = np.conj(at)
    r = abs(at) ** 2
    order = spec.order(policy) + 3
    p = numerics.poisson_weights(r, order)
    n = np.arange(order + 1, dtype=float)
    pos = n >= 1
    e0 = np.exp(-r)
    be = cfg.beta * cfg.eta
    D = normalization_paper(spec, cfg, policy)

    a1 = 1.0 + np.sum(p[pos] * np.sqrt(n[pos] / (n[pos] + 1)))
    s_n2 = np.sum(p / np.sqrt(n + 2))
    s_sqrt = np.sum(p[pos] * np.sqrt(n[pos]))
    a2 = 1.0 + np.sum(p[pos] * np.sqrt(n[pos] / (n[pos] + 2)))
    s_odd = np.sum(p * (2 * n + 1) / np.sqrt(n + 1))
    s_n3 = np.sum(p / np.sqrt(n + 3))

    means, seconds = [], []
    for q in (0, 1):
        sg = (-1) ** q
        m1 = (at + sg * atc) * a1 - be * ((at ** 2 + sg * atc ** 2) * s_n2 + (1 + sg) * s_sqrt)
        m1 = m1 / (sqrt(2.0) * (1j ** q) * D)
        m2 = (
            e0 + 4 * r + sg * (at ** 2 + atc ** 2) * a2
            - be * ((at + atc) * (s_odd + sg * s_sqrt) + sg * (at ** 3 + atc ** 3) * s_n3)
        ) / (2.0 * D)
        means.append(m1)
        seconds.append(m2)
    return _hur_from_moments(means, seconds)


def _hur_from_moments(means, seconds) -> HurResult:
    vals = []
    for m1, m2 in zip(means, seconds):
        if abs(np.imag(m1)) > 1e-9 * max(1.0, abs(m1)) or abs(np.imag(m2)) > 1e-9 * max(1.0, abs(m2)):
            raise NegativeVariance(f"non-real moment: <S>={m1}, <S^2>={m2}")
        m1, m2 = float(np.real(m1)), float(np.real(m2))
        var = m2 - m1 * m1
        if var <= 0:
            raise NegativeVariance(f"variance {var:.3e} from <S>={m1}, <S^2>={m2}")
        vals.append((m1, var))
    return HurResult(vals[0][0], vals[1][0], vals[0][1], vals[1][1])


def _metric_expectation(phi: ladder.SpinorKets, applied: ladder.SpinorKets, beta: float) -> complex:
    """<Phi| X |Phi> - beta <Phi| sigma_y X |Phi> for applied = X Phi."""
    return phi.inner(applied) - beta * phi.inner(applied.sigma_y())


def coherent_kets(spec: CoherentSpec, cfg: es.FieldConfig, policy: TruncationPolicy = DEFAULT_POLICY) -> ladder.SpinorKets:
    return ladder.expand_kets(coherent_coefficients(spec, policy).coeffs, cfg.eta)


def norm_kets(spec: CoherentSpec, cfg: es.FieldConfig, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """<Phi_alpha| (I - beta sigma_y) |Phi_alpha> in the level-paired product (= N^2 D)."""
    phi = coherent_kets(spec, cfg, policy)
    return float(np.real(_metric_expectation(phi, phi, cfg.beta)))


def hur_oracle(spec: CoherentSpec, cfg: es.FieldConfig, policy: TruncationPolicy = DEFAULT_POLICY) -> HurResult:
    """Quadrature moments by applying Q^{+-} to the kets of Phi_alpha and contracting."""
    phi = coherent_kets(spec, cfg, policy)
    den = _metric_expectation(phi, phi, cfg.beta)
    means, seconds = [], []
    for q in (0, 1):
        s = ladder.quadrature(q)
        s_phi = phi.map(s)
        ss_phi = s_phi.map(s)
        means.append(_metric_expectation(phi, s_phi, cfg.beta) / den)
        seconds.append(_metric_expectation(phi, ss_phi, cfg.beta) / den)
    return _hur_from_moments(means, seconds)


# ---------------------------------------------------------------- energy and velocity

def mean_energy(spec: CoherentSpec, cfg: es.FieldConfig, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Closed form: D^{-1} [k beta (1 - 2 e^r) + 2 (1-beta^2)^{3/4}/l_B sum_{n>=1} r^n sqrt(2n)/n!]."""
    r = abs(spec.alpha_tilde) ** 2
    p = numerics.poisson_weights(r, spec.order(policy))
    n = np.arange(len(p), dtype=float)
    level_sum = np.sum(p[1:] * np.sqrt(2 * n[1:]))
    bracket = cfg.k * cfg.beta * (np.exp(-r) - 2.0) + 2.0 * (1 - cfg.beta ** 2) ** 0.75 / cfg.l_B * level_sum
    return float(bracket / normalization_paper(spec, cfg, policy))


def mean_energy_coefficients(spec: CoherentSpec, cfg: es.FieldConfig, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """sum |a_n|^2 E_n over the ket-algebra normalization <Phi|(I - beta sigma_y)|Phi>."""
    a = coherent_coefficients(spec, policy).coeffs
    energies = np.array([es.energy(n, cfg) for n in range(len(a))])
    return float(np.sum(np.abs(a) ** 2 * energies) / norm_kets(spec, cfg, policy))


def mean_velocity_coherent(spec: CoherentSpec, cfg: es.FieldConfig, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """<v_y> = D^{-1} v_d (1 - 2 e^r), with v_d = beta in natural units."""
    r = abs(spec.alpha_tilde) ** 2
    return float(cfg.beta * (np.exp(-r) - 2.0) / normalization_paper(spec, cfg, policy))


def mean_velocity_fd(spec: CoherentSpec, cfg: es.FieldConfig, dk: float = 1e-6, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Central difference of mean_energy in k."""
    up = mean_energy(spec, cfg.replace(k=cfg.k + dk), policy)
    dn = mean_energy(spec, cfg.replace(k=cfg.k - dk), policy)
    return (up - dn) / (2 * dk)


def eigen_velocity_fd(n: int, cfg: es.FieldConfig, dk: float = 1e-6) -> float:
    return (es.energy(n, cfg.replace(k=cfg.k + dk)) - es.energy(n, cfg.replace(k=cfg.k - dk))) / (2 * dk)


def eigen_velocity_quadrature(n: int, cfg: es.FieldConfig, x=None) -> float:
    """int j_y dx / int rho dx for level n."""
    pair = density_eigen(n, cfg, x)
    rule = numerics.trapezoid_rule(pair.x)
    return float(numerics.integrate(pair.jy, rule) / numerics.integrate(pair.rho, rule))


def velocity_ratio(spec: CoherentSpec, cfg: es.FieldConfig, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """<v_y>_alpha / v_d, finite at beta = 0 where it reduces to -1."""
    r = abs(spec.alpha_tilde) ** 2
    return float((np.exp(-r) - 2.0) / normalization_paper(spec, cfg, policy))
