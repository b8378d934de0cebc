"""Special functions, quadrature and series truncation.

Hermite functions are evaluated through the normalized three-term recurrence,
which stays bounded where raw Hermite polynomials overflow (n around 150).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import lgamma, log, pi, sqrt

import numpy as np
from scipy.special import gammainc, gammaln

from .errors import GridMismatch, TruncationCapExceeded

TRAPEZOID = "trapezoid"
GAUSS_HERMITE = "gauss-hermite"
GAUSS_LEGENDRE = "gauss-legendre"
_KINDS = (TRAPEZOID, GAUSS_HERMITE, GAUSS_LEGENDRE)


@dataclass(frozen=True)
class TruncationPolicy:
    """Relative tail bound and hard cap for the e^{|a|^2} power series."""

    tol: float = 1e-12
    hard_cap: int = 200

    def __post_init__(self):
        if not 0.0 < self.tol < 1.0:
            raise ValueError(f"tol must lie in (0, 1), got {self.tol}")
        if self.hard_cap < 1:
            raise ValueError(f"hard_cap must be >= 1, got {self.hard_cap}")


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    kind: str = TRAPEZOID

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise ValueError("nodes and weights must be 1-d arrays of equal length")
        if nodes.size > 1 and np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if np.any(weights <= 0):
            raise ValueError("weights must be positive")
        if self.kind not in _KINDS:
            raise ValueError(f"unknown quadrature kind {self.kind!r}")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)


@dataclass(frozen=True)
class GridProfile:
    """Samples of a function on a real grid.

    ``values`` has the grid along its last axis, so spinor profiles are
    stored with shape ``(2, len(x))``.
    """

    x: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        values = np.asarray(self.values)
        if x.ndim != 1 or values.shape[-1] != x.size:
            raise ValueError("values must have the grid along the last axis")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", values)


def trapezoid_rule(x) -> QuadratureRule:
    x = np.asarray(x, dtype=float)
    dx = np.diff(x)
    w = np.zeros_like(x)
    w[:-1] += dx / 2
    w[1:] += dx / 2
    return QuadratureRule(x, w, TRAPEZOID)


def gauss_hermite_rule(n: int) -> QuadratureRule:
    """Nodes/weights for integrals of f(x) e^{-x^2} over the real line."""
    nodes, weights = np.polynomial.hermite.hermgauss(n)
    return QuadratureRule(nodes, weights, GAUSS_HERMITE)


def gauss_legendre_rule(n: int, a: float, b: float) -> QuadratureRule:
    nodes, weights = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return QuadratureRule(half * nodes + 0.5 * (a + b), half * weights, GAUSS_LEGENDRE)


def integrate(profile: GridProfile, rule: QuadratureRule):
    """Weighted sum over the last axis of ``profile.values``.

    For Gauss-Hermite rules the profile holds f(x) without the e^{-x^2}
    weight.
    """
    if profile.x.shape != rule.nodes.shape or not np.allclose(
        profile.x, rule.nodes, rtol=0, atol=1e-12 * max(1.0, np.abs(rule.nodes).max())
    ):
        raise GridMismatch("profile grid does not match quadrature nodes")
    return profile.values @ rule.weights


def hermite_functions(n_max: int, z) -> np.ndarray:
    """All normalized Hermite functions h_0..h_{n_max} at z.

    Returns an array of shape ``(n_max + 1,) + z.shape``.
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    z = np.asarray(z, dtype=float)
    out = np.empty((n_max + 1,) + z.shape)
    out[0] = pi ** -0.25 * np.exp(-0.5 * z * z)
    if n_max >= 1:
        out[1] = sqrt(2.0) * z * out[0]
    for n in range(1, n_max):
        out[n + 1] = sqrt(2.0 / (n + 1)) * z * out[n] - sqrt(n / (n + 1)) * out[n - 1]
    return out


def hermite_function(n: int, z):
    """h_n(z) = (2^n n! sqrt(pi))^{-1/2} e^{-z^2/2} H_n(z)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    z = np.asarray(z, dtype=float)
    prev = np.zeros_like(z)
    cur = pi ** -0.25 * np.exp(-0.5 * z * z)
    for k in range(n):
        prev, cur = cur, sqrt(2.0 / (k + 1)) * z * cur - sqrt(k / (k + 1)) * prev
    return cur if cur.ndim else float(cur)


def pcf_d(n: int, z):
    """Parabolic cylinder function D_n(z) for integer n >= 0.

    Uses D_n(z) = sqrt(n! sqrt(pi)) h_n(z / sqrt(2)).
    """
    scale = np.exp(0.5 * lgamma(n + 1) + 0.25 * log(pi))
    return scale * hermite_function(n, np.asarray(z, dtype=float) / sqrt(2.0))


def poisson_tail(n: int, r: float) -> float:
    """e^{-r} * sum_{j > n} r^j / j!, the relative tail of e^r after n."""
    if r == 0.0:
        return 0.0
    return float(gammainc(n + 1, r))


def truncation_order(alpha_mod: float, policy: TruncationPolicy = DEFAULT_POLICY) -> int:
    """Smallest N with sum_{n>N} |a|^{2n}/n! < tol * e^{|a|^2}.

    Raises TruncationCapExceeded when N would pass ``policy.hard_cap``.
    """
    if alpha_mod < 0:
        raise ValueError("alpha_mod must be non-negative")
    r = alpha_mod * alpha_mod
    if r == 0.0:
        return 0
    # the tail is decreasing in N, so bisect on [0, hard_cap]
    cap_tail = poisson_tail(policy.hard_cap, r)
    if cap_tail >= policy.tol:
        raise TruncationCapExceeded(alpha_mod, policy.tol, policy.hard_cap, cap_tail)
    lo, hi = -1, policy.hard_cap
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if poisson_tail(mid, r) < policy.tol:
            hi = mid
        else:
            lo = mid
    return hi


def poisson_weights(r: float, n_max: int) -> np.ndarray:
    """r^n e^{-r} / n! for n = 0..n_max, computed in log space."""
    n = np.arange(n_max + 1)
    if r == 0.0:
        out = np.zeros(n_max + 1)
        out[0] = 1.0
        return out
    return np.exp(n * log(r) - r - gammaln(n + 1))


def central_difference(values, spacing: float, order: int = 6) -> np.ndarray:
    """First derivative along the last axis with a centered stencil.

    ``order`` is 2, 4 or 6 in the interior; edge points fall back to
    ``np.gradient`` and should be discarded by callers.
    """
    stencils = {
        2: ([1], [1 / 2]),
        4: ([1, 2], [2 / 3, -1 / 12]),
        6: ([1, 2, 3], [3 / 4, -3 / 20, 1 / 60]),
    }
    if order not in stencils:
        raise ValueError("order must be 2, 4 or 6")
    values = np.asarray(values)
    out = np.gradient(values, spacing, axis=-1)
    offsets, coeffs = stencils[order]
    m = offsets[-1]
    n = values.shape[-1]
    interior = np.zeros(values.shape[:-1] + (n - 2 * m,), dtype=np.result_type(values, float))
    for k, c in zip(offsets, coeffs):
        interior += c * (values[..., m + k : n - m + k] - values[..., m - k : n - m - k])
    out = out.astype(interior.dtype, copy=False)
    out[..., m : n - m] = interior / spacing
    return out


def second_difference(values, spacing: float) -> np.ndarray:
    """Fourth-order centered second derivative; the two edge points per side are zero."""
    values = np.asarray(values)
    out = np.zeros_like(values, dtype=np.result_type(values, float))
    out[..., 2:-2] = (
        -values[..., 4:] + 16 * values[..., 3:-1] - 30 * values[..., 2:-2]
        + 16 * values[..., 1:-3] - values[..., :-4]
    ) / (12 * spacing * spacing)
    return out


def support_grid(lo: float, hi: float, points: int = 4001, max_spacing: float | None = None) -> np.ndarray:
    """Uniform grid on [lo, hi], refined beyond ``points`` if spacing demands it."""
    if hi <= lo:
        raise ValueError("grid bounds must satisfy lo < hi")
    if max_spacing is not None:
        points = max(points, int(np.ceil((hi - lo) / max_spacing)) + 1)
    return np.linspace(lo, hi, points)
