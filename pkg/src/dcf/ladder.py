"""Symbolic ladder algebra on kets psi_level(zeta_center).

A LadderKet keeps the level index (moved by theta^{+-}) apart from the index
of the shifted coordinate it is evaluated at (moved by the shift operators
T^{+-}). Operators act on indices only; sampling on a grid is left to
``render``.

Inner products pair kets by level and ignore the center. Under this pairing
the auxiliary spinors Phi_n are orthonormal, and it is the inner product in
which the coherent-state closed forms are written. It is not the L^2 product
of the sampled functions once beta > 0 (differently centred Hermite functions
overlap); the physical, spatial norm is the one of M Phi.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt
from typing import Callable, Iterable, Optional

import numpy as np

from .errors import NonScalarCommutator


@dataclass(frozen=True)
class LadderKet:
    level: int
    center: int
    coeff: complex = 1.0

    def __post_init__(self):
        if self.level < 0 or self.center < 0:
            raise ValueError(f"ket indices must be non-negative: ({self.level}, {self.center})")


KetOp = Callable[[LadderKet], Optional[LadderKet]]


def theta_minus(ket: LadderKet) -> Optional[LadderKet]:
    """Lower the level at fixed argument; None when level 0 is annihilated."""
    if ket.level == 0:
        return None
    return LadderKet(ket.level - 1, ket.center, ket.coeff * sqrt(ket.level))


def theta_plus(ket: LadderKet) -> LadderKet:
    return LadderKet(ket.level + 1, ket.center, ket.coeff * sqrt(ket.level + 1))


def shift_minus(ket: LadderKet) -> LadderKet:
    if ket.center == 0:
        raise ValueError("shift_minus needs center >= 1")
    return LadderKet(ket.level, ket.center - 1, ket.coeff)


def shift_plus(ket: LadderKet) -> LadderKet:
    return LadderKet(ket.level, ket.center + 1, ket.coeff)


def q_minus(ket: LadderKet) -> Optional[LadderKet]:
    """T^- theta^-."""
    lowered = theta_minus(ket)
    return None if lowered is None else shift_minus(lowered)


def q_plus(ket: LadderKet) -> LadderKet:
    """theta^+ T^+."""
    return theta_plus(shift_plus(ket))


def number(ket: LadderKet) -> LadderKet:
    return LadderKet(ket.level, ket.center, ket.coeff * ket.level)


class KetSum:
    """Linear combination of kets, merged on (level, center)."""

    __slots__ = ("terms",)

    def __init__(self, kets: Iterable[LadderKet] = ()):
        self.terms: dict[tuple[int, int], complex] = {}
        for ket in kets:
            self._add(ket.level, ket.center, ket.coeff)

    def _add(self, level, center, coeff):
        key = (level, center)
        self.terms[key] = self.terms.get(key, 0.0) + coeff

    @classmethod
    def of(cls, level: int, center: int, coeff: complex = 1.0) -> "KetSum":
        return cls([LadderKet(level, center, coeff)])

    def kets(self) -> list[LadderKet]:
        return [LadderKet(l, m, c) for (l, m), c in sorted(self.terms.items()) if c != 0]

    def apply(self, op: KetOp) -> "KetSum":
        out = KetSum()
        for (l, m), c in self.terms.items():
            r = op(LadderKet(l, m, c))
            if r is not None:
                out._add(r.level, r.center, r.coeff)
        return out

    def __add__(self, other: "KetSum") -> "KetSum":
        out = KetSum()
        out.terms = dict(self.terms)
        for (l, m), c in other.terms.items():
            out._add(l, m, c)
        return out

    def __sub__(self, other: "KetSum") -> "KetSum":
        return self + other * -1.0

    def __mul__(self, scalar: complex) -> "KetSum":
        out = KetSum()
        out.terms = {k: c * scalar for k, c in self.terms.items()}
        return out

    __rmul__ = __mul__

    def coefficient(self, level: int, center: int) -> complex:
        return self.terms.get((level, center), 0.0)

    def by_level(self) -> dict[int, complex]:
        out: dict[int, complex] = {}
        for (l, _), c in self.terms.items():
            out[l] = out.get(l, 0.0) + c
        return out

    def inner(self, other: "KetSum") -> complex:
        """<self|other>, pairing kets by level."""
        a, b = self.by_level(), other.by_level()
        return sum(np.conj(c) * b[l] for l, c in a.items() if l in b)

    def is_zero(self, atol: float = 0.0) -> bool:
        return all(abs(c) <= atol for c in self.terms.values())

    def __repr__(self):
        body = " + ".join(f"({c:.6g})|{l},{m}>" for (l, m), c in sorted(self.terms.items()))
        return f"KetSum({body or '0'})"


@dataclass
class SpinorKets:
    """Two-component spinor whose components are ket sums."""

    upper: KetSum = field(default_factory=KetSum)
    lower: KetSum = field(default_factory=KetSum)

    def __add__(self, other):
        return SpinorKets(self.upper + other.upper, self.lower + other.lower)

    def __sub__(self, other):
        return SpinorKets(self.upper - other.upper, self.lower - other.lower)

    def __mul__(self, scalar):
        return SpinorKets(self.upper * scalar, self.lower * scalar)

    __rmul__ = __mul__

    def apply(self, op: KetOp) -> "SpinorKets":
        """Scalar operator promoted to s (x) I."""
        return SpinorKets(self.upper.apply(op), self.lower.apply(op))

    def map(self, f: Callable[[KetSum], KetSum]) -> "SpinorKets":
        return SpinorKets(f(self.upper), f(self.lower))

    def sigma_y(self) -> "SpinorKets":
        return SpinorKets(self.lower * -1j, self.upper * 1j)

    def inner(self, other: "SpinorKets") -> complex:
        return self.upper.inner(other.upper) + self.lower.inner(other.lower)


def phi_kets(n: int, eta: int = 1) -> SpinorKets:
    """Phi_n = ((1-d_{0n}) psi_{n-1}(zeta_n), i eta psi_n(zeta_n)) / sqrt(2^{1-d_{0n}})."""
    if n == 0:
        return SpinorKets(KetSum(), KetSum.of(0, 0, 1j * eta))
    r = sqrt(0.5)
    return SpinorKets(KetSum.of(n - 1, n, r), KetSum.of(n, n, 1j * eta * r))


def expand_kets(coeffs, eta: int = 1) -> SpinorKets:
    """sum_n a_n Phi_n as a spinor of ket sums."""
    out = SpinorKets()
    for n, a in enumerate(coeffs):
        if a != 0:
            out = out + phi_kets(n, eta) * a
    return out


def project_phi(state: SpinorKets, n_max: int, eta: int = 1) -> np.ndarray:
    """Coefficients <Phi_n|state> for n <= n_max; exact when state lies in span{Phi}."""
    return np.array([phi_kets(n, eta).inner(state) for n in range(n_max + 1)], dtype=complex)


def residual_outside_phi(state: SpinorKets, n_max: int, eta: int = 1) -> float:
    """Norm of what is left after removing the Phi_n components of ``state``."""
    left = state - expand_kets(project_phi(state, n_max, eta), eta)
    return sqrt(abs(left.inner(left)))


@dataclass
class SpinorExpansion:
    """Coefficients a_n on the auxiliary spinors Phi_n, with operator phase delta."""

    coeffs: np.ndarray
    delta: float = 0.0

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex).ravel()

    @classmethod
    def basis(cls, n: int, delta: float = 0.0, length: Optional[int] = None) -> "SpinorExpansion":
        c = np.zeros(max(n + 1, length or 0), dtype=complex)
        c[n] = 1.0
        return cls(c, delta)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    def inner(self, other: "SpinorExpansion") -> complex:
        m = min(len(self.coeffs), len(other.coeffs))
        return complex(np.vdot(self.coeffs[:m], other.coeffs[:m]))

    def padded(self, length: int) -> np.ndarray:
        out = np.zeros(max(length, len(self.coeffs)), dtype=complex)
        out[: len(self.coeffs)] = self.coeffs
        return out


def big_theta_minus(state: SpinorExpansion) -> SpinorExpansion:
    """Phi_n -> e^{i delta} sqrt(n) / sqrt(2^{d_{1n}}) Phi_{n-1}."""
    a = state.coeffs
    n = np.arange(len(a))
    factor = np.exp(1j * state.delta) * np.sqrt(n) / np.where(n == 1, sqrt(2.0), 1.0)
    out = (factor * a)[1:]
    if out.size == 0:
        out = np.zeros(1, dtype=complex)
    return SpinorExpansion(out, state.delta)


def big_theta_plus(state: SpinorExpansion) -> SpinorExpansion:
    """Adjoint of big_theta_minus: Phi_n -> e^{-i delta} sqrt(n+1) / sqrt(2^{d_{0n}}) Phi_{n+1}."""
    a = state.coeffs
    n = np.arange(len(a))
    factor = np.exp(-1j * state.delta) * np.sqrt(n + 1) / np.where(n == 0, sqrt(2.0), 1.0)
    out = np.zeros(len(a) + 1, dtype=complex)
    out[1:] = factor * a
    return SpinorExpansion(out, state.delta)


def tilde_theta_plus(state: SpinorExpansion) -> SpinorExpansion:
    """Phi_n -> sqrt(2^{2-d_{0n}}) e^{-i delta} sqrt(n+1) Phi_{n+1}."""
    a = state.coeffs
    n = np.arange(len(a))
    factor = np.exp(-1j * state.delta) * np.sqrt(n + 1) * np.where(n == 0, sqrt(2.0), 2.0)
    out = np.zeros(len(a) + 1, dtype=complex)
    out[1:] = factor * a
    return SpinorExpansion(out, state.delta)


def commutator_c(n: int, atol: float = 1e-12) -> int:
    """Scalar c(n) with [Theta^-, tilde Theta^+] Phi_n = c(n) Phi_n."""
    basis = SpinorExpansion.basis(n)
    ab = big_theta_minus(tilde_theta_plus(basis)).padded(n + 2)
    ba = tilde_theta_plus(big_theta_minus(basis)).padded(n + 2)
    diff = ab - ba
    value = diff[n]
    rest = np.delete(diff, n)
    if np.any(np.abs(rest) > atol) or abs(value.imag) > atol:
        raise NonScalarCommutator(f"[Theta^-, tilde Theta^+] Phi_{n} is not a multiple of Phi_{n}")
    c = int(round(value.real))
    if abs(value.real - c) > atol:
        raise NonScalarCommutator(f"c({n}) = {value.real} is not an integer")
    return c


# Matrix realizations acting component-wise on ket sums. The level-dependent
# factors (functions of the number operator) are read off each ket after the
# theta operators have acted.

def _scale_by_level(f: Callable[[int], float]) -> KetOp:
    return lambda k: LadderKet(k.level, k.center, k.coeff * f(k.level))


def _compose(*ops: KetOp) -> KetOp:
    """Right-to-left composition, propagating annihilation."""
    def op(ket):
        for o in reversed(ops):
            if ket is None:
                return None
            ket = o(ket)
        return ket
    return op


def matrix_theta_minus(state: SpinorKets, delta: float = 0.0, eta: int = 1) -> SpinorKets:
    """T^- applied after the 2x2 operator matrix

        [[cos d sqrt(N+2)/sqrt(N+1) theta^-,   eta sin d (N+1)^{-1/2} (theta^-)^2],
         [-eta sin d sqrt(N+1),                 cos d theta^-                   ]].
    """
    c, s = np.cos(delta), np.sin(delta)
    a11 = _compose(_scale_by_level(lambda l: c * sqrt(l + 2) / sqrt(l + 1)), theta_minus)
    a12 = _compose(_scale_by_level(lambda l: eta * s / sqrt(l + 1)), theta_minus, theta_minus)
    a21 = _scale_by_level(lambda l: -eta * s * sqrt(l + 1))
    a22 = _compose(_scale_by_level(lambda l: c), theta_minus)
    up = state.upper.apply(a11) + state.lower.apply(a12)
    lo = state.upper.apply(a21) + state.lower.apply(a22)
    return SpinorKets(up, lo).apply(shift_minus)


def matrix_tilde_theta_plus(state: SpinorKets, delta: float = 0.0, eta: int = 1) -> SpinorKets:
    """e^{-i d} times the 2x2 matrix below, applied after T^+

        [[theta^+ sqrt(N+2)/sqrt(N+1),        -i eta sqrt(N+1)],
         [i eta (theta^+)^2 (N+1)^{-1/2},     theta^+        ]].
    """
    state = state.apply(shift_plus)
    a11 = _compose(theta_plus, _scale_by_level(lambda l: sqrt(l + 2) / sqrt(l + 1)))
    a12 = _scale_by_level(lambda l: -1j * eta * sqrt(l + 1))
    a21 = _compose(theta_plus, theta_plus, _scale_by_level(lambda l: 1j * eta / sqrt(l + 1)))
    a22 = theta_plus
    up = state.upper.apply(a11) + state.lower.apply(a12)
    lo = state.upper.apply(a21) + state.lower.apply(a22)
    return SpinorKets(up, lo) * np.exp(-1j * delta)


def quadrature(q: int) -> Callable[[KetSum], KetSum]:
    """s_q = (Q^- + (-1)^q Q^+) / (sqrt(2) i^q) acting on a ket sum."""
    if q not in (0, 1):
        raise ValueError("q must be 0 or 1")
    pref = 1.0 / (sqrt(2.0) * (1j ** q))
    sign = (-1) ** q

    def s(ks: KetSum) -> KetSum:
        return (ks.apply(q_minus) + ks.apply(q_plus) * sign) * pref

    return s


def quadrature_squared(q: int) -> Callable[[KetSum], KetSum]:
    """s_q^2 = [2N + 1 + (-1)^q ((Q^-)^2 + (Q^+)^2)] / 2."""
    sign = (-1) ** q

    def s2(ks: KetSum) -> KetSum:
        qq_minus = ks.apply(q_minus).apply(q_minus)
        qq_plus = ks.apply(q_plus).apply(q_plus)
        return (ks.apply(number) * 2.0 + ks + (qq_minus + qq_plus) * sign) * 0.5

    return s2


def render(ks: KetSum, x, cfg) -> np.ndarray:
    """Sample a ket sum on the grid x for the given FieldConfig."""
    from .eigensystem import psi_level

    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape, dtype=complex)
    for (l, m), c in ks.terms.items():
        if c != 0:
            out += c * psi_level(l, m, x, cfg)
    return out
