"""Classical electron motion in crossed fields (B along z, E along x).

The cyclotron frequency and the drift speed are free inputs; the electron
charge sign is built into the trajectory.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ClassicalConfig:
    x0: float = 0.0
    y0: float = 0.0
    v0x: float = 0.0
    v0y: float = 1.0
    omega_B: float = 1.0
    v_d: float = 0.0

    def __post_init__(self):
        vals = (self.x0, self.y0, self.v0x, self.v0y, self.omega_B, self.v_d)
        if not np.all(np.isfinite(vals)):
            raise ValueError("classical config fields must be finite")
        if self.omega_B <= 0:
            raise ValueError("omega_B must be positive")

    @property
    def radius(self) -> float:
        return float(np.hypot(self.v0y + self.v_d, self.v0x) / self.omega_B)


def trajectory(cfg: ClassicalConfig, t):
    w = cfg.omega_B
    t = np.asarray(t, dtype=float)
    c, s = np.cos(w * t), np.sin(w * t)
    u = cfg.v0y + cfg.v_d
    x = cfg.x0 + (u * (c - 1.0) + cfg.v0x * s) / w
    y = cfg.y0 + (u * s + cfg.v0x * (1.0 - c)) / w - cfg.v_d * t
    return x, y


def guiding_center(cfg: ClassicalConfig, t):
    t = np.asarray(t, dtype=float)
    h = cfg.x0 - (cfg.v0y + cfg.v_d) / cfg.omega_B + 0.0 * t
    k = cfg.y0 - cfg.v_d * t + cfg.v0x / cfg.omega_B
    return h, k


def circle_residual(cfg: ClassicalConfig, t):
    """Left minus right side of the moving-circle equation along the path."""
    x, y = trajectory(cfg, t)
    w = cfg.omega_B
    u = cfg.v0y + cfg.v_d
    t = np.asarray(t, dtype=float)
    lhs = (x - cfg.x0 + u / w) ** 2 + (y - cfg.y0 + cfg.v_d * t - cfg.v0x / w) ** 2
    rhs = (u * u + cfg.v0x ** 2) / w ** 2
    return lhs - rhs
