"""Performance integrals on a sampled grid (trapezoidal rule)."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class Metrics:
    itae: float
    isu: float
    channels: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.itae < 0 or self.isu < 0:
            raise ValueError("ITAE and ISU are non-negative")


def _aligned(values, grid):
    values = np.asarray(values, dtype=float)
    grid = np.asarray(grid, dtype=float)
    if values.shape != grid.shape:
        raise ValueError(f"channel has {values.size} samples, grid has {grid.size}")
    return values, grid


def itae(error, grid, t_start: float = 0.0, t_end: float | None = None) -> float:
    """Integral of ``t * |e(t)|`` over grid points in ``[t_start, t_end]``."""
    e, t = _aligned(error, grid)
    mask = t >= t_start - 1e-12
    if t_end is not None:
        mask &= t <= t_end + 1e-12
    return float(np.trapezoid(t[mask] * np.abs(e[mask]), t[mask]))


def isu(control, grid, t_start: float = 0.0, t_end: float | None = None) -> float:
    """Integral of ``u(t)**2``."""
    u, t = _aligned(control, grid)
    mask = t >= t_start - 1e-12
    if t_end is not None:
        mask &= t <= t_end + 1e-12
    return float(np.trapezoid(u[mask] ** 2, t[mask]))
