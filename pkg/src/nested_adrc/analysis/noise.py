"""Reproducible measurement noise.

Uniform variates come from numpy's Philox4x64 counter-based generator and are
mapped to normals with the Box-Muller transform, so the sequence for a given
seed depends only on that documented pair of algorithms.
"""
from __future__ import annotations

import numpy as np


def gaussian_noise(seed: int, variance: float, grid) -> np.ndarray:
    """Zero-mean Gaussian samples, one per grid point (or ``grid`` samples if int)."""
    if variance < 0:
        raise ValueError("noise variance must be >= 0")
    n = int(grid) if np.ndim(grid) == 0 else len(grid)
    if variance == 0 or n == 0:
        return np.zeros(n)
    pairs = (n + 1) // 2
    gen = np.random.Generator(np.random.Philox(int(seed)))
    u = gen.random((pairs, 2))
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))  # 1 - U lies in (0, 1]
    angle = 2.0 * np.pi * u[:, 1]
    z = np.column_stack((radius * np.cos(angle), radius * np.sin(angle))).ravel()
    return np.sqrt(variance) * z[:n]
