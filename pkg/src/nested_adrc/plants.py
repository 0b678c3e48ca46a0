"""Benchmark second-order plant, exogenous disturbance and reference signals."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SIGNAL_KINDS = ("cosine", "exp-cosine", "constant", "zero")


@dataclass(frozen=True)
class PlantParams:
    """Gains of ``x2' = a1*x1 + a2*sin(x2) + w(t) + (1 + a3*sin(t))*u``."""

    a1: float = 0.2
    a2: float = 0.1
    a3: float = 0.2
    disturbance_on: bool = True

    def __post_init__(self):
        for name in ("a1", "a2", "a3"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"plant.{name} must be finite")
        if not -1.0 < self.a3 < 1.0:
            raise ValueError("plant.a3 must lie in (-1, 1) or the input gain can vanish")


@dataclass(frozen=True)
class SignalSpec:
    """``offset + amplitude * cos(frequency*t)``, optionally times ``exp(-t)``."""

    kind: str = "cosine"
    amplitude: float = 1.0
    frequency: float = 0.5
    offset: float = 0.0

    def __post_init__(self):
        if self.kind not in SIGNAL_KINDS:
            raise ValueError(f"unknown signal kind {self.kind!r}")
        if self.frequency < 0:
            raise ValueError("signal frequency must be >= 0")

    def __call__(self, t):
        if self.kind == "zero":
            return 0.0 * t
        if self.kind == "constant":
            return self.offset + self.amplitude + 0.0 * t
        wave = self.amplitude * np.cos(self.frequency * t)
        if self.kind == "exp-cosine":
            wave = wave * np.exp(-t)
        return self.offset + wave


def exogenous_disturbance(t):
    """``w(t) = exp(-t) * cos(t)``; works on scalars and arrays."""
    if np.ndim(t) == 0:
        return math.exp(-t) * math.cos(t)
    return np.exp(-t) * np.cos(t)


def reference(t):
    """Benchmark reference ``cos(0.5 t)``."""
    if np.ndim(t) == 0:
        return math.cos(0.5 * t)
    return np.cos(0.5 * t)


def total_disturbance(t, x, u, p: PlantParams):
    """Ground truth of the extended state: everything in ``x2'`` except ``u``.

    Includes the input-gain mismatch ``a3*sin(t)*u`` because observers apply
    ``u`` with unit gain. ``x`` may be a 2-vector or a ``(2, N)`` array.
    """
    x1, x2 = x[0], x[1]
    scalar = np.ndim(t) == 0 and np.ndim(x1) == 0
    sin = math.sin if scalar else np.sin
    value = p.a1 * x1 + p.a2 * sin(x2) + p.a3 * sin(t) * u
    if p.disturbance_on:
        value = value + exogenous_disturbance(t)
    return value


def benchmark_plant_deriv(t, x, u, p: PlantParams) -> np.ndarray:
    if len(x) != 2:
        raise ValueError("benchmark plant has exactly two states")
    return np.array([x[1], total_disturbance(t, x, u, p) + u])
