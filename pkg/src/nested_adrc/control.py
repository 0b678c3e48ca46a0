"""Tracking differentiator, state-error feedback and the two ADRC control laws."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .observers import LesoConfig, NestedConfig

FEEDBACK_LAWS = ("nonlinear-fal", "linear-pd")
VARIANTS = ("conventional", "nested")


def _sign(v):
    return 1.0 if v > 0 else -1.0 if v < 0 else 0.0


@dataclass(frozen=True)
class TdConfig:
    R: float = 10.0

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError("td.R must be positive")


@dataclass
class TdState:
    r1: float = 0.0
    r2: float = 0.0


@dataclass(frozen=True)
class FeedbackConfig:
    law: str = "linear-pd"
    k1: float = 25.0
    k2: float = 10.0
    alpha1: float = 1.0
    alpha2: float = 1.0
    delta: float = 0.1

    def __post_init__(self):
        if self.law not in FEEDBACK_LAWS:
            raise ValueError(f"unknown feedback law {self.law!r}")
        if not (self.k1 > 0 and self.k2 > 0):
            raise ValueError("feedback gains k1, k2 must be positive")
        if not (0 < self.alpha1 <= 1 and 0 < self.alpha2 <= 1):
            raise ValueError("fal exponents must lie in (0, 1]")
        if not self.delta > 0:
            raise ValueError("fal delta must be positive")

    @classmethod
    def from_bandwidth(cls, omega_c: float, **kw) -> "FeedbackConfig":
        """PD gains placing both closed-loop poles at ``-omega_c``."""
        return cls(k1=omega_c**2, k2=2 * omega_c, **kw)


@dataclass(frozen=True)
class AdrcVariant:
    kind: str = "conventional"
    observers: NestedConfig = field(default_factory=NestedConfig)
    feedback: FeedbackConfig = field(default_factory=FeedbackConfig)
    td: TdConfig = field(default_factory=TdConfig)

    def __post_init__(self):
        if self.kind not in VARIANTS:
            raise ValueError(f"unknown ADRC variant {self.kind!r}")

    @property
    def inner(self) -> LesoConfig:
        return self.observers.inner

    @property
    def nested(self) -> bool:
        return self.kind == "nested"


def td_deriv(state, r: float, R: float) -> tuple[float, float]:
    """Bang-bang tracking differentiator; ``sign(0) = 0``."""
    if not R > 0:
        raise ValueError("R must be positive")
    r1, r2 = (state.r1, state.r2) if isinstance(state, TdState) else state
    s = r1 - r + r2 * abs(r2) / (2.0 * R)
    return r2, -R * _sign(s)


def fal(e, alpha: float, delta: float):
    """Han's fal: linear inside ``|e| <= delta``, ``|e|**alpha * sign(e)`` outside."""
    if np.ndim(e) == 0:
        if abs(e) <= delta:
            return e / delta ** (1.0 - alpha)
        return math.copysign(abs(e) ** alpha, e)
    e = np.asarray(e, dtype=float)
    return np.where(
        np.abs(e) <= delta, e / delta ** (1.0 - alpha), np.abs(e) ** alpha * np.sign(e)
    )


def state_error_feedback(e1, e2, cfg: FeedbackConfig):
    if cfg.law == "linear-pd":
        return cfg.k1 * e1 + cfg.k2 * e2
    return cfg.k1 * fal(e1, cfg.alpha1, cfg.delta) + cfg.k2 * fal(e2, cfg.alpha2, cfg.delta)


def cadrc_control(u0, xhat_np1):
    return u0 - xhat_np1


def nadrc_control(u0, zhat_np1, xhat_np1):
    """Return ``(v, u)``.

    The outer estimate cancels the inner observer's residual to give ``v``;
    the inner estimate then cancels the total disturbance.
    """
    v = u0 - zhat_np1
    return v, v - xhat_np1
