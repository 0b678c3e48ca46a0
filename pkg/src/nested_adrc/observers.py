"""Linear extended state observers and the nested (inner + outer) pair."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np


def binomial_coeffs(n: int) -> np.ndarray:
    """``C(n+1, i)`` for ``i = 1..n+1``: all poles of the companion matrix at -1."""
    if n < 1:
        raise ValueError("observer order n must be >= 1")
    return np.array([comb(n + 1, i) for i in range(1, n + 2)], dtype=float)


def bandwidth_gains(n: int, omega0: float) -> np.ndarray:
    """Observer gains ``beta_i = C(n+1, i) * omega0**i``, i.e. ``(s + omega0)**(n+1)``.

    >>> bandwidth_gains(2, 10.0)
    array([  30.,  300., 1000.])
    """
    if not omega0 > 0:
        raise ValueError(f"observer bandwidth must be positive, got {omega0!r}")
    return binomial_coeffs(n) * omega0 ** np.arange(1, n + 2)


@dataclass(frozen=True)
class LesoConfig:
    n: int = 2
    omega0: float = 10.0
    coeffs: tuple | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("observer order n must be >= 1")
        if not self.omega0 > 0:
            raise ValueError("observer bandwidth must be positive")
        coeffs = binomial_coeffs(self.n) if self.coeffs is None else self.coeffs
        coeffs = tuple(float(c) for c in coeffs)
        if len(coeffs) != self.n + 1:
            raise ValueError(f"need {self.n + 1} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "coeffs", coeffs)
        # Hurwitz check through the Lyapunov solve (raises if P is not PD).
        from .analysis import companion_matrix, solve_lyapunov

        solve_lyapunov(companion_matrix(coeffs))

    @property
    def gains(self) -> np.ndarray:
        return np.asarray(self.coeffs) * self.omega0 ** np.arange(1, self.n + 2)


@dataclass
class LesoState:
    xhat: np.ndarray

    def __post_init__(self):
        self.xhat = np.asarray(self.xhat, dtype=float)
        if not np.all(np.isfinite(self.xhat)):
            raise ValueError("observer state must be finite")


@dataclass(frozen=True)
class NestedConfig:
    inner: LesoConfig = field(default_factory=lambda: LesoConfig(omega0=3.0))
    outer: LesoConfig = field(default_factory=lambda: LesoConfig(omega0=10.0))

    def __post_init__(self):
        if self.inner.n != self.outer.n:
            raise ValueError("inner and outer observers must have the same order")


def _leso(xhat, y, u, gains):
    xhat = xhat.xhat if isinstance(xhat, LesoState) else xhat
    innov = y - xhat[0]
    d = np.empty(len(xhat))
    d[:-1] = xhat[1:]
    d[-2] += u
    d[-1] = 0.0
    return d + np.asarray(gains) * innov


def leso_deriv(state, y: float, u: float, cfg: LesoConfig) -> np.ndarray:
    """Time derivative of a linear ESO driven by output ``y`` and input ``u``.

    The input enters the n-th equation with unit gain; every equation gets its
    own gain times the innovation ``y - xhat[0]``.
    """
    xhat = state.xhat if isinstance(state, LesoState) else np.asarray(state, dtype=float)
    if xhat.size != cfg.n + 1:
        raise ValueError(f"observer state must have {cfg.n + 1} entries")
    return _leso(xhat, y, u, cfg.gains)


def outer_leso_deriv(state, y: float, v: float, cfg: LesoConfig) -> np.ndarray:
    """Outer observer of the nested pair; driven by the intermediate control ``v``."""
    return leso_deriv(state, y, v, cfg)


def estimation_errors(trace, n: int = 2) -> dict[str, np.ndarray]:
    """Inner errors ``e1..e{n+1}`` and outer errors ``zeta1..zeta{n+1}``.

    Plant states are ``x1..xn`` and the ground-truth extended state is the
    ``L`` channel. The inner observer estimates ``xhat1..``. The outer observer
    (``zhat1..``, optional) sees a plant whose extended state is the inner
    residual ``e{n+1}``, so ``zeta{n+1} = e{n+1} - zhat{n+1}``.
    """
    required = [f"x{i}" for i in range(1, n + 1)] + ["L"]
    required += [f"xhat{i}" for i in range(1, n + 2)]
    missing = [c for c in required if c not in trace]
    if missing:
        raise KeyError(f"trace is missing channels {missing}")
    truth = [trace[f"x{i}"] for i in range(1, n + 1)] + [trace["L"]]
    out = {f"e{i}": truth[i - 1] - trace[f"xhat{i}"] for i in range(1, n + 2)}
    if all(f"zhat{i}" in trace for i in range(1, n + 2)):
        for i in range(1, n + 1):
            out[f"zeta{i}"] = truth[i - 1] - trace[f"zhat{i}"]
        out[f"zeta{n + 1}"] = out[f"e{n + 1}"] - trace[f"zhat{n + 1}"]
    return out
