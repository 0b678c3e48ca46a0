"""Fixed-step RK4 and adaptive Dormand-Prince 5(4) integrators.

Both integrators are pure functions of their arguments. They return a
:class:`SimulationTrace` whose state columns are named by the caller and whose
extra columns are filled by per-sample recorder hooks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

Deriv = Callable[..., np.ndarray]
Hook = Callable[..., Mapping[str, float]]

MIN_STEP = 1e-12


class IntegrationError(RuntimeError):
    """Raised when the state or its derivative stops being finite."""

    def __init__(self, message: str, t: float, index: int | None = None):
        super().__init__(f"{message} (t={t!r}, channel={index!r})")
        self.t = t
        self.index = index


class StiffnessError(IntegrationError):
    """Adaptive step size collapsed below :data:`MIN_STEP`."""


@dataclass(frozen=True)
class StateVector:
    t: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise ValueError("state values must be a 1-D vector")
        if not np.all(np.isfinite(values)):
            raise ValueError("state values must be finite")
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "fixed-rk4"
    step: float = 1e-3
    abs_tol: float = 1e-8
    rel_tol: float = 1e-8
    max_step: float = 0.05
    max_steps: int = 1_000_000  # adaptive only: accepted plus rejected attempts

    def __post_init__(self):
        if self.method not in ("fixed-rk4", "adaptive-rk45"):
            raise ValueError(f"unknown integrator method {self.method!r}")
        if not self.step > 0:
            raise ValueError("integrator step must be positive")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("integrator tolerances must be positive")
        if self.max_step < self.step:
            raise ValueError("max_step must be >= step")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


@dataclass
class SimulationTrace:
    """Time grid plus named channels, one value per grid point."""

    grid: np.ndarray
    columns: dict[str, np.ndarray] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        if self.grid.ndim != 1 or self.grid.size == 0:
            raise ValueError("trace grid must be a non-empty 1-D array")
        if self.grid.size > 1 and not np.all(np.diff(self.grid) > 0):
            raise ValueError("trace grid must be strictly increasing")
        for name, col in list(self.columns.items()):
            self.columns[name] = self._check(name, col)

    def _check(self, name, col):
        col = np.asarray(col, dtype=float)
        if col.shape != self.grid.shape:
            raise ValueError(
                f"channel {name!r} has {col.size} samples, grid has {self.grid.size}"
            )
        return col

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise KeyError(f"trace has no channel {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self.columns

    def add(self, name: str, values) -> None:
        self.columns[name] = self._check(name, values)

    @property
    def names(self) -> list[str]:
        return list(self.columns)

    def window(self, t_start: float, t_end: float | None = None) -> np.ndarray:
        """Boolean mask of grid points inside ``[t_start, t_end]``."""
        t_end = self.grid[-1] if t_end is None else t_end
        return (self.grid >= t_start - 1e-12) & (self.grid <= t_end + 1e-12)


def _call(deriv, t, x, inp):
    return deriv(t, x) if inp is None else deriv(t, x, inp)


def _checked(deriv, t, x, inp):
    k = np.asarray(_call(deriv, t, x, inp), dtype=float)
    if k.shape != x.shape:
        raise ValueError(f"derivative has shape {k.shape}, state has {x.shape}")
    if not np.all(np.isfinite(k)):
        bad = int(np.flatnonzero(~np.isfinite(k))[0])
        raise IntegrationError("non-finite derivative", t, bad)
    return k


def rk4_step(deriv: Deriv, t: float, x, h: float, inp=None) -> np.ndarray:
    """One classical Runge-Kutta step from ``t`` to ``t + h``.

    ``inp``, when given, is passed as a third argument to ``deriv`` and held
    constant over the step.
    """
    if not h > 0:
        raise ValueError("step must be positive")
    x = np.asarray(x.values if isinstance(x, StateVector) else x, dtype=float)
    k1 = _checked(deriv, t, x, inp)
    k2 = _checked(deriv, t + 0.5 * h, x + 0.5 * h * k1, inp)
    k3 = _checked(deriv, t + 0.5 * h, x + 0.5 * h * k2, inp)
    k4 = _checked(deriv, t + h, x + h * k3, inp)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _state_names(names, dim):
    if names is None:
        return [f"x{i}" for i in range(dim)]
    names = list(names)
    if len(names) != dim:
        raise ValueError(f"{len(names)} state names for a {dim}-state system")
    return names


def _record(trace_cols, hooks, t, x, inp):
    for hook in hooks:
        for key, val in _call(hook, t, x, inp).items():
            trace_cols.setdefault(key, []).append(val)


def integrate_fixed(
    deriv: Deriv,
    x0,
    t0: float,
    tf: float,
    h: float,
    observer_hooks: Iterable[Hook] = (),
    names: Sequence[str] | None = None,
    inputs: Sequence | None = None,
    record_every: int = 1,
) -> SimulationTrace:
    """Integrate with fixed RK4 steps over ``[t0, tf]``.

    Grid points are ``t0 + k*h``; a final shorter step lands exactly on
    ``tf`` when ``h`` does not divide the interval. ``inputs[k]`` (if given)
    is a zero-order-hold input applied over step ``k`` and passed to both
    ``deriv`` and the hooks at grid point ``k``; it needs one entry per grid
    point. Hooks return a mapping of extra channel values.
    """
    if not tf > t0:
        raise ValueError("tf must be greater than t0")
    if not h > 0:
        raise ValueError("step must be positive")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    x = np.array(x0.values if isinstance(x0, StateVector) else x0, dtype=float)
    hooks = list(observer_hooks)
    ratio = (tf - t0) / h
    n_steps = int(math.ceil(ratio - 1e-9))
    if inputs is not None and len(inputs) < n_steps + 1:
        raise ValueError(f"need {n_steps + 1} held inputs, got {len(inputs)}")

    times = t0 + h * np.arange(n_steps + 1)
    times[-1] = tf
    keep = [k for k in range(0, n_steps + 1, record_every)]
    if keep[-1] != n_steps:
        keep.append(n_steps)
    keep_set = set(keep)

    states = np.empty((len(keep), x.size))
    extra: dict[str, list] = {}
    row = 0
    for k in range(n_steps + 1):
        t = float(times[k])
        inp = None if inputs is None else inputs[k]
        if k in keep_set:
            states[row] = x
            row += 1
            _record(extra, hooks, t, x, inp)
        if k == n_steps:
            break
        x_new = rk4_step(deriv, t, x, float(times[k + 1]) - t, inp)
        if not np.all(np.isfinite(x_new)):
            bad = int(np.flatnonzero(~np.isfinite(x_new))[0])
            raise IntegrationError("non-finite state, last good time", t, bad)
        x = x_new

    cols = dict(zip(_state_names(names, x.size), states.T.copy()))
    cols.update({key: np.asarray(v, dtype=float) for key, v in extra.items()})
    return SimulationTrace(times[keep], cols, meta={"steps": n_steps})


# Dormand-Prince 5(4) tableau.
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = np.array(_A[6] + (0.0,))
_B4 = np.array(
    (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
)
_E = _B5 - _B4


def _dp_step(deriv, t, x, h, k1):
    ks = [k1]
    for i in range(1, 7):
        xi = x + h * sum(a * k for a, k in zip(_A[i], ks) if a != 0.0)
        ks.append(_checked(deriv, t + _C[i] * h, xi, None))
    # Row 7 of the tableau equals the 5th-order weights, so ks[6] is f(x_new).
    x_new = x + h * sum(b * k for b, k in zip(_B5, ks) if b != 0.0)
    err = h * sum(e * k for e, k in zip(_E, ks))
    return x_new, err, ks[6]


def _hermite(t0, t1, x0, x1, f0, f1, t):
    h = t1 - t0
    s = (t - t0) / h
    h00 = 2 * s**3 - 3 * s**2 + 1
    h10 = s**3 - 2 * s**2 + s
    h01 = -2 * s**3 + 3 * s**2
    h11 = s**3 - s**2
    return (
        np.outer(h00, x0) + np.outer(h10 * h, f0) + np.outer(h01, x1) + np.outer(h11 * h, f1)
    )


def integrate_adaptive(
    deriv: Deriv,
    x0,
    t0: float,
    tf: float,
    cfg: IntegratorConfig,
    output_step: float = 1e-3,
    observer_hooks: Iterable[Hook] = (),
    names: Sequence[str] | None = None,
) -> SimulationTrace:
    """Dormand-Prince 5(4) with per-component error control.

    A step is accepted when ``|err_i| <= abs_tol + rel_tol * max(|x_i|, |x_new_i|)``
    for every component. Accepted points are resampled with cubic Hermite
    interpolation onto a uniform grid of spacing ``output_step``; the accepted
    step count is kept in ``trace.meta``.
    """
    if not tf > t0:
        raise ValueError("tf must be greater than t0")
    x = np.array(x0.values if isinstance(x0, StateVector) else x0, dtype=float)
    t = float(t0)
    h = min(cfg.step, cfg.max_step, tf - t0)
    f = _checked(deriv, t, x, None)
    ts, xs, fs = [t], [x], [f]
    rejected = 0
    while t < tf:
        h = min(h, tf - t)
        if h < MIN_STEP:
            raise StiffnessError("step size underflow", t)
        if len(ts) - 1 + rejected >= cfg.max_steps:
            # Typical cause: a discontinuous right-hand side in sliding mode.
            raise StiffnessError(f"step budget of {cfg.max_steps} exhausted", t)
        x_new, err, f_new = _dp_step(deriv, t, x, h, f)
        if not np.all(np.isfinite(x_new)):
            bad = int(np.flatnonzero(~np.isfinite(x_new))[0])
            raise IntegrationError("non-finite state, last good time", t, bad)
        scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(x), np.abs(x_new))
        ratio = float(np.max(np.abs(err) / scale)) if x.size else 0.0
        if ratio <= 1.0:
            t = tf if tf - (t + h) < 1e-12 * max(1.0, abs(tf)) else t + h
            x, f = x_new, f_new
            ts.append(t)
            xs.append(x)
            fs.append(f)
            grow = 5.0 if ratio == 0.0 else min(5.0, 0.9 * ratio ** -0.2)
            h = min(h * grow, cfg.max_step)
        else:
            rejected += 1
            h *= max(0.2, 0.9 * ratio ** -0.2)

    ts_a = np.array(ts)
    xs_a = np.array(xs)
    fs_a = np.array(fs)
    n_out = int(math.ceil((tf - t0) / output_step - 1e-9))
    grid = t0 + output_step * np.arange(n_out + 1)
    grid[-1] = tf
    seg = np.clip(np.searchsorted(ts_a, grid, side="right") - 1, 0, len(ts_a) - 2)
    out = np.empty((grid.size, x.size))
    for s in np.unique(seg):
        idx = seg == s
        out[idx] = _hermite(
            ts_a[s], ts_a[s + 1], xs_a[s], xs_a[s + 1], fs_a[s], fs_a[s + 1], grid[idx]
        )

    cols = dict(zip(_state_names(names, x.size), out.T.copy()))
    extra: dict[str, list] = {}
    hooks = list(observer_hooks)
    if hooks:
        for tk, xk in zip(grid, out):
            _record(extra, hooks, float(tk), xk, None)
    cols.update({key: np.asarray(v, dtype=float) for key, v in extra.items()})
    return SimulationTrace(
        grid, cols, meta={"steps": len(ts) - 1, "rejected": rejected, "step_times": ts_a}
    )
