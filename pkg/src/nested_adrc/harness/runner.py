"""Closed-loop simulation of the benchmark plant under C-ADRC or N-ADRC."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..analysis.metrics import Metrics, isu, itae
from ..analysis.noise import gaussian_noise
from ..control import (
    cadrc_control,
    nadrc_control,
    state_error_feedback,
    td_deriv,
)
from ..observers import estimation_errors, leso_deriv, outer_leso_deriv
from ..ode import IntegrationError, SimulationTrace, integrate_adaptive, integrate_fixed
from ..plants import total_disturbance
from .scenario import Scenario

N = 2  # benchmark plant order


def state_names(nested: bool) -> list[str]:
    names = ["x1", "x2", "r1", "r2"] + [f"xhat{i}" for i in range(1, N + 2)]
    if nested:
        names += [f"zhat{i}" for i in range(1, N + 2)]
    return names


class ClosedLoop:
    """Augmented ODE: plant, tracking differentiator, inner and optional outer ESO.

    State layout follows :func:`state_names`. The measurement noise sample is
    the held third argument of :meth:`deriv`.
    """

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.plant = scenario.plant
        self.ref = scenario.reference
        var = scenario.variant
        self.nested = var.nested
        self.inner = var.observers.inner
        self.outer = var.observers.outer
        self.feedback = var.feedback
        self.R = var.td.R
        self.dim = len(state_names(self.nested))
        self._bi = tuple(float(g) for g in self.inner.gains)
        self._bo = tuple(float(g) for g in self.outer.gains)

    def controls(self, t, s, noise=0.0):
        """Return ``(u0, v, u)``; ``v`` equals ``u`` for the conventional loop."""
        r1, r2 = s[2], s[3]
        if self.nested:
            u0 = state_error_feedback(r1 - s[7], r2 - s[8], self.feedback)
            v, u = nadrc_control(u0, s[9], s[6])
        else:
            u0 = state_error_feedback(r1 - s[4], r2 - s[5], self.feedback)
            u = v = cadrc_control(u0, s[6])
        return u0, v, u

    def deriv(self, t, s, noise=0.0):
        """Scalar fast path; equivalent to composing ``total_disturbance``,
        ``td_deriv``, ``leso_deriv`` and ``outer_leso_deriv``."""
        u0, v, u = self.controls(t, s, noise)
        y = s[0] + noise
        p = self.plant
        L = p.a1 * s[0] + p.a2 * math.sin(s[1]) + p.a3 * math.sin(t) * u
        if p.disturbance_on:
            L += math.exp(-t) * math.cos(t)
        ds = np.empty(self.dim)
        ds[0] = s[1]
        ds[1] = L + u
        ds[2], ds[3] = td_deriv((s[2], s[3]), self.ref(t), self.R)
        b1, b2, b3 = self._bi
        innov = y - s[4]
        ds[4] = s[5] + b1 * innov
        ds[5] = s[6] + u + b2 * innov
        ds[6] = b3 * innov
        if self.nested:
            l1, l2, l3 = self._bo
            innov = y - s[7]
            ds[7] = s[8] + l1 * innov
            ds[8] = s[9] + v + l2 * innov
            ds[9] = l3 * innov
        return ds

    def reference_deriv(self, t, s, noise=0.0):
        """Slow path built from the module-level building blocks (test oracle)."""
        u0, v, u = self.controls(t, s, noise)
        y = s[0] + noise
        ds = np.empty(self.dim)
        ds[0] = s[1]
        ds[1] = total_disturbance(t, s[:2], u, self.plant) + u
        ds[2], ds[3] = td_deriv((s[2], s[3]), self.ref(t), self.R)
        ds[4:7] = leso_deriv(s[4:7], y, u, self.inner)
        if self.nested:
            ds[7:10] = outer_leso_deriv(s[7:10], y, v, self.outer)
        return ds

    def signals(self, t, s, noise=0.0):
        u0, v, u = self.controls(t, s, noise)
        return {
            "r": self.ref(t),
            "y": s[0] + noise,
            "u0": u0,
            "v": v,
            "u": u,
            "L": total_disturbance(t, s[:2], u, self.plant),
        }

    def initial_state(self) -> np.ndarray:
        x = np.zeros(self.dim)
        x[:2] = self.scenario.x0
        return x


class SimulationFailed(RuntimeError):
    def __init__(self, scenario_name: str, fault: IntegrationError):
        super().__init__(f"scenario {scenario_name!r} failed: {fault}")
        self.fault = fault


@dataclass
class RunResult:
    scenario: Scenario
    trace: SimulationTrace
    metrics: Metrics
    error_metrics: dict[str, float] = field(default_factory=dict)

    @property
    def label(self) -> str:
        kind = "N-ADRC" if self.scenario.variant.nested else "C-ADRC"
        noise = "noise" if self.scenario.noise.enabled else "no noise"
        return f"{kind} ({noise})"


def _held_noise(s: Scenario, times: np.ndarray, step: float) -> np.ndarray:
    """Noise value in force at each of ``times``: a fresh sample every
    ``noise.hold`` seconds (every ``step`` when ``hold`` is 0)."""
    if not s.noise.enabled:
        return np.zeros(times.size)
    hold = max(s.noise.hold, step)
    idx = np.floor(times / hold + 1e-9).astype(int)
    samples = gaussian_noise(s.noise.seed, s.noise.variance, int(idx[-1]) + 1)
    return samples[idx]


def simulate(s: Scenario) -> SimulationTrace:
    loop = ClosedLoop(s)
    names = state_names(loop.nested)
    x0 = loop.initial_state()
    cfg = s.integrator
    if cfg.method == "fixed-rk4":
        h = cfg.step
        n_steps = int(math.ceil(s.horizon / h - 1e-9))
        held = _held_noise(s, np.arange(n_steps + 1) * h, h)
        trace = integrate_fixed(
            loop.deriv, x0, 0.0, s.horizon, h,
            observer_hooks=[loop.signals], names=names, inputs=held,
            record_every=int(round(s.output_grid_step / h)),
        )
    else:
        dt = s.output_grid_step
        n_out = int(math.ceil(s.horizon / dt - 1e-9))
        samples = _held_noise(s, np.arange(n_out + 1) * dt, dt)

        # Zero-order hold on the output grid.
        def held(t):
            return float(samples[min(int(t / dt + 1e-9), n_out)])

        trace = integrate_adaptive(
            lambda t, x: loop.deriv(t, x, held(t)), x0, 0.0, s.horizon, cfg,
            output_step=dt,
            observer_hooks=[lambda t, x: loop.signals(t, x, held(t))], names=names,
        )
    for name, values in estimation_errors(trace, N).items():
        trace.add(name, values)
    trace.meta["inner_gains"] = tuple(loop.inner.gains)
    if loop.nested:
        trace.meta["outer_gains"] = tuple(loop.outer.gains)
    return trace


def run_scenario(s: Scenario) -> RunResult:
    """Simulate ``s`` and compute ITAE of ``r - x1``, ISU of ``u`` and the
    ITAE of the disturbance estimation errors."""
    try:
        trace = simulate(s)
    except IntegrationError as fault:
        raise SimulationFailed(s.name, fault) from fault
    grid = trace.grid
    metrics = Metrics(
        itae=itae(trace["r"] - trace["x1"], grid),
        isu=isu(trace["u"], grid),
    )
    errors = {"e3": itae(trace["e3"], grid)}
    if "zeta3" in trace:
        errors["zeta3"] = itae(trace["zeta3"], grid)
    metrics.channels.update({f"itae_{k}": v for k, v in errors.items()})
    return RunResult(s, trace, metrics, errors)
