"""Numerical checks of the observer error bounds against simulated runs."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lyapunov import LyapunovResult, companion_matrix, solve_lyapunov, theorem1_bound


@dataclass(frozen=True)
class BoundRow:
    omega0: float
    i: int
    bound: float
    empirical: float

    @property
    def ratio(self) -> float:
        return self.empirical / self.bound if self.bound > 0 else float("nan")

    @property
    def holds(self) -> bool:
        return self.empirical <= self.bound + 1e-12


@dataclass
class BoundReport:
    rows: list[BoundRow]
    M: dict[float, float]
    lyap: LyapunovResult
    slopes: dict[int, float] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return all(row.holds for row in self.rows)

    def table(self) -> list[dict]:
        return [
            {"omega0": r.omega0, "i": r.i, "M": self.M[r.omega0], "bound": r.bound,
             "empirical": r.empirical, "ratio": r.ratio}
            for r in self.rows
        ]


def estimate_rate_bound(trace, window=None) -> float:
    """``max |dL/dt|`` of the ground-truth total disturbance by forward differences."""
    L, t = trace["L"], trace.grid
    rate = np.abs(np.diff(L) / np.diff(t))
    if window is not None:
        mid = 0.5 * (t[1:] + t[:-1])
        rate = rate[(mid >= window[0]) & (mid <= window[1])]
    return float(rate.max()) if rate.size else 0.0


def steady_mask(grid, fraction: float = 0.2) -> np.ndarray:
    t0, tf = grid[0], grid[-1]
    return grid >= tf - fraction * (tf - t0) - 1e-12


def verify_theorem1(scenario_base, omega0_sweep, M_estimate_window=None,
                    steady_fraction: float = 0.2) -> BoundReport:
    """Sweep the inner bandwidth of a noise-free C-ADRC run and compare the
    steady-state ``max |e_i|`` with the asymptotic Lyapunov bound.

    ``M`` is estimated per run from the ground-truth disturbance channel; the
    log-log slope of empirical error against ``omega0`` is fitted per index.
    """
    from ..harness.runner import N, run_scenario

    sweep = [float(w) for w in omega0_sweep]
    if not sweep:
        raise ValueError("omega0 sweep must not be empty")
    base = scenario_base.with_variant("conventional").with_noise(False)
    lyap = solve_lyapunov(companion_matrix(base.variant.inner.coeffs))

    rows, Ms = [], {}
    empirical = {i: [] for i in range(1, N + 2)}
    for w in sweep:
        trace = run_scenario(base.with_inner_bandwidth(w)).trace
        M = estimate_rate_bound(trace, M_estimate_window)
        Ms[w] = M
        mask = steady_mask(trace.grid, steady_fraction)
        for i in range(1, N + 2):
            emp = float(np.max(np.abs(trace[f"e{i}"][mask])))
            empirical[i].append(emp)
            rows.append(BoundRow(w, i, theorem1_bound(M, lyap, w, N, i), emp))

    slopes = {}
    for i, errs in empirical.items():
        errs = np.asarray(errs)
        if len(sweep) >= 2 and np.all(errs > 0):
            slopes[i] = float(np.polyfit(np.log(sweep), np.log(errs), 1)[0])
        else:
            slopes[i] = float("nan")
    return BoundReport(rows, Ms, lyap, slopes)


@dataclass
class Lemma2Report:
    lhs: np.ndarray
    rhs: np.ndarray
    slack: float
    satisfied: np.ndarray

    @property
    def fraction(self) -> float:
        return float(self.satisfied.mean()) if self.satisfied.size else 1.0

    @property
    def worst_excess(self) -> float:
        return float(np.max(self.lhs - self.rhs)) if self.lhs.size else 0.0


def lemma2_check(trace, beta_np1: float | None = None, n: int = 2,
                 steady_fraction: float = 0.2, slack_factor: float = 10.0) -> Lemma2Report:
    """Per-sample check of ``|de/dt| <= |dL/dt| + |beta * e1|`` for the
    extended-state error ``e = e_{n+1}``.

    Derivatives are forward differences; ``e1`` is averaged over each interval.
    Samples are compared with slack ``slack_factor * h * max|e''|``, ``e''``
    from second differences over the steady-state window.
    """
    if beta_np1 is None:
        beta_np1 = trace.meta["inner_gains"][-1]
    top = f"e{n + 1}"
    for name in (top, "e1", "L"):
        if name not in trace:
            raise KeyError(f"trace is missing channel {name!r}")
    t = trace.grid
    h = np.diff(t)
    e_top, e1, L = trace[top], trace["e1"], trace["L"]

    mid = 0.5 * (t[1:] + t[:-1])
    keep = mid >= t[-1] - steady_fraction * (t[-1] - t[0])
    de = np.diff(e_top) / h
    rate = np.diff(L) / h
    e1_mid = 0.5 * (e1[1:] + e1[:-1])
    lhs = np.abs(de)[keep]
    rhs = (np.abs(rate) + np.abs(beta_np1 * e1_mid))[keep]

    dde = np.diff(de) / h[1:]
    dde_keep = keep[1:] & keep[:-1]
    h_max = float(h.max())
    slack = slack_factor * h_max * (float(np.max(np.abs(dde[dde_keep]))) if dde_keep.any() else 0.0)
    return Lemma2Report(lhs, rhs, slack, lhs <= rhs + slack)
