"""Acceptance criteria, each at its stated tolerance, one verdict line each."""
import math
import time

import numpy as np
import pytest

from conftest import record
from nested_adrc.analysis.lyapunov import companion_matrix, solve_lyapunov
from nested_adrc.analysis.metrics import isu, itae
from nested_adrc.analysis.verification import lemma2_check, verify_theorem1
from nested_adrc.control import FeedbackConfig, cadrc_control, fal, nadrc_control
from nested_adrc.harness import cli
from nested_adrc.harness.compare import compare_variants
from nested_adrc.harness.runner import run_scenario
from nested_adrc.harness.scenario import Scenario
from nested_adrc.observers import binomial_coeffs
from nested_adrc.ode import integrate_fixed
from nested_adrc.plants import PlantParams, SignalSpec


def test_c1_comparison_direction():
    start = time.perf_counter()
    comp = compare_variants(Scenario(), seed=42)
    elapsed = time.perf_counter() - start
    red = comp.reductions()
    c = lambda cond, m: comp.cell("conventional", cond, m)
    n = lambda cond, m: comp.cell("nested", cond, m)
    checks = [
        n("without noise", "itae") < c("without noise", "itae"),
        n("without noise", "isu") <= c("without noise", "isu"),
        red[("with noise", "itae")] >= 20.0,
        red[("with noise", "isu")] >= 10.0,
        elapsed < 30.0,
    ]
    ok = all(checks)
    record("C1 variant comparison direction", ok,
           f"noise-free ITAE {red[('without noise', 'itae')]:.2f}% ISU "
           f"{red[('without noise', 'isu')]:.2f}%; noisy ITAE "
           f"{red[('with noise', 'itae')]:.2f}% (>=20) ISU {red[('with noise', 'isu')]:.2f}% "
           f"(>=10); {elapsed:.1f}s (<30)")
    assert ok


def test_c2_outer_observer_residual():
    start = time.perf_counter()
    res = run_scenario(Scenario().with_variant("nested"))
    elapsed = time.perf_counter() - start
    e3, z3 = res.error_metrics["e3"], res.error_metrics["zeta3"]
    cut = 100.0 * (e3 - z3) / e3
    ok = z3 < e3 and cut >= 20.0 and elapsed < 10.0
    record("C2 ITAE(zeta3) vs ITAE(e3)", ok,
           f"{z3:.4f} vs {e3:.4f}, reduction {cut:.2f}% (>=20); {elapsed:.1f}s (<10)")
    assert ok


def test_c3_error_bounds_and_slope():
    start = time.perf_counter()
    rep = verify_theorem1(Scenario(), [5.0, 10.0, 20.0, 40.0])
    elapsed = time.perf_counter() - start
    worst = max(r.ratio for r in rep.rows)
    ok = rep.holds and rep.slopes[3] <= -0.7 and elapsed < 60.0
    record("C3 steady error bounds", ok,
           f"{sum(r.holds for r in rep.rows)}/{len(rep.rows)} cells hold, "
           f"worst empirical/bound {worst:.2e}; "
           f"e3 slope {rep.slopes[3]:.3f} (<=-0.7); {elapsed:.1f}s (<60)")
    assert ok


def test_c4_derivative_inequality():
    res = run_scenario(Scenario().with_inner_bandwidth(10.0))
    assert res.trace.grid[1] - res.trace.grid[0] == pytest.approx(1e-3)
    rep = lemma2_check(res.trace)
    bare = lemma2_check(res.trace, slack_factor=0.0).fraction
    ok = rep.fraction >= 0.99
    record("C4 per-sample derivative inequality", ok,
           f"{100 * rep.fraction:.2f}% of steady samples (>=99%), slack {rep.slack:.3g}; "
           f"{100 * bare:.1f}% with zero slack")
    assert ok


def test_c5_lyapunov_solver():
    residuals = []
    pd = True
    for n in (1, 2, 3):
        A = companion_matrix(binomial_coeffs(n))
        res = solve_lyapunov(A)
        residuals.append(float(np.max(np.abs(A.T @ res.P + res.P @ A + np.eye(n + 1)))))
        pd = pd and res.lambda_min > 0
    p1 = solve_lyapunov(companion_matrix(binomial_coeffs(1))).P
    dev = float(np.max(np.abs(p1 - np.array([[0.5, -0.5], [-0.5, 1.5]]))))
    ok = max(residuals) < 1e-10 and pd and dev < 1e-9
    record("C5 Lyapunov solver", ok,
           f"max residual {max(residuals):.1e} (<1e-10), P>0 {pd}, n=1 deviation {dev:.1e}")
    assert ok


def test_c6_rk4_order():
    hs = np.array([1e-1, 3e-2, 1e-2, 3e-3, 1e-3])
    errs = [abs(integrate_fixed(lambda t, x: -x, [1.0], 0.0, 1.0, h)["x0"][-1] - math.exp(-1))
            for h in hs]
    slope = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
    ok = abs(slope - 4.0) <= 0.2
    record("C6 RK4 global order", ok, f"slope {slope:.3f} (4 +/- 0.2)")
    assert ok


def test_c7_metric_oracles():
    t = np.linspace(0.0, 1.0, 100001)
    a = itae(t, t)
    g = np.linspace(0.0, 2 * math.pi, 100001)
    b = isu(np.sin(g), g)
    ok = abs(a - 1 / 3) <= 1e-6 and abs(b - math.pi) <= 1e-6
    record("C7 metric oracles", ok, f"ITAE(t) {a:.9f}, ISU(sin) {b:.9f}")
    assert ok


def test_c8_unit_identities():
    deltas = (0.01, 0.1, 1.0)
    jump = max(abs(fal(s * d * (1 + 1e-15), a, d) - fal(s * d, a, d))
               for d in deltas for a in (0.25, 0.5, 0.75) for s in (1, -1))
    ident = max(abs(fal(e, 1.0, d) - e) for e in np.linspace(-3, 3, 61) for d in deltas)
    same = all(nadrc_control(u0, 0.0, x3)[1] == cadrc_control(u0, x3)
               for u0 in (-2.0, 0.0, 1.5) for x3 in (-1.0, 0.3))
    quiet = Scenario(plant=PlantParams(a1=0.0, a2=0.0, a3=0.0, disturbance_on=False),
                     reference=SignalSpec(kind="zero"), horizon=2.0).with_variant("nested")
    tr = run_scenario(quiet).trace
    obs = max(float(np.max(np.abs(tr[k]))) for k in ("e1", "e2", "e3", "zeta1", "zeta2", "zeta3"))
    ok = jump <= 1e-12 and ident <= 1e-12 and same and obs <= 1e-9
    record("C8 unit identities", ok,
           f"fal jump {jump:.1e}, identity {ident:.1e}, nested==conventional {same}, "
           f"observer error {obs:.1e}")
    assert ok


def test_c9_compare_determinism(tmp_path):
    scn = tmp_path / "c9.scn"
    scn.write_text("name = c9\nhorizon = 4\n", encoding="utf-8")
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert cli.main(["compare", str(scn), "--out-dir", str(out), "--seed", "42"]) == 0
        outs.append((out / "c9_comparison.csv").read_bytes())
    ok = outs[0] == outs[1]
    record("C9 compare determinism", ok, f"byte-identical CSV {ok} ({len(outs[0])} bytes)")
    assert ok


def test_feedback_default_matches_bandwidth_five():
    # The committed PD gains are the omega_c = 5 placement used by C1 and C2.
    assert Scenario().variant.feedback == FeedbackConfig.from_bandwidth(5.0)
