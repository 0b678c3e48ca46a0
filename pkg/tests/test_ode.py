import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from nested_adrc.ode import (
    IntegrationError,
    IntegratorConfig,
    SimulationTrace,
    StateVector,
    StiffnessError,
    integrate_adaptive,
    integrate_fixed,
    rk4_step,
)


def decay(t, x):
    return -x


def zero(t, x):
    return np.zeros_like(x)


def test_rk4_zero_field_leaves_state():
    x = np.array([1.0, -2.0, 3.5])
    np.testing.assert_array_equal(rk4_step(zero, 0.0, x, 0.1), x)


def test_rk4_constant_field_is_exact():
    out = rk4_step(lambda t, x: np.ones(1), 0.0, np.zeros(1), 0.1)
    assert out[0] == pytest.approx(0.1, abs=1e-15)


def test_rk4_decay_matches_hand_stages():
    # k1=-1, k2=-0.95, k3=-0.9525, k4=-0.90475
    expected = 1 + 0.1 / 6 * (-1 - 2 * 0.95 - 2 * 0.9525 - 0.90475)
    assert expected == pytest.approx(0.9048375, abs=1e-12)
    assert rk4_step(decay, 0.0, np.ones(1), 0.1)[0] == pytest.approx(expected, abs=1e-15)


def test_rk4_accepts_state_vector():
    sv = StateVector(0.0, [1.0])
    assert rk4_step(decay, sv.t, sv, 0.1)[0] == pytest.approx(0.9048375)


def test_rk4_rejects_nonpositive_step():
    with pytest.raises(ValueError):
        rk4_step(decay, 0.0, np.ones(1), 0.0)


def test_rk4_nonfinite_derivative_reports_channel():
    def bad(t, x):
        return np.array([0.0, np.nan])

    with pytest.raises(IntegrationError) as info:
        rk4_step(bad, 0.3, np.zeros(2), 0.1)
    assert info.value.index == 1
    assert info.value.t == pytest.approx(0.3)


def test_fixed_zero_field_constant_trace():
    tr = integrate_fixed(zero, [1.0, 2.0], 0.0, 1.0, 0.01)
    assert tr.grid.size == 101
    assert np.all(tr["x0"] == 1.0) and np.all(tr["x1"] == 2.0)


def test_fixed_decay_final_value():
    tr = integrate_fixed(decay, [1.0], 0.0, 1.0, 0.001)
    assert abs(tr["x0"][-1] - math.exp(-1)) < 1e-9


def test_fixed_richardson_ratio_near_16():
    errs = []
    for h in (0.1, 0.05):
        tr = integrate_fixed(decay, [1.0], 0.0, 1.0, h)
        errs.append(abs(tr["x0"][-1] - math.exp(-1)))
    assert errs[0] / errs[1] == pytest.approx(16, rel=0.05)


def test_fixed_partial_final_step_lands_on_tf():
    tr = integrate_fixed(decay, [1.0], 0.0, 1.0, 0.3)
    np.testing.assert_allclose(tr.grid, [0.0, 0.3, 0.6, 0.9, 1.0])
    assert tr["x0"][-1] == pytest.approx(math.exp(-1), abs=1e-4)


def test_fixed_is_bit_identical_across_runs():
    a = integrate_fixed(lambda t, x: np.array([x[1], -np.sin(x[0])]), [1.0, 0.0], 0, 5, 0.01)
    b = integrate_fixed(lambda t, x: np.array([x[1], -np.sin(x[0])]), [1.0, 0.0], 0, 5, 0.01)
    assert a.grid.tobytes() == b.grid.tobytes()
    assert all(a[k].tobytes() == b[k].tobytes() for k in a.names)


def test_fixed_hooks_and_held_inputs():
    inputs = np.arange(11, dtype=float)
    seen = []

    def deriv(t, x, inp):
        seen.append(inp)
        return np.array([inp])

    tr = integrate_fixed(
        deriv, [0.0], 0.0, 1.0, 0.1,
        observer_hooks=[lambda t, x, inp: {"held": inp, "twice": 2 * x[0]}],
        names=["q"], inputs=inputs,
    )
    # Each step integrates its own held value exactly.
    np.testing.assert_allclose(tr["q"], 0.1 * np.concatenate(([0], np.cumsum(inputs[:-1]))))
    np.testing.assert_array_equal(tr["held"], inputs)
    np.testing.assert_allclose(tr["twice"], 2 * tr["q"])
    assert seen[:4] == [0.0] * 4 and seen[4:8] == [1.0] * 4


def test_fixed_record_every_subsamples():
    tr = integrate_fixed(decay, [1.0], 0.0, 1.0, 0.01, record_every=10)
    np.testing.assert_allclose(tr.grid, np.linspace(0, 1, 11))
    full = integrate_fixed(decay, [1.0], 0.0, 1.0, 0.01)
    np.testing.assert_array_equal(tr["x0"], full["x0"][::10])


def test_fixed_nonfinite_state_faults():
    with pytest.raises(IntegrationError), np.errstate(over="ignore", invalid="ignore"):
        integrate_fixed(lambda t, x: x**2, [1.0], 0.0, 2.0, 0.01)


def test_fixed_bad_interval():
    with pytest.raises(ValueError):
        integrate_fixed(decay, [1.0], 1.0, 1.0, 0.1)


def test_adaptive_zero_field_single_step():
    cfg = IntegratorConfig(method="adaptive-rk45", step=1.0, max_step=1.0)
    tr = integrate_adaptive(zero, [3.0, 4.0], 0.0, 1.0, cfg, output_step=0.1)
    assert tr.meta["steps"] == 1
    assert np.all(tr["x0"] == 3.0) and np.all(tr["x1"] == 4.0)


def test_adaptive_zero_field_steps_capped_by_max_step():
    cfg = IntegratorConfig(method="adaptive-rk45", step=1e-3, max_step=0.25)
    tr = integrate_adaptive(zero, [1.0], 0.0, 2.0, cfg)
    assert np.all(np.diff(tr.meta["step_times"]) <= 0.25 + 1e-15)


def test_adaptive_decay_accuracy():
    cfg = IntegratorConfig(method="adaptive-rk45", step=1e-3, abs_tol=1e-8, rel_tol=1e-8)
    tr = integrate_adaptive(decay, [1.0], 0.0, 1.0, cfg)
    assert abs(tr["x0"][-1] - math.exp(-1)) < 1e-7
    # Resampled grid is uniform; interpolated values stay accurate too.
    np.testing.assert_allclose(np.diff(tr.grid), 1e-3, atol=1e-12)
    np.testing.assert_allclose(tr["x0"], np.exp(-tr.grid), atol=1e-7)


def test_adaptive_matches_scipy_dopri():
    def osc(t, x):
        return np.array([x[1], -x[0] - 0.1 * x[1] + np.cos(t)])

    cfg = IntegratorConfig(method="adaptive-rk45", step=1e-2, abs_tol=1e-10, rel_tol=1e-10)
    tr = integrate_adaptive(osc, [1.0, 0.0], 0.0, 5.0, cfg, output_step=0.5)
    ref = solve_ivp(osc, (0, 5), [1.0, 0.0], method="DOP853", rtol=1e-12, atol=1e-12,
                    t_eval=tr.grid)
    np.testing.assert_allclose(tr["x0"], ref.y[0], atol=1e-8)


def test_adaptive_is_deterministic():
    cfg = IntegratorConfig(method="adaptive-rk45")
    a = integrate_adaptive(decay, [1.0], 0.0, 2.0, cfg)
    b = integrate_adaptive(decay, [1.0], 0.0, 2.0, cfg)
    assert a["x0"].tobytes() == b["x0"].tobytes()


def test_adaptive_step_underflow_is_stiffness_fault():
    def blowup(t, x):
        return np.array([1.0 / (1.0 - t) ** 3])

    cfg = IntegratorConfig(method="adaptive-rk45", step=1e-3, abs_tol=1e-12, rel_tol=1e-12)
    with pytest.raises(IntegrationError):
        integrate_adaptive(blowup, [0.0], 0.0, 2.0, cfg)


def test_stiffness_error_is_integration_error():
    assert issubclass(StiffnessError, IntegrationError)


@pytest.mark.parametrize(
    "kwargs",
    [dict(step=0.0), dict(abs_tol=0.0), dict(rel_tol=-1.0), dict(step=0.1, max_step=0.01),
     dict(max_steps=0),
     dict(method="euler")],
)
def test_integrator_config_invariants(kwargs):
    with pytest.raises(ValueError):
        IntegratorConfig(**kwargs)


def test_trace_invariants():
    with pytest.raises(ValueError):
        SimulationTrace(np.array([0.0, 0.0, 1.0]))
    with pytest.raises(ValueError):
        SimulationTrace(np.array([0.0, 1.0]), {"a": np.zeros(3)})
    tr = SimulationTrace(np.array([0.0, 1.0]), {"a": [1.0, 2.0]})
    with pytest.raises(KeyError):
        tr["b"]


def test_state_vector_rejects_nonfinite():
    with pytest.raises(ValueError):
        StateVector(0.0, [1.0, np.inf])


def test_rk4_global_error_order_four():
    hs = np.array([1e-1, 3e-2, 1e-2, 3e-3, 1e-3])
    errs = [abs(integrate_fixed(decay, [1.0], 0.0, 1.0, h)["x0"][-1] - math.exp(-1)) for h in hs]
    slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert slope == pytest.approx(4.0, abs=0.2)
