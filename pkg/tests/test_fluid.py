import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import params_strategy, random_params
from ondemand_agents.experiments import EXAMPLES, EXAMPLE_INITS
from ondemand_agents.fluid import (
    BoundaryViolation,
    FluidConfig,
    VerdictKind,
    detect_convergence,
    integrate,
    rhs_interior,
    rhs_with_boundary,
    tail_decay_rate,
)
from ondemand_agents.model import CtmcState, FluidState, Trajectory, scale_center
from ondemand_agents.stability import (
    build_a_minus,
    build_a_plus,
    check_condition_thm2,
    check_condition_thm3,
)

EX = EXAMPLES


def test_rhs_origin():
    assert rhs_interior(FluidState(0, 0, 0), EX["example1"]) == (0, 0, 0)


def test_rhs_example1_unit_x():
    assert rhs_interior(FluidState(1, 0, 0), EX["example1"]) == pytest.approx((-2, 1, 1))


def test_rhs_continuous_across_switch():
    p = EX["example2"]
    h = 1e-8
    up = np.array(rhs_interior(FluidState(0.3, h, -0.2), p))
    down = np.array(rhs_interior(FluidState(0.3, -h, -0.2), p))
    assert np.max(np.abs(up - down)) < 100 * h


def test_boundary_clamps_outflow():
    p = EX["example1"]
    s = FluidState(p.x_min, 5.0, 0.0)
    dx_free = rhs_interior(s, p)[0]
    assert dx_free < 0
    dx, dy, dw = rhs_with_boundary(s, p)
    assert dx == 0.0
    assert (dy, dw) == rhs_interior(s, p)[1:]


def test_boundary_keeps_inflow():
    p = EX["example1"]
    s = FluidState(p.x_min, -5.0, 0.0)
    assert rhs_interior(s, p)[0] > 0
    assert rhs_with_boundary(s, p) == rhs_interior(s, p)


def test_boundary_interior_identical():
    p = EX["example1"]
    s = FluidState(p.x_min + 0.1, 5.0, 0.0)
    assert rhs_with_boundary(s, p) == rhs_interior(s, p)


def test_boundary_violation():
    p = EX["example1"]
    with pytest.raises(BoundaryViolation):
        rhs_with_boundary(FluidState(p.x_min - 1e-6, 0, 0), p)
    with pytest.raises(BoundaryViolation):
        integrate(FluidState(p.x_min - 1e-6, 0, 0), p, FluidConfig(t_end=1))


@given(params_strategy)
@settings(max_examples=100, deadline=None)
def test_origin_fixed_point(p):
    assert rhs_with_boundary(FluidState(0, 0, 0), p) == (0, 0, 0)


@given(params_strategy, st.tuples(*[st.floats(-10, 10)] * 3))
@settings(max_examples=200, deadline=None)
def test_interior_linear_pieces(p, u):
    x, y, w = u
    A = build_a_plus(p) if y >= 0 else build_a_minus(p)
    expect = A @ np.array(u)
    got = np.array(rhs_interior(FluidState(x, y, w), p))
    assert np.allclose(got, expect, rtol=1e-12, atol=1e-12 * (1 + np.abs(u).max()) * 100)


def test_config_validation():
    for kw in ({"dt": 0}, {"t_end": -1}, {"dt": 2, "t_end": 1}, {"conv_tol": 0},
               {"conv_hold": -1}):
        with pytest.raises(ValueError):
            FluidConfig(**kw)
    assert FluidConfig().tolerance_for(2.0) == pytest.approx(3e-4)


def test_integrate_origin():
    traj, v = integrate(FluidState(0, 0, 0), EX["example1"], FluidConfig(t_end=2))
    assert np.all(traj.states == 0)
    assert v.kind is VerdictKind.CONVERGED and v.time == 0.0


def test_integrate_records_every_step():
    traj, _ = integrate(FluidState(0.1, 0, 0), EX["example1"], FluidConfig(dt=0.01, t_end=1))
    assert len(traj) == 101
    assert traj.times[-1] == 1.0


def test_example1_converges():
    p = EX["example1"]
    f0 = scale_center(CtmcState(0, -1000, 0), p)
    _, v = integrate(f0, p, FluidConfig(t_end=50))
    assert v.kind is VerdictKind.CONVERGED
    assert v.time <= 50


def test_example5b_oscillates():
    p = EX["example5b"]
    f0 = scale_center(EXAMPLE_INITS["example5b"][0], p)
    _, v = integrate(f0, p, FluidConfig(t_end=100))
    assert v.kind is VerdictKind.NOT_CONVERGED
    assert v.min_norm > 0.1


def test_boundary_respected_and_flagged():
    p = EX["example2"]
    f0 = scale_center(CtmcState(0, 2000, 0), p)
    traj, v = integrate(f0, p, FluidConfig(t_end=30))
    assert np.all(traj.states[:, 0] >= p.x_min - 1e-9)
    assert v.hit_boundary


def test_boundary_respected_random():
    rng = np.random.default_rng(3)
    for _ in range(15):
        p = random_params(rng)
        f0 = FluidState(p.x_min, rng.uniform(0, 3), rng.uniform(-1, 3))
        traj, _ = integrate(f0, p, FluidConfig(dt=0.01, t_end=10))
        assert np.all(traj.states[:, 0] >= p.x_min - 1e-9)


def test_detect_convergence_examples():
    cfg = FluidConfig(conv_tol=0.01, conv_hold=1.0)
    t = np.round(np.arange(0, 20.0001, 0.1), 10)
    norms = np.exp(-(t - 7.3) * np.log(10) / 7.3 * 2) * 0.01  # 1.0 at t=0, 0.01 at 7.3
    states = np.column_stack([norms, np.zeros_like(t), np.zeros_like(t)])
    v = detect_convergence(Trajectory(t, states, "fluid"), cfg)
    assert v.kind is VerdictKind.CONVERGED
    assert v.time == pytest.approx(7.3)

    zero = Trajectory(t, np.zeros_like(states), "fluid")
    assert detect_convergence(zero, cfg).time == 0.0


def test_detect_convergence_needs_hold():
    cfg = FluidConfig(conv_tol=0.5, conv_hold=1.0)
    t = np.arange(0, 3.0001, 0.1)
    n = np.where((t > 1.0) & (t < 1.5), 0.1, 1.0)  # brief dip
    n[-5:] = 0.1  # final dip shorter than the hold
    v = detect_convergence(Trajectory(t, np.column_stack([n, 0 * n, 0 * n]), "fluid"), cfg)
    assert v.kind is VerdictKind.NOT_CONVERGED
    assert v.min_norm == pytest.approx(0.1)


def test_detect_convergence_divergence():
    t = np.arange(5.0)
    x = np.array([1.0, 10.0, 1e5, 1e7, np.inf])
    z = np.zeros_like(x)
    v = detect_convergence(Trajectory(t, np.column_stack([x, z, z]), "fluid"), FluidConfig())
    assert v.kind is VerdictKind.DIVERGED


def test_detect_convergence_rejects_empty():
    with pytest.raises(ValueError):
        detect_convergence(Trajectory(np.empty(0), np.empty((0, 3)), "fluid"), FluidConfig())


def test_exponential_decay_under_conditions():
    rng = np.random.default_rng(5)
    found = 0
    while found < 8:
        p = random_params(rng, lo=0.2, hi=3.0)
        if not (check_condition_thm2(p) or check_condition_thm3(p)):
            continue
        found += 1
        f0 = FluidState(0.2 * abs(p.x_min), 0.3, -0.1)
        traj, _ = integrate(f0, p, FluidConfig(dt=0.01, t_end=30))
        assert tail_decay_rate(traj, t_from=0.0) < 0


def test_decay_rate_of_pure_exponential():
    t = np.linspace(0, 10, 101)
    s = np.column_stack([np.exp(-0.5 * t), 0 * t, 0 * t])
    assert tail_decay_rate(Trajectory(t, s, "fluid")) == pytest.approx(-0.5)


def test_step_size_robustness():
    p = EX["example1"]
    f0 = scale_center(CtmcState(0, -1000, 0), p)
    a, _ = integrate(f0, p, FluidConfig(dt=2e-3, t_end=10))
    b, _ = integrate(f0, p, FluidConfig(dt=1e-3, t_end=10))
    ua, ub = a.states[-1], b.states[-1]
    assert np.linalg.norm(ua - ub) <= 1e-4 * max(np.linalg.norm(ub), 1e-3)


def test_deterministic():
    p = EX["example4"]
    f0 = FluidState(0.2, -0.4, 1.0)
    a, va = integrate(f0, p, FluidConfig(t_end=5))
    b, vb = integrate(f0, p, FluidConfig(t_end=5))
    assert np.array_equal(a.states, b.states) and va == vb


def test_verdict_time_within_horizon():
    p = EX["example2"]
    for init in EXAMPLE_INITS["example2"]:
        _, v = integrate(scale_center(init, p), p, FluidConfig(t_end=40))
        if v.converged:
            assert 0 <= v.time <= 40
        assert math.isfinite(v.min_norm)
