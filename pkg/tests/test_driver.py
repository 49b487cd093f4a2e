import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fas_swipt.channel import ChannelGeometry, PathAngles, Region, er_channel, harvested_power, ir_channel, sinr
from fas_swipt.covariance import solve_covariance
from fas_swipt.driver import (
    InfeasibleError,
    RunOptions,
    ScenarioConfig,
    evaluate,
    init_layout,
    run,
    solve_q,
)
from fas_swipt.experiments import generate_channel


def scenario(seed=0, L=14, side=3.0, **kw):
    return ScenarioConfig(generate_channel(seed, L), C_t=Region.square(side), C_r=Region.square(side), **kw)


def audit(sol, cfg):
    Q = sol.Q
    assert sol.layout.min_distance() >= cfg.D - 1e-6
    for t in sol.layout.t:
        assert cfg.C_t.contains(t, 1e-12)
    assert cfg.C_r.contains(sol.layout.r, 1e-12)
    assert np.trace(Q).real <= cfg.P * (1 + 1e-9)
    assert np.linalg.eigvalsh(Q).min() >= -1e-8 * cfg.P
    assert sol.sinr >= cfg.gamma_bar * (1 - 1e-6)


def test_init_layout_single_antenna():
    cfg = scenario(N=1)
    lay = init_layout(cfg)
    np.testing.assert_array_equal(lay.t[0], cfg.C_t.center)
    np.testing.assert_array_equal(lay.r, cfg.C_r.center)


def test_init_layout_two_by_two():
    cfg = ScenarioConfig(generate_channel(0, 4), N=4, D=0.5, C_t=Region(0, 3, 0, 3), C_r=Region(0, 3, 0, 3))
    lay = init_layout(cfg)
    np.testing.assert_allclose(sorted(map(tuple, lay.t)), [(0.75, 0.75), (0.75, 2.25), (2.25, 0.75), (2.25, 2.25)])
    assert lay.min_distance() >= 0.5


@settings(max_examples=60, deadline=None)
@given(N=st.integers(1, 9), side=st.floats(0.5, 6), D=st.floats(0.1, 1.0))
def test_init_layout_audit(N, side, D):
    m = math.ceil(math.sqrt(N))
    geom = generate_channel(0, 2)
    if N > 1 and side < D * (m - 1):
        with pytest.raises(ValueError):
            ScenarioConfig(geom, N=N, D=D, C_t=Region.square(side), C_r=Region.square(side))
        return
    cfg = ScenarioConfig(geom, N=N, D=D, C_t=Region.square(side), C_r=Region.square(side))
    lay = init_layout(cfg)
    assert lay.N == N
    assert lay.is_feasible(cfg.C_t, cfg.C_r, D, tol=1e-9)


def test_gamma_bar_conversion():
    assert scenario(gamma_bar_db=10.0).gamma_bar == pytest.approx(10.0)
    assert scenario(gamma_bar_db=1.0).gamma_bar == pytest.approx(10**0.1)


def test_single_path_single_antenna():
    a = PathAngles([0.8], [1.9])
    geom = ChannelGeometry(a, a, a, [[0.6 + 0.3j]], [[1.0]])
    cfg = ScenarioConfig(geom, N=1, gamma_bar_db=-math.inf)
    assert cfg.gamma_bar == 0
    sol, trace = run(cfg)
    assert sol.W == pytest.approx(cfg.P * abs(0.6 + 0.3j) ** 2, rel=1e-12)
    assert sol.converged and sol.outer_iterations <= 2


def test_power_doubling_doubles_W():
    a = scenario(3, gamma_bar_db=-math.inf, P=10.0)
    b = scenario(3, gamma_bar_db=-math.inf, P=20.0)
    sa, _ = run(a)
    sb, _ = run(b)
    assert sb.W == pytest.approx(2 * sa.W, rel=1e-12)
    np.testing.assert_array_equal(sa.layout.t, sb.layout.t)


@pytest.mark.parametrize("seed", range(5))
def test_run_never_reports_worse_than_start(seed):
    cfg = scenario(seed)
    start = solve_q(init_layout(cfg), cfg)
    sol, trace = run(cfg, seed=seed)
    assert sol.W >= start.harvested_W
    audit(sol, cfg)
    W_q = [rec.W_q for rec in trace.records]
    assert np.all(np.diff(W_q) >= -1e-9 * np.asarray(W_q[:-1]))
    assert len(trace.records) <= RunOptions().max_outer
    assert sol.W == pytest.approx(harvested_power(er_channel(sol.layout, cfg.geometry), sol.Q), rel=1e-9)


def test_run_is_deterministic():
    cfg = scenario(11)
    a, _ = run(cfg, RunOptions(restarts=3), seed=5)
    b, _ = run(cfg, RunOptions(restarts=3), seed=5)
    assert a.W == b.W
    np.testing.assert_array_equal(a.layout.t, b.layout.t)
    np.testing.assert_array_equal(a.Q, b.Q)


def test_restarts_never_hurt():
    cfg = scenario(2)
    one, _ = run(cfg, RunOptions(restarts=1), seed=1)
    three, _ = run(cfg, RunOptions(restarts=3), seed=1)
    assert three.W >= one.W


def test_max_outer_respected():
    cfg = scenario(4, epsilon=0.0)
    sol, trace = run(cfg, RunOptions(max_outer=3))
    assert sol.outer_iterations == 3 and len(trace.records) == 3
    assert not sol.converged


def test_infeasible_start_raises():
    cfg = scenario(0, gamma_bar_db=60.0)
    with pytest.raises(InfeasibleError) as err:
        run(cfg)
    h_I = ir_channel(init_layout(cfg).t, cfg.geometry)
    assert err.value.max_sinr == pytest.approx(cfg.P * np.vdot(h_I, h_I).real / cfg.sigma_I2)


def test_evaluate_delegates():
    cfg = scenario(6)
    lay = init_layout(cfg)
    g = cfg.geometry
    sol = solve_covariance(er_channel(lay, g), ir_channel(lay.t, g), cfg.P, cfg.gamma_bar, cfg.sigma_I2)
    W, s = evaluate(lay, sol.Q, cfg)
    assert W == pytest.approx(harvested_power(er_channel(lay, g), sol.Q), abs=1e-12)
    assert s == pytest.approx(sinr(ir_channel(lay.t, g), sol.Q, cfg.sigma_I2), abs=1e-12)
    assert W == pytest.approx(sol.harvested_W, abs=1e-12 * W)


def test_binding_sinr_floor_is_respected():
    # floor well above the MRT-to-ER SINR so the covariance constraint binds
    for seed in range(3):
        cfg = scenario(seed, gamma_bar_db=15.0)
        try:
            sol, _ = run(cfg, seed=seed)
        except InfeasibleError:
            continue
        audit(sol, cfg)
