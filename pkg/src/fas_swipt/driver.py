"""Alternating optimization of covariance, ER position and transmit positions."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .channel import (
    AntennaLayout,
    ChannelGeometry,
    Region,
    er_channel,
    harvested_power,
    ir_channel,
    sinr,
)
from .covariance import QSolution, max_achievable_sinr, solve_covariance
from .rx_position import build_A, optimize_rx
from .tx_position import build_B, build_C, optimize_tx_n


class InfeasibleError(RuntimeError):
    """No start layout admits a covariance meeting the SINR floor."""

    def __init__(self, max_sinr: float, gamma_bar: float):
        super().__init__(f"max achievable SINR {max_sinr:.6g} is below the floor {gamma_bar:.6g}")
        self.max_sinr = max_sinr
        self.gamma_bar = gamma_bar


@dataclass(eq=False)
class ScenarioConfig:
    geometry: ChannelGeometry
    N: int = 4
    P: float = 20.0
    sigma_I2: float = 1.0
    sigma_E2: float = 1.0  # carried for completeness; no step uses it
    gamma_bar_db: float = 1.0
    D: float = 0.5
    C_t: Region = field(default_factory=lambda: Region.square(3.0))
    C_r: Region = field(default_factory=lambda: Region.square(3.0))
    epsilon: float = 1e-4

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("need at least one transmit antenna")
        if self.P <= 0 or self.D <= 0 or self.sigma_I2 <= 0:
            raise ValueError("P, D and sigma_I2 must be positive")
        m = math.ceil(math.sqrt(self.N))
        side = min(self.C_t.width, self.C_t.height)
        if self.N > 1 and side < self.D * (m - 1) - 1e-12:
            raise ValueError(f"transmit region side {side} cannot hold {self.N} antennas at spacing {self.D}")

    @property
    def gamma_bar(self) -> float:
        return 10.0 ** (self.gamma_bar_db / 10.0)


@dataclass
class RunOptions:
    max_outer: int = 50
    inner_tol: float = 1e-5
    max_inner: int = 100
    restarts: int = 1
    optimize_rx: bool = True
    optimize_tx: bool = True
    extra_starts: list = field(default_factory=list)


@dataclass
class IterationRecord:
    W_q: float  # after the covariance step that opens the iteration
    W_r: float
    W_t: list = field(default_factory=list)
    reverted: list = field(default_factory=list)  # per transmit antenna
    surrogate_infeasible: list = field(default_factory=list)
    seconds: float = 0.0


@dataclass
class RunTrace:
    records: list = field(default_factory=list)
    start: int = 0  # index of the winning start layout


@dataclass(eq=False)
class Solution:
    layout: AntennaLayout
    Q: np.ndarray
    W: float
    sinr: float
    converged: bool
    outer_iterations: int


def evaluate(layout: AntennaLayout, Q, config: ScenarioConfig):
    """``(W, sinr)`` of a layout and covariance."""
    g = config.geometry
    return harvested_power(er_channel(layout, g), Q), sinr(ir_channel(layout.t, g), Q, config.sigma_I2)


def solve_q(layout: AntennaLayout, config: ScenarioConfig) -> QSolution:
    g = config.geometry
    return solve_covariance(er_channel(layout, g), ir_channel(layout.t, g), config.P, config.gamma_bar,
                            config.sigma_I2)


def _grid_axis(lo, hi, count, D):
    if count == 1:
        return np.array([(lo + hi) / 2])
    side = hi - lo
    step = min(max(D, side / count), side / (count - 1))
    if step < D - 1e-12:
        raise ValueError("region too small for the requested antenna count at spacing D")
    return (lo + hi) / 2 + (np.arange(count) - (count - 1) / 2) * step


def init_layout(config: ScenarioConfig, seed=None) -> AntennaLayout:
    """Centered square grid of transmit antennas; ER at the centre of C_r.

    ``seed`` is accepted for interface symmetry; the grid is deterministic.
    """
    N, C_t = config.N, config.C_t
    cols = math.ceil(math.sqrt(N))
    rows = math.ceil(N / cols)
    xs = _grid_axis(C_t.x_min, C_t.x_max, cols, config.D)
    ys = _grid_axis(C_t.y_min, C_t.y_max, rows, config.D)
    pts = [(x, y) for y in ys for x in xs][:N]
    return AntennaLayout(np.array(pts), config.C_r.center)


def random_layout(config: ScenarioConfig, rng: np.random.Generator, max_tries: int = 10000) -> AntennaLayout:
    """Uniform transmit positions by rejection under the spacing constraint."""
    C_t = config.C_t
    pts = []
    for _ in range(max_tries):
        p = rng.uniform(C_t.lower, C_t.upper)
        if all(np.linalg.norm(p - q) >= config.D for q in pts):
            pts.append(p)
            if len(pts) == config.N:
                return AntennaLayout(np.array(pts), config.C_r.center)
    return init_layout(config)


def _optimize_from(start: AntennaLayout, config: ScenarioConfig, opts: RunOptions):
    g = config.geometry
    layout = start.copy()
    sol = solve_q(layout, config)
    if not sol.feasible:
        raise InfeasibleError(max_achievable_sinr(ir_channel(layout.t, g), config.P, config.sigma_I2),
                              config.gamma_bar)
    Q, W = sol.Q, sol.harvested_W
    C = build_C(g)
    trace = RunTrace()
    converged = False
    k = 0
    for k in range(1, opts.max_outer + 1):
        tic = time.perf_counter()
        rec = IterationRecord(W_q=W, W_r=W)
        W_open = W
        if opts.optimize_rx:
            A = build_A(layout.t, Q, g)
            r_new, _ = optimize_rx(layout.r, A, g, config.C_r, opts.inner_tol, opts.max_inner)
            cand = AntennaLayout(layout.t, r_new)
            s = solve_q(cand, config)
            if s.feasible and s.harvested_W >= W:
                layout, Q, W = cand, s.Q, s.harvested_W
            rec.W_r = W
        if opts.optimize_tx:
            B = build_B(layout.r, g)
            for n in range(config.N):
                t_n, _, flag = optimize_tx_n(n, layout, g, config.C_t, config.D, config.gamma_bar,
                                             config.sigma_I2, config.P, opts.inner_tol, opts.max_inner,
                                             B=B, C=C)
                cand = layout.copy()
                cand.t[n] = t_n
                s = solve_q(cand, config)
                accept = s.feasible and s.harvested_W >= W
                if accept:
                    layout, Q, W = cand, s.Q, s.harvested_W
                rec.W_t.append(W)
                rec.reverted.append(not accept)
                rec.surrogate_infeasible.append(flag)
        rec.seconds = time.perf_counter() - tic
        trace.records.append(rec)
        if (W - W_open) / max(W_open, 1e-12) < config.epsilon:
            converged = True
            break
    W_chk, sinr_chk = evaluate(layout, Q, config)
    return Solution(layout, Q, W_chk, sinr_chk, converged, k), trace


def run(config: ScenarioConfig, opts: RunOptions | None = None, seed=0):
    """Alternating optimization from one or more start layouts; best W wins.

    Starts are the centered grid, then ``opts.extra_starts``, then
    ``opts.restarts - 1`` random feasible layouts drawn from ``seed``.
    """
    opts = opts or RunOptions()
    rng = np.random.default_rng(seed)
    starts = [init_layout(config)] + [s.copy() for s in opts.extra_starts]
    starts += [random_layout(config, rng) for _ in range(max(opts.restarts, 1) - 1)]
    best = None
    last_err = None
    for i, start in enumerate(starts):
        try:
            sol, trace = _optimize_from(start, config, opts)
        except InfeasibleError as err:
            last_err = err
            continue
        trace.start = i
        if best is None or sol.W > best[0].W:
            best = (sol, trace)
    if best is None:
        raise last_err
    return best
