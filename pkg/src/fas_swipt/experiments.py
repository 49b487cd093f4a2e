"""Seeded channel generation, baselines and parameter sweeps."""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import AntennaLayout, ChannelGeometry, PathAngles, Region
from .driver import InfeasibleError, RunOptions, ScenarioConfig, run, solve_q

BASELINES = ("FAS", "TFA", "FPA")
VARIABLES = {"region": "region_size", "region_size": "region_size", "power": "p", "paths": "paths"}
CSV_HEADER = ["variable", "value", "baseline", "trial", "W_watts", "sinr_linear", "converged", "outer_iters", "wall_ms"]


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    """JSON-facing scenario description; the channel is drawn per trial from a seed."""

    n: int = 4
    p: float = 20.0
    sigma_i2: float = 1.0
    sigma_e2: float = 1.0
    gamma_bar_db: float = 1.0
    d: float = 0.5
    region_size: float = 3.0
    paths: int = 14
    epsilon: float = 1e-4
    max_outer: int = 50
    inner_tol: float = 1e-5
    max_inner: int = 100
    restarts: int = 1

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(str(err)) from err
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    def validate(self):
        if self.n < 1 or self.paths < 1 or self.restarts < 1:
            raise ConfigError("n, paths and restarts must be >= 1")
        if self.p <= 0 or self.d <= 0 or self.sigma_i2 <= 0 or self.region_size < 0:
            raise ConfigError("p, d, sigma_i2 must be positive and region_size non-negative")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replace(self, **kw) -> "ExperimentConfig":
        return dataclasses.replace(self, **kw)

    def scenario(self, geometry: ChannelGeometry) -> ScenarioConfig:
        return ScenarioConfig(
            geometry=geometry, N=self.n, P=self.p, sigma_I2=self.sigma_i2, sigma_E2=self.sigma_e2,
            gamma_bar_db=self.gamma_bar_db, D=self.d, C_t=Region.square(self.region_size),
            C_r=Region.square(self.region_size), epsilon=self.epsilon,
        )

    def options(self, **kw) -> RunOptions:
        return RunOptions(max_outer=self.max_outer, inner_tol=self.inner_tol, max_inner=self.max_inner,
                          restarts=self.restarts, **kw)


@dataclass
class TrialResult:
    trial: int
    baseline: str
    W: float
    sinr: float
    converged: bool
    outer_iterations: int
    wall_ms: float
    feasible: bool = True


def generate_channel(seed, L_t: int, L_r: int | None = None, gain_var: float | None = None,
                     r0=(0.0, 0.0), wavelength: float = 1.0) -> ChannelGeometry:
    """Geometric channel: uniform angles on [0, pi], diagonal CN(0, 1/L) path gains."""
    L_r = L_t if L_r is None else L_r
    if L_t != L_r:
        raise ValueError("the geometric model needs L_t == L_r")
    if L_t < 1:
        raise ValueError("need at least one path")
    L = L_t
    var = 1.0 / L if gain_var is None else gain_var
    rng = np.random.default_rng(seed)
    angles = [PathAngles(rng.uniform(0, np.pi, L), rng.uniform(0, np.pi, L)) for _ in range(3)]

    def gains():
        return np.diag((rng.standard_normal(L) + 1j * rng.standard_normal(L)) * np.sqrt(var / 2))

    sigma_E = gains()
    sigma_I = gains()
    return ChannelGeometry(angles[0], angles[1], angles[2], sigma_E, sigma_I, np.asarray(r0, float), wavelength)


def fpa_layout(config: ScenarioConfig) -> AntennaLayout:
    """Half-wavelength ULA along x centred in C_t; ER at the centre of C_r."""
    half = config.geometry.wavelength / 2
    offsets = (np.arange(config.N) - (config.N - 1) / 2) * half
    c = config.C_t.center
    t = np.column_stack([c[0] + offsets, np.full(config.N, c[1])])
    return AntennaLayout(t, config.C_r.center)


def run_baseline(kind: str, config: ScenarioConfig, seed=0, opts: RunOptions | None = None,
                 trial: int = 0) -> TrialResult:
    """FAS: full alternation; TFA: ER position pinned at the centre; FPA: ULA, covariance only.

    FAS and TFA also start from the FPA layout when it is feasible, so FAS and
    TFA can never report less than FPA on the same channel.
    """
    kind = kind.upper()
    if kind not in BASELINES:
        raise ValueError(f"unknown baseline {kind!r}")
    opts = opts or RunOptions()
    tic = time.perf_counter()
    fpa = fpa_layout(config)
    if kind == "FPA":
        s = solve_q(fpa, config)
        ms = 1000 * (time.perf_counter() - tic)
        if not s.feasible:
            return TrialResult(trial, kind, math.nan, s.achieved_sinr, False, 0, ms, feasible=False)
        return TrialResult(trial, kind, s.harvested_W, s.achieved_sinr, True, 0, ms)
    extra = [fpa] if fpa.is_feasible(config.C_t, config.C_r, config.D) else []
    opts = dataclasses.replace(opts, optimize_rx=(kind == "FAS"), extra_starts=extra)
    try:
        sol, _ = run(config, opts, seed)
    except InfeasibleError as err:
        ms = 1000 * (time.perf_counter() - tic)
        return TrialResult(trial, kind, math.nan, err.max_sinr, False, 0, ms, feasible=False)
    ms = 1000 * (time.perf_counter() - tic)
    return TrialResult(trial, kind, sol.W, sol.sinr, sol.converged, sol.outer_iterations, ms)


@dataclass
class SweepSpec:
    variable: str
    values: list
    trials: int = 1
    master_seed: int = 0
    baselines: list = field(default_factory=lambda: list(BASELINES))

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise ValueError(f"unknown sweep variable {self.variable!r}")
        if not self.values:
            raise ValueError("sweep values must be non-empty")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("sweep values must be strictly increasing")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        self.baselines = [b.upper() for b in self.baselines]
        bad = set(self.baselines) - set(BASELINES)
        if bad:
            raise ValueError(f"unknown baselines {sorted(bad)}")


def trial_seed(master_seed: int, trial: int) -> list:
    return [int(master_seed), int(trial)]


def _cast(variable, value):
    return int(value) if VARIABLES[variable] == "paths" else float(value)


def run_trial(variable: str, value, trial: int, master_seed: int, base: ExperimentConfig, baselines):
    """All baselines on one paired channel realization."""
    cfg = base.replace(**{VARIABLES[variable]: _cast(variable, value)})
    geom = generate_channel(trial_seed(master_seed, trial), cfg.paths)
    scenario = cfg.scenario(geom)
    opts = cfg.options()
    run_seed = trial_seed(master_seed, trial) + [1]
    return [run_baseline(b, scenario, run_seed, opts, trial) for b in baselines]


def _run_trial_args(args):
    return run_trial(*args)


def run_sweep(spec: SweepSpec, base: ExperimentConfig, jobs: int = 1):
    """Returns ``{(value, baseline): [TrialResult, ...]}`` ordered by value, baseline, trial."""
    tasks = [(spec.variable, v, i, spec.master_seed, base, spec.baselines)
             for v in spec.values for i in range(spec.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outs = list(pool.map(_run_trial_args, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        outs = [run_trial(*t) for t in tasks]
    results = {(v, b): [] for v in spec.values for b in spec.baselines}
    for task, res in zip(tasks, outs):
        for r in res:
            results[(task[1], r.baseline)].append(r)
    for rows in results.values():
        rows.sort(key=lambda r: r.trial)
    return results


def aggregate(rows):
    """Mean and standard error of W over feasible trials."""
    W = np.array([r.W for r in rows if r.feasible], dtype=float)
    if W.size == 0:
        return math.nan, math.nan
    se = float(W.std(ddof=1) / np.sqrt(W.size)) if W.size > 1 else 0.0
    return float(W.mean()), se


def _fmt(x) -> str:
    return repr(float(x))


def sweep_csv(spec: SweepSpec, results, timing: bool = False) -> str:
    """CSV text: one row per trial, then one aggregate row per (value, baseline).

    ``wall_ms`` is left empty unless ``timing`` is set so that repeated runs
    are byte-identical.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    var = VARIABLES[spec.variable]
    for v in spec.values:
        for b in spec.baselines:
            for r in results[(v, b)]:
                w.writerow([var, _fmt(v), b, r.trial, _fmt(r.W), _fmt(r.sinr), int(r.converged),
                            r.outer_iterations, f"{r.wall_ms:.3f}" if timing else ""])
    for v in spec.values:
        for b in spec.baselines:
            mean, se = aggregate(results[(v, b)])
            w.writerow([var, _fmt(v), b, "AGG", _fmt(mean), _fmt(se), "", "", ""])
    return buf.getvalue()


def all_infeasible(results) -> bool:
    return all(not r.feasible for rows in results.values() for r in rows)
