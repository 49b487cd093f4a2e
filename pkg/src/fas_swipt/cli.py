"""Command-line entry point: ``run``, ``baseline`` and ``sweep``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .driver import InfeasibleError, run
from .experiments import (
    BASELINES,
    ConfigError,
    ExperimentConfig,
    SweepSpec,
    all_infeasible,
    generate_channel,
    run_baseline,
    run_sweep,
    sweep_csv,
)

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE = 0, 2, 3

log = logging.getLogger("fas_swipt")


def _load(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    if getattr(args, "restarts", None) is not None:
        cfg = cfg.replace(restarts=args.restarts)
        cfg.validate()
    return cfg


def _scenario(cfg: ExperimentConfig, seed: int):
    return cfg.scenario(generate_channel([seed, 0], cfg.paths))


def cmd_run(args) -> int:
    cfg = _load(args)
    scenario = _scenario(cfg, args.seed)
    try:
        sol, trace = run(scenario, cfg.options(), [args.seed, 0, 1])
    except InfeasibleError as err:
        print(json.dumps({"status": "Infeasible", "max_sinr": err.max_sinr, "gamma_bar": err.gamma_bar}))
        return EXIT_INFEASIBLE
    out = {
        "status": "Optimal",
        "W_watts": sol.W,
        "sinr_linear": sol.sinr,
        "converged": sol.converged,
        "outer_iters": sol.outer_iterations,
        "t": sol.layout.t.tolist(),
        "r": sol.layout.r.tolist(),
        "trace_W_q": [rec.W_q for rec in trace.records],
    }
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_baseline(args) -> int:
    cfg = _load(args)
    scenario = _scenario(cfg, args.seed)
    kinds = [k.strip().upper() for k in args.kinds.split(",") if k.strip()]
    bad = set(kinds) - set(BASELINES)
    if bad:
        raise ConfigError(f"unknown baselines {sorted(bad)}")
    rows = [run_baseline(k, scenario, [args.seed, 0, 1], cfg.options()) for k in kinds]
    for r in rows:
        print(json.dumps({"baseline": r.baseline, "W_watts": r.W, "sinr_linear": r.sinr,
                          "converged": r.converged, "outer_iters": r.outer_iterations, "feasible": r.feasible}))
    return EXIT_INFEASIBLE if all(not r.feasible for r in rows) else EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
        baselines = [b.strip().upper() for b in args.baselines.split(",") if b.strip()]
        spec = SweepSpec(args.variable, values, args.trials, args.seed, baselines)
    except ValueError as err:
        raise ConfigError(str(err)) from err
    results = run_sweep(spec, cfg, jobs=args.jobs)
    out = Path(args.out)
    out.write_text(sweep_csv(spec, results, timing=args.timing))
    echo = {"config": cfg.to_dict(), "variable": spec.variable, "values": spec.values,
            "trials": spec.trials, "master_seed": spec.master_seed, "baselines": spec.baselines}
    out.with_suffix(".json").write_text(json.dumps(echo, indent=2, sort_keys=True) + "\n")
    log.info("wrote %s", out)
    return EXIT_INFEASIBLE if all_infeasible(results) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fas-swipt", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON scenario config (defaults used when omitted)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--restarts", type=int, default=None)

    sp = sub.add_parser("run", help="optimize one seeded scenario")
    common(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("baseline", help="compare FAS/TFA/FPA on one seeded scenario")
    common(sp)
    sp.add_argument("--kinds", default="fas,tfa,fpa")
    sp.set_defaults(func=cmd_baseline)

    sp = sub.add_parser("sweep", help="Monte-Carlo sweep over one parameter, CSV output")
    common(sp)
    sp.add_argument("--variable", required=True, choices=["region", "power", "paths"])
    sp.add_argument("--values", required=True, help="comma-separated, strictly increasing")
    sp.add_argument("--trials", type=int, default=10)
    sp.add_argument("--baselines", default="fas,tfa,fpa")
    sp.add_argument("--out", required=True)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--timing", action="store_true", help="fill wall_ms (breaks byte-identical output)")
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
