import argparse
from pathlib import Path

from fas_swipt.experiments import ExperimentConfig, SweepSpec, aggregate, run_sweep, sweep_csv


def sweep_main(variable, values, baselines, description, **base_kw):
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=f"results/{variable}.csv")
    args = p.parse_args()

    spec = SweepSpec(variable, values, args.trials, args.seed, baselines)
    res = run_sweep(spec, ExperimentConfig(**base_kw), jobs=args.jobs)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(sweep_csv(spec, res))
    print(f"{variable:>8} " + " ".join(f"{b:>16}" for b in spec.baselines))
    for v in spec.values:
        cells = []
        for b in spec.baselines:
            mean, se = aggregate(res[(v, b)])
            cells.append(f"{mean:9.2f} +-{se:5.2f}")
        print(f"{v:>8g} " + " ".join(f"{c:>16}" for c in cells))
    print(f"wrote {out}")
