#!/usr/bin/env python3
"""Sweep the target gap eps and tabulate success rate vs. query cost.

For each eps the solver is re-tuned, run for `--trials` seeded trials, and
the aggregate row is appended to <out>/sweep.csv.  Per-eps trial outputs
land in <out>/eps_<value>/ in the usual trajectory/summary format.

Example:
    python3 scripts/sweep_eps.py --transfer sign --eps 0.4,0.2,0.1,0.05 \
        --trials 20 --out /tmp/sweep
"""

import argparse
import csv
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from duelgrad.harness import ExperimentConfig, run_experiment

SWEEP_HEADER = ("eps", "trials", "tuned_budget", "mean_total_queries",
                "mean_min_gap", "median_min_gap", "frac_min_gap_le_eps")


def parse_args():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--transfer", choices=("sign", "linear"), default="sign",
                    help="feedback model; tuning follows the same choice")
    ap.add_argument("--eps", default="0.4,0.2,0.1,0.05",
                    help="comma-separated target gaps, swept in order")
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", required=True, help="sweep output directory")
    return ap.parse_args()


def main():
    args = parse_args()
    eps_values = [float(tok) for tok in args.eps.split(",") if tok]
    out_root = Path(args.out)
    out_root.mkdir(parents=True, exist_ok=True)

    rows = []
    for eps in eps_values:
        cfg = ExperimentConfig.from_dict({
            "transfer": {"kind": args.transfer},
            "tuning": args.transfer,
            "eps": eps,
            "trials": args.trials,
            "base_seed": args.seed,
            "out": str(out_root / f"eps_{eps:g}"),
        })
        summary = run_experiment(cfg, jobs=args.jobs)
        agg = summary["aggregate"]
        budget = summary["per_trial"][0]["total_queries"]
        rows.append((eps, args.trials, budget,
                     agg["mean_total_queries"], agg["mean_min_gap"],
                     agg["median_min_gap"], agg["frac_min_gap_le_eps"]))
        print(f"eps={eps:<8g} budget={budget:<10d} "
              f"mean_min_gap={agg['mean_min_gap']:.5f} "
              f"frac<=eps={agg['frac_min_gap_le_eps']:.2f}")

    sweep_path = out_root / "sweep.csv"
    with sweep_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_HEADER)
        writer.writerows(rows)
    print(f"wrote {sweep_path}")


if __name__ == "__main__":
    sys.exit(main())
