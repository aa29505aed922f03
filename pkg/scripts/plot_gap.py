#!/usr/bin/env python3
"""Plot recorded gap trajectories from a benchmark output directory.

Reads every trial_*.csv under the given run directory and draws the
suboptimality gap against the query count on log-log axes, one faint line
per trial plus the pointwise median.  Useful after e.g.

    duelgrad run --transfer sign --eps 0.05 --trials 20 --out /tmp/run
    python3 scripts/plot_gap.py /tmp/run
"""

import argparse
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def load_trials(run_dir: Path):
    paths = sorted(run_dir.glob("trial_*.csv"))
    if not paths:
        raise SystemExit(f"no trial_*.csv files under {run_dir}")
    # queries start at 0; shift by one so the log axis keeps the first row
    return [np.loadtxt(p, delimiter=",", skiprows=1, ndmin=2) for p in paths]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("run_dir", type=Path, help="directory written by `duelgrad run`")
    ap.add_argument("--out", type=Path, default=None,
                    help="output image (default <run_dir>/gap.png)")
    ap.add_argument("--column", choices=("gap", "dist_sq"), default="gap")
    args = ap.parse_args()

    trials = load_trials(args.run_dir)
    col = 2 if args.column == "gap" else 3
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for data in trials:
        ax.plot(data[:, 1] + 1.0, data[:, col], color="steelblue", alpha=0.25, lw=0.8)

    shortest = min(data.shape[0] for data in trials)
    if all(np.array_equal(d[:shortest, 1], trials[0][:shortest, 1]) for d in trials):
        stacked = np.stack([d[:shortest, col] for d in trials])
        ax.plot(trials[0][:shortest, 1] + 1.0, np.median(stacked, axis=0),
                color="crimson", lw=1.6, label=f"median ({len(trials)} trials)")
        ax.legend(frameon=False)

    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("queries + 1")
    ax.set_ylabel(args.column)
    ax.set_title(args.run_dir.name)
    fig.tight_layout()

    out = args.out or args.run_dir / f"{args.column}.png"
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")


if __name__ == "__main__":
    sys.exit(main())
