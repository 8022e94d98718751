#!/usr/bin/env python3
"""Passive online learning at several system sizes (plateau study)."""

import argparse
from pathlib import Path

from apal.harness import ExperimentConfig, emit_csv, emit_figures, run_ensemble


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[99, 199, 399])
    ap.add_argument("--runs", type=int, default=1000)
    ap.add_argument("--alpha-max", type=float, default=8.0)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/passive"))
    args = ap.parse_args()

    rows = []
    for n in args.sizes:
        cfg = ExperimentConfig(
            mode="passive", n=n, alpha_max=args.alpha_max, runs=args.runs,
            master_seed=args.seed,
        )
        rows.extend(run_ensemble(cfg, workers=args.workers))
        print(f"n={n}: done ({args.runs} runs)")
    args.out.mkdir(parents=True, exist_ok=True)
    emit_csv(rows, args.out / "metrics.csv")
    for p in emit_figures(rows, args.out):
        print("wrote", p)


if __name__ == "__main__":
    main()
