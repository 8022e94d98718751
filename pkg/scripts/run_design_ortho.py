#!/usr/bin/env python3
"""Active design with the additional recent-pattern orthogonality penalty."""

import argparse
from pathlib import Path

from apal.harness import ExperimentConfig, emit_csv, emit_figures, run_ensemble


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[99, 199, 399])
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--alpha-max", type=float, default=2.2)
    ap.add_argument("--lambda", dest="lam", type=float, default=1.0)
    ap.add_argument("--memory", type=int, default=None, help="ring size, default n-1")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/design_ortho"))
    args = ap.parse_args()

    rows = []
    for n in args.sizes:
        cfg = ExperimentConfig(
            mode="design-ortho", n=n, alpha_max=args.alpha_max, runs=args.runs,
            master_seed=args.seed, lam=args.lam, memory_size=args.memory,
        )
        rows.extend(run_ensemble(cfg, workers=args.workers))
        print(f"n={n}: done ({args.runs} runs)")
    args.out.mkdir(parents=True, exist_ok=True)
    emit_csv(rows, args.out / "metrics.csv")
    for p in emit_figures(rows, args.out):
        print("wrote", p)


if __name__ == "__main__":
    main()
