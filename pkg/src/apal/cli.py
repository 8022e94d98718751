"""Command-line driver: run one ensemble, write metrics.csv and figures."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .belief import UpdateParams
from .design import AnnealSchedule
from .harness import MODES, ConfigError, ExperimentConfig, emit_csv, emit_figures, run_ensemble

_INT_KEYS = {"n", "runs", "seed", "memory", "anneal_levels", "workers"}
_FLOAT_KEYS = {"alpha_max", "w0", "lambda", "beta0", "rbeta"}
_STR_KEYS = {"out"}


def _parse_config_file(path: Path) -> dict:
    """Plain key = value lines; '#' starts a comment; unknown keys rejected."""
    values: dict = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        try:
            if key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key in _STR_KEYS:
                values[key] = value
            else:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {value!r}") from exc
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="apal",
        description="Teacher-student binary perceptron learning experiments.",
    )
    parser.add_argument("mode", choices=MODES, help="learning strategy to run")
    parser.add_argument("--config", type=Path, help="key = value file; flags override it")
    parser.add_argument("--n", type=int, help="input dimension (odd)")
    parser.add_argument("--alpha-max", dest="alpha_max", type=float, help="target pattern density")
    parser.add_argument("--runs", type=int, help="independent trajectories")
    parser.add_argument("--seed", type=int, help="master seed (u64)")
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument("--w0", type=float, help="escape step floor of the belief update")
    parser.add_argument("--lambda", dest="lam", type=float, help="orthogonality penalty weight")
    parser.add_argument("--memory", type=int, help="pattern-memory size (design-ortho)")
    parser.add_argument("--beta0", type=float, help="initial inverse temperature")
    parser.add_argument("--rbeta", type=float, help="inverse-temperature growth factor")
    parser.add_argument("--anneal-levels", dest="anneal_levels", type=int, help="annealing levels")
    parser.add_argument("--workers", type=int, help="parallel trajectory workers (default 1)")
    parser.add_argument("--no-figures", action="store_true", help="skip SVG rendering")
    return parser


def _merged_settings(args: argparse.Namespace) -> dict:
    settings = _parse_config_file(args.config) if args.config else {}
    for key in _INT_KEYS | _FLOAT_KEYS:
        attr = "lam" if key == "lambda" else key
        cli_value = getattr(args, attr, None)
        if cli_value is not None:
            settings[key] = cli_value
    if args.out is not None:
        settings["out"] = str(args.out)
    return settings


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        s = _merged_settings(args)
        for required in ("n", "alpha_max", "runs", "seed", "out"):
            if required not in s:
                raise ConfigError(f"missing required setting {required!r} (flag or config file)")
        update = UpdateParams(w0=s["w0"]) if "w0" in s else UpdateParams()
        sched_kwargs = {}
        if "beta0" in s:
            sched_kwargs["beta0"] = s["beta0"]
        if "rbeta" in s:
            sched_kwargs["r_beta"] = s["rbeta"]
        if "anneal_levels" in s:
            sched_kwargs["levels"] = s["anneal_levels"]
        cfg = ExperimentConfig(
            mode=args.mode,
            n=s["n"],
            alpha_max=s["alpha_max"],
            runs=s["runs"],
            master_seed=s["seed"],
            update=update,
            anneal=AnnealSchedule(**sched_kwargs),
            lam=s.get("lambda", 1.0),
            memory_size=s.get("memory"),
            out_dir=s["out"],
        )
        cfg.validate()
    except (ConfigError, ValueError) as exc:
        print(f"apal: configuration error: {exc}", file=sys.stderr)
        return 2

    workers = s.get("workers", 1)
    rows = run_ensemble(cfg, workers=workers)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "metrics.csv"
    emit_csv(rows, csv_path)
    print(f"wrote {csv_path} ({len(rows)} rows)")
    if not args.no_figures:
        for p in emit_figures(rows, out):
            print(f"wrote {p}")
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
