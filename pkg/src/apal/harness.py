"""Trajectory and ensemble orchestration, metrics tables, and figure output.

A trajectory fixes one hidden teacher and runs one learner to a target
pattern density; an ensemble repeats that over independent seeds derived
from a master seed and averages per step.  Aggregation folds trajectories
in index order, so results are byte-identical regardless of worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .belief import BeliefState, UpdateParams, infer, update
from .deduction import run_deductive
from .design import AnnealSchedule, DesignContext, PatternMemory, anneal, random_pattern
from .spins import SpinVector, TeacherOracle, hamming_error
from .version_space import ENUMERATION_LIMIT, VersionSpace, bisect_design, space_stats

MODES = (
    "passive",
    "design",
    "design-ortho",
    "exact-small",
    "exact-passive-small",
    "deductive",
)


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one ensemble run."""

    mode: str
    n: int
    alpha_max: float = 1.0
    runs: int = 1
    master_seed: int = 0
    update: UpdateParams = field(default_factory=UpdateParams)
    anneal: AnnealSchedule = field(default_factory=AnnealSchedule)
    lam: float = 1.0
    memory_size: int | None = None  # design-ortho ring capacity; None -> n - 1
    out_dir: str | None = None

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.n < 1 or self.n % 2 == 0:
            raise ConfigError(f"n must be a positive odd integer, got {self.n}")
        if self.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {self.runs}")
        if not self.alpha_max > 0:
            raise ConfigError(f"alpha_max must be positive, got {self.alpha_max}")
        if self.mode.startswith("exact") and self.n > ENUMERATION_LIMIT:
            raise ConfigError(
                f"exact modes enumerate the full space and need n <= {ENUMERATION_LIMIT}"
            )
        if self.memory_size is not None and self.memory_size < 1:
            raise ConfigError("memory_size must be >= 1 when given")
        if self.lam < 0:
            raise ConfigError("lambda must be non-negative")
        if self.master_seed < 0:
            raise ConfigError("master_seed must be non-negative")

    @property
    def steps(self) -> int:
        return math.ceil(self.alpha_max * self.n)


@dataclass
class StepRecord:
    """State of one trajectory after its p-th query."""

    p: int
    error: float
    success: bool
    queries: int
    entropy: float | None = None
    gen_error: float | None = None
    vs_size: int | None = None
    design_energy: float | None = None
    imbalance: int | None = None
    duplicate: bool = False


@dataclass(frozen=True)
class MetricsRow:
    """One aggregated ensemble point per (mode, n, p)."""

    mode: str
    n: int
    p: int
    alpha: float
    mean_error: float
    success_fraction: float
    entropy_density: float | None
    gen_error: float | None
    mean_queries: float | None
    runs: int


def _sign_estimate(means: np.ndarray) -> SpinVector:
    return SpinVector.from_signs(np.where(means < 0.0, -1, 1).astype(np.int8))


def _belief_trajectory(cfg: ExperimentConfig, oracle: TeacherOracle, rng) -> list[StepRecord]:
    n = cfg.n
    state = BeliefState.initial(n)
    memory = None
    if cfg.mode == "design-ortho":
        memory = PatternMemory(n, cfg.memory_size if cfg.memory_size is not None else n - 1)
    seen: set[int] = set()
    records = []
    for p in range(1, cfg.steps + 1):
        if cfg.mode == "passive":
            pattern, energy = random_pattern(n, rng), None
        else:
            ctx = DesignContext(mean_weights=state.means, memory=memory, lam=cfg.lam)
            pattern, energy = anneal(ctx, cfg.anneal, rng)
        label = oracle.classify(pattern)
        state = update(state, pattern, label, cfg.update)
        if memory is not None:
            memory.push(pattern.signs)
        err = hamming_error(infer(state), oracle.truth)
        records.append(
            StepRecord(
                p=p,
                error=err,
                success=err == 0.0,
                queries=oracle.query_count,
                design_energy=energy,
                duplicate=pattern.bits in seen,
            )
        )
        seen.add(pattern.bits)
    return records


def _exact_trajectory(cfg: ExperimentConfig, oracle: TeacherOracle, rng) -> list[StepRecord]:
    n = cfg.n
    vs = VersionSpace.initial(n)
    seen: set[int] = set()
    records = []
    for p in range(1, cfg.steps + 1):
        imbalance = None
        if cfg.mode == "exact-small":
            pattern, imbalance = bisect_design(vs, rng)
        else:
            pattern = random_pattern(n, rng)
        label = oracle.classify(pattern)
        vs = vs.filtered(pattern, label)
        st = space_stats(vs, truth=oracle.truth)
        err = hamming_error(_sign_estimate(st.mean_weights), oracle.truth)
        records.append(
            StepRecord(
                p=p,
                error=err,
                success=err == 0.0,
                queries=oracle.query_count,
                entropy=st.entropy_density,
                gen_error=st.generalization_error,
                vs_size=len(vs),
                imbalance=imbalance,
                duplicate=pattern.bits in seen,
            )
        )
        seen.add(pattern.bits)
    return records


def _deductive_trajectory(cfg: ExperimentConfig, oracle: TeacherOracle, rng) -> list[StepRecord]:
    estimate, used = run_deductive(oracle, rng=rng)
    err = hamming_error(estimate, oracle.truth)
    return [StepRecord(p=used, error=err, success=err == 0.0, queries=used)]


def run_trajectory(cfg: ExperimentConfig, trajectory_seed) -> list[StepRecord]:
    """Run one learning trajectory; deterministic given the seed.

    ``trajectory_seed`` is anything ``numpy.random.default_rng`` accepts.
    The teacher is drawn first from the trajectory stream, then the learner
    consumes the remainder.
    """
    cfg.validate()
    rng = np.random.default_rng(trajectory_seed)
    oracle = TeacherOracle(SpinVector.random(cfg.n, rng))
    if cfg.mode == "deductive":
        return _deductive_trajectory(cfg, oracle, rng)
    if cfg.mode in ("exact-small", "exact-passive-small"):
        return _exact_trajectory(cfg, oracle, rng)
    return _belief_trajectory(cfg, oracle, rng)


def trajectory_seed_sequence(master_seed: int, index: int) -> np.random.SeedSequence:
    """Child seed for trajectory ``index``; independent of how many run."""
    return np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))


class _Accumulator:
    __slots__ = ("count", "err", "succ", "ent", "ent_n", "gen", "gen_n", "queries")

    def __init__(self):
        self.count = 0
        self.err = 0.0
        self.succ = 0
        self.ent = 0.0
        self.ent_n = 0
        self.gen = 0.0
        self.gen_n = 0
        self.queries = 0.0

    def add(self, rec: StepRecord) -> None:
        self.count += 1
        self.err += rec.error
        self.succ += rec.success
        self.queries += rec.queries
        if rec.entropy is not None:
            self.ent += rec.entropy
            self.ent_n += 1
        if rec.gen_error is not None:
            self.gen += rec.gen_error
            self.gen_n += 1


def _worker(args) -> list[StepRecord]:
    cfg, seed = args
    return run_trajectory(cfg, seed)


def run_ensemble(cfg: ExperimentConfig, workers: int = 1) -> list[MetricsRow]:
    """Aggregate ``cfg.runs`` independent trajectories into per-step rows.

    Trajectory i uses the child stream spawned from ``master_seed`` with key
    (i,), so enlarging ``runs`` reproduces the earlier trajectories exactly,
    and the fold order is fixed by index regardless of ``workers``.
    """
    cfg.validate()
    seeds = [trajectory_seed_sequence(cfg.master_seed, i) for i in range(cfg.runs)]
    acc: dict[int, _Accumulator] = {}

    def fold(records: list[StepRecord]) -> None:
        for rec in records:
            acc.setdefault(rec.p, _Accumulator()).add(rec)

    if workers <= 1:
        for seed in seeds:
            fold(run_trajectory(cfg, seed))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for records in pool.map(_worker, [(cfg, s) for s in seeds], chunksize=1):
                fold(records)

    rows = []
    for p in sorted(acc):
        a = acc[p]
        rows.append(
            MetricsRow(
                mode=cfg.mode,
                n=cfg.n,
                p=p,
                alpha=p / cfg.n,
                mean_error=a.err / a.count,
                success_fraction=a.succ / a.count,
                entropy_density=a.ent / a.ent_n if a.ent_n else None,
                gen_error=a.gen / a.gen_n if a.gen_n else None,
                mean_queries=a.queries / a.count,
                runs=a.count,
            )
        )
    return rows


CSV_HEADER = "mode,n,p,alpha,mean_error,success_fraction,entropy_density,gen_error,mean_queries,runs"


def _fmt_real(v: float | None) -> str:
    if v is None:
        return ""
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s


def emit_csv(rows: list[MetricsRow], path) -> None:
    """Write rows sorted by (mode, n, p) in canonical shortest-decimal form."""
    if not rows:
        raise ValueError("no rows to emit")
    path = Path(path)
    lines = [CSV_HEADER]
    for r in sorted(rows, key=lambda r: (r.mode, r.n, r.p)):
        lines.append(
            ",".join(
                (
                    r.mode,
                    str(r.n),
                    str(r.p),
                    _fmt_real(r.alpha),
                    _fmt_real(r.mean_error),
                    _fmt_real(r.success_fraction),
                    _fmt_real(r.entropy_density),
                    _fmt_real(r.gen_error),
                    _fmt_real(r.mean_queries),
                    str(r.runs),
                )
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _grouped(rows: list[MetricsRow]) -> dict[tuple[str, int], list[MetricsRow]]:
    groups: dict[tuple[str, int], list[MetricsRow]] = {}
    for r in rows:
        groups.setdefault((r.mode, r.n), []).append(r)
    for g in groups.values():
        g.sort(key=lambda r: r.p)
    return groups


def emit_figures(rows: list[MetricsRow], out_dir) -> list[Path]:
    """Render per-(mode, n) learning-curve SVGs; returns the written paths."""
    from matplotlib.figure import Figure

    if not rows:
        raise ValueError("no rows to plot")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for (mode, n), group in sorted(_grouped(rows).items()):
        alpha = np.array([r.alpha for r in group])
        err = np.array([r.mean_error for r in group])
        succ = np.array([r.success_fraction for r in group])

        if any(r.entropy_density is not None for r in group):
            ent = np.array([np.nan if r.entropy_density is None else r.entropy_density for r in group])
            gen = np.array([np.nan if r.gen_error is None else r.gen_error for r in group])
            fig = Figure(figsize=(5.0, 6.0))
            ax1, ax2 = fig.subplots(2, 1, sharex=True)
            ax1.plot(alpha, ent, "o-", ms=3, label="entropy density")
            ref = np.clip(1.0 - alpha, 0.0, None)
            ax1.plot(alpha, ref, "k--", lw=1, label="1 - alpha")
            ax1.set_ylabel("entropy density (bits)")
            ax1.legend(frameon=False)
            ax2.plot(alpha, gen, "s-", ms=3, color="tab:red")
            ax2.set_ylabel("generalization error")
            ax2.set_xlabel("pattern density alpha")
            ax1.set_title(f"{mode}, n={n}")
            p = out / f"fig_entropy_{mode}_n{n}.svg"
            fig.savefig(p, format="svg")
            written.append(p)

        fig = Figure(figsize=(5.0, 3.6))
        ax = fig.subplots()
        ax.plot(alpha, err, "o-", ms=3)
        ax.set_xlabel("pattern density alpha")
        ax.set_ylabel("mean inference error")
        ax.set_title(f"{mode}, n={n}")
        pos = err > 0
        if pos.sum() >= 2:
            inset = ax.inset_axes([0.5, 0.45, 0.47, 0.5])
            inset.semilogy(alpha[pos], err[pos], "o-", ms=2)
            inset.set_title("tail (log)", fontsize=8)
            inset.tick_params(labelsize=7)
        p = out / f"fig_error_{mode}_n{n}.svg"
        fig.savefig(p, format="svg")
        written.append(p)

        fig = Figure(figsize=(5.0, 3.6))
        ax = fig.subplots()
        ax.plot(alpha, succ, "o-", ms=3, color="tab:green")
        ax.set_ylim(-0.02, 1.02)
        ax.set_xlabel("pattern density alpha")
        ax.set_ylabel("success fraction")
        ax.set_title(f"{mode}, n={n}")
        p = out / f"fig_success_{mode}_n{n}.svg"
        fig.savefig(p, format="svg")
        written.append(p)
    return written
