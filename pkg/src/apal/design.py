"""Training-pattern generation: uniform draws and annealed constraint designs.

Active modes want the next pattern to have (near-)zero overlap with the mean
weights while staying otherwise random, optionally also penalizing squared
overlaps with recently used patterns.  Patterns are sampled by single-flip
Metropolis annealing on that energy; flip deltas are O(1) because the memory
term is tracked through a cached Gram matrix of the stored patterns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spins import SpinVector

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a hard dep, fallback for safety
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric annealing schedule; flips_per_level defaults to the size n."""

    beta0: float = 0.01
    r_beta: float = 1.1
    levels: int = 100
    flips_per_level: int | None = None

    def __post_init__(self):
        if self.beta0 <= 0 or self.r_beta <= 1 or self.levels < 1:
            raise ValueError("need beta0 > 0, r_beta > 1, levels >= 1")
        if self.flips_per_level is not None and self.flips_per_level < 1:
            raise ValueError("flips_per_level must be positive when given")


class PatternMemory:
    """Ring of the most recent training patterns with a cached Gram matrix.

    Entries and Gram values are integer-valued but held as float64 so the
    overlap reductions go through BLAS; every quantity stays below 2**53 and
    is therefore exact.
    """

    def __init__(self, n: int, capacity: int):
        if capacity < 1:
            raise ValueError("memory capacity must be at least 1")
        self.n = n
        self.capacity = capacity
        self._rows = np.zeros((capacity, n), dtype=np.float64)
        self._gram = np.zeros((n, n), dtype=np.float64)
        self._count = 0
        self._next = 0

    def __len__(self) -> int:
        return self._count

    @property
    def gram(self) -> np.ndarray:
        return self._gram

    @property
    def active_rows(self) -> np.ndarray:
        """Stored patterns in ring order (use when order does not matter)."""
        return self._rows[: self._count]

    def patterns(self) -> np.ndarray:
        """Stored patterns, newest first."""
        idx = [(self._next - 1 - k) % self.capacity for k in range(self._count)]
        return self._rows[idx]

    def push(self, signs: np.ndarray) -> None:
        x = np.asarray(signs, dtype=np.float64)
        if self._count == self.capacity:
            old = self._rows[self._next]
            self._gram -= np.multiply.outer(old, old)
        else:
            self._count += 1
        self._rows[self._next] = x
        self._gram += np.multiply.outer(x, x)
        self._next = (self._next + 1) % self.capacity


@dataclass
class DesignContext:
    """Inputs of the design energy: current means, optional pattern memory."""

    mean_weights: np.ndarray
    memory: PatternMemory | None = None
    lam: float = 1.0


def random_pattern(n: int, rng: np.random.Generator) -> SpinVector:
    """Uniform pattern: each entry independently +-1."""
    return SpinVector.from_signs(2 * rng.integers(0, 2, size=n, dtype=np.int8) - 1)


def balance_energy(pattern: SpinVector, ctx: DesignContext) -> float:
    """|mean-weight overlap| of the pattern; 0 meets the design constraint."""
    return float(abs(ctx.mean_weights @ pattern.signs))


def orthogonal_energy(pattern: SpinVector, ctx: DesignContext) -> float:
    """Balance energy plus lam * average squared overlap with stored patterns."""
    e = balance_energy(pattern, ctx)
    if ctx.memory is None or len(ctx.memory) == 0:
        return e
    o = ctx.memory.active_rows @ pattern.signs.astype(np.float64)
    return e + ctx.lam * float(o @ o) / len(ctx.memory)


def metropolis_accept(delta_e: float, beta: float, rng: np.random.Generator) -> bool:
    """Accept a move: always for delta_e <= 0, else with prob exp(-beta*delta_e)."""
    if delta_e <= 0.0:
        return True
    return rng.random() < np.exp(-beta * delta_e)


@njit(cache=True)
def _anneal_kernel(s, m, b, g, quad, gram, lam_over_m, mcur, beta0, r_beta, per_level, idx, u):
    beta = beta0
    n = s.shape[0]
    for k in range(idx.shape[0]):
        i = idx[k]
        si = s[i]
        db = -2.0 * m[i] * si
        de = abs(b + db) - abs(b)
        dq = 0.0
        if mcur > 0:
            dq = 4.0 * mcur - 4.0 * si * g[i]
            de += lam_over_m * dq
        if de <= 0.0 or u[k] < np.exp(-beta * de):
            b += db
            if mcur > 0:
                quad += dq
                c = 2.0 * si
                for j in range(n):
                    g[j] -= c * gram[i, j]  # symmetric, row access is contiguous
            s[i] = -si
        if (k + 1) % per_level == 0:
            beta *= r_beta
    return b, quad


def anneal(
    ctx: DesignContext,
    sched: AnnealSchedule,
    rng: np.random.Generator,
) -> tuple[SpinVector, float]:
    """Sample a pattern by Metropolis annealing; returns (pattern, final energy).

    Starts from a uniform random configuration and performs ``levels`` rounds
    of ``flips_per_level`` single-spin proposals, multiplying beta by
    ``r_beta`` after each round.  The final configuration is returned as-is
    (not the best seen).  Bit-for-bit reproducible given the rng state: the
    stream is consumed as start signs, then flip indices, then acceptance
    uniforms.
    """
    m = np.ascontiguousarray(ctx.mean_weights, dtype=np.float64)
    n = m.size
    per_level = sched.flips_per_level if sched.flips_per_level is not None else n
    total = sched.levels * per_level

    s = (2 * rng.integers(0, 2, size=n, dtype=np.int8) - 1).astype(np.int8)
    idx = rng.integers(0, n, size=total)
    u = rng.random(total)

    b = float(m @ s)
    use_memory = ctx.memory is not None and len(ctx.memory) > 0 and ctx.lam != 0.0
    if use_memory:
        rows = ctx.memory.active_rows
        mcur = rows.shape[0]
        o = rows @ s.astype(np.float64)
        g = np.ascontiguousarray(o @ rows)
        quad = float(o @ o)
        gram = ctx.memory.gram
        lam_over_m = ctx.lam / mcur
    else:
        mcur = 0
        g = np.zeros(1, dtype=np.float64)
        quad = 0.0
        gram = np.zeros((1, 1), dtype=np.float64)
        lam_over_m = 0.0

    b, quad = _anneal_kernel(
        s, m, b, g, quad, gram, lam_over_m, mcur, sched.beta0, sched.r_beta, per_level, idx, u
    )
    energy = abs(b) + (lam_over_m * quad if mcur > 0 else 0.0)
    return SpinVector.from_signs(s), float(energy)
