"""Explicit version-space enumeration and exact statistics for small systems.

Members are packed 32-bit words kept in ascending order, so filtering by a
labeled pattern is one vectorized XOR + popcount pass and the set has a
canonical, reproducible layout.  Everything here is exact except where a
sampled estimator is explicitly requested; these routines double as oracles
for the mean-field approximations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .spins import SpinVector

ENUMERATION_LIMIT = 25


class EnumerationLimitError(ValueError):
    """Requested system size exceeds what explicit enumeration can hold."""


@dataclass
class VersionSpace:
    """All weight vectors consistent with the labeled samples seen so far."""

    n: int
    members: np.ndarray  # packed uint32 words, sorted ascending
    samples_seen: int = 0

    @classmethod
    def initial(cls, n: int, limit: int = ENUMERATION_LIMIT) -> "VersionSpace":
        """The unconstrained space of all 2**n weight vectors."""
        if n < 1 or n % 2 == 0:
            raise ValueError(f"system size must be a positive odd integer, got {n}")
        if n > limit:
            raise EnumerationLimitError(f"n={n} exceeds the enumeration limit {limit}")
        return cls(n=n, members=np.arange(1 << n, dtype=np.uint32), samples_seen=0)

    def __len__(self) -> int:
        return int(self.members.size)

    def contains(self, v: SpinVector) -> bool:
        idx = np.searchsorted(self.members, np.uint32(v.bits))
        return idx < self.members.size and self.members[idx] == v.bits

    def member_vector(self, idx: int) -> SpinVector:
        return SpinVector(self.n, int(self.members[idx]))

    def filtered(self, pattern: SpinVector, label: int) -> "VersionSpace":
        """Keep exactly the members whose sign on ``pattern`` equals ``label``."""
        if pattern.n != self.n:
            raise ValueError(f"pattern length {pattern.n} does not match space size {self.n}")
        if label not in (-1, 1):
            raise ValueError("label must be +1 or -1")
        kept = self.members[member_labels(self, pattern) == label]
        if kept.size == 0:
            raise RuntimeError(
                "version space became empty; the supplied label contradicts earlier samples"
            )
        return VersionSpace(n=self.n, members=kept, samples_seen=self.samples_seen + 1)


def member_labels(vs: VersionSpace, pattern: SpinVector) -> np.ndarray:
    """Sign of every member's overlap with ``pattern`` (+-1 int8 array)."""
    disagree = np.bitwise_count(vs.members ^ np.uint32(pattern.bits))
    return np.where(disagree <= (vs.n - 1) // 2, 1, -1).astype(np.int8)


def member_overlaps(vs: VersionSpace, pattern: SpinVector) -> np.ndarray:
    """Overlap of every member with ``pattern`` (odd ints, int32 array)."""
    disagree = np.bitwise_count(vs.members ^ np.uint32(pattern.bits)).astype(np.int32)
    return vs.n - 2 * disagree


def _bit_column(members: np.ndarray, i: int) -> np.ndarray:
    return ((members >> np.uint32(i)) & np.uint32(1)).astype(np.int8)


def mean_weights(vs: VersionSpace) -> np.ndarray:
    """Per-coordinate average of the members, entries in [-1, 1]."""
    m = np.empty(vs.n)
    for i in range(vs.n):
        m[i] = 2.0 * _bit_column(vs.members, i).mean() - 1.0
    return m


def pair_correlations(vs: VersionSpace) -> np.ndarray:
    """Exact matrix of mean products of weight pairs; unit diagonal."""
    cols = [_bit_column(vs.members, i) for i in range(vs.n)]
    corr = np.eye(vs.n)
    for i in range(vs.n):
        for j in range(i + 1, vs.n):
            # J_i J_j = +1 exactly when the two bits agree
            corr[i, j] = corr[j, i] = 1.0 - 2.0 * np.mean(cols[i] != cols[j])
    return corr


@lru_cache(maxsize=None)
def _mislabel_probability_by_distance(n: int) -> tuple[float, ...]:
    """P(random pattern separates two weight vectors at Hamming distance k).

    Exact: with k disagreeing coordinates, the two overlaps differ in sign
    iff the +-1 sum over the k coordinates beats the sum over the rest in
    magnitude (they are never equal in magnitude for odd n).
    """
    out = []
    for k in range(n + 1):
        hits = 0
        for a in range(k + 1):
            u = abs(k - 2 * a)
            wa = math.comb(k, a)
            for b in range(n - k + 1):
                if u > abs(n - k - 2 * b):
                    hits += wa * math.comb(n - k, b)
        out.append(hits / (1 << n))
    return tuple(out)


def generalization_error_exact(vs: VersionSpace, truth: SpinVector) -> float:
    """Exact error of a random member on a random pattern, scored against truth.

    Equals full enumeration over all 2**n test patterns: the misclassification
    probability of a member depends only on its Hamming distance to the truth.
    """
    table = _mislabel_probability_by_distance(vs.n)
    dist = np.bitwise_count(vs.members ^ np.uint32(truth.bits))
    counts = np.bincount(dist, minlength=vs.n + 1)
    return float(np.dot(counts, np.asarray(table)) / vs.members.size)


def generalization_error_sampled(
    vs: VersionSpace,
    truth: SpinVector,
    rng: np.random.Generator,
    test_samples: int = 10_000,
) -> float:
    """Monte Carlo estimate over random (test pattern, member) pairs."""
    patterns = rng.integers(0, 1 << vs.n, size=test_samples, dtype=np.uint32)
    members = vs.members[rng.integers(0, vs.members.size, size=test_samples)]
    half = (vs.n - 1) // 2
    truth_side = np.bitwise_count(patterns ^ np.uint32(truth.bits)) <= half
    member_side = np.bitwise_count(patterns ^ members) <= half
    return float(np.mean(truth_side != member_side))


@dataclass
class SpaceStats:
    """Summary of a version space: volume, marginals, predictive error."""

    entropy_density: float
    mean_weights: np.ndarray
    pair_correlations: np.ndarray | None
    generalization_error: float | None


def space_stats(
    vs: VersionSpace,
    rng: np.random.Generator | None = None,
    truth: SpinVector | None = None,
    estimator: str = "exact",
    test_samples: int = 10_000,
    with_pairs: bool = False,
) -> SpaceStats:
    """Entropy density, marginals, and generalization error of ``vs``.

    Scoring generalization error needs the hidden ``truth``; it is skipped
    (None) when the truth is not supplied.  ``estimator`` is "exact" for the
    closed-form full-pattern average or "sampled" for ``test_samples`` random
    (pattern, member) pairs drawn from ``rng``.
    """
    if len(vs) == 0:
        raise ValueError("version space is empty")
    gen: float | None = None
    if truth is not None:
        if estimator == "exact":
            gen = generalization_error_exact(vs, truth)
        elif estimator == "sampled":
            if rng is None:
                raise ValueError("sampled estimator needs an rng")
            gen = generalization_error_sampled(vs, truth, rng, test_samples)
        else:
            raise ValueError(f"unknown estimator {estimator!r}")
    return SpaceStats(
        entropy_density=math.log2(len(vs)) / vs.n,
        mean_weights=mean_weights(vs),
        pair_correlations=pair_correlations(vs) if with_pairs else None,
        generalization_error=gen,
    )


def pattern_imbalance(vs: VersionSpace, pattern: SpinVector) -> int:
    """|sum of member signs on pattern|; 0 means a perfect bisection."""
    disagree = np.bitwise_count(vs.members ^ np.uint32(pattern.bits))
    negatives = int(np.count_nonzero(disagree > (vs.n - 1) // 2))
    return abs(len(vs) - 2 * negatives)


def _imbalance_of_candidates(vs: VersionSpace, cands: np.ndarray) -> np.ndarray:
    half = (vs.n - 1) // 2
    size = len(vs)
    out = np.empty(cands.size, dtype=np.int64)
    # chunked so the broadcast XOR matrix stays small
    step = max(1, (1 << 22) // max(size, 1))
    for lo in range(0, cands.size, step):
        block = cands[lo : lo + step]
        disagree = np.bitwise_count(block[:, None] ^ vs.members[None, :])
        neg = (disagree > half).sum(axis=1)
        out[lo : lo + step] = np.abs(size - 2 * neg)
    return out


def _descend(vs: VersionSpace, signs_T: np.ndarray, start_bits: int) -> tuple[int, int]:
    """Greedy single-flip descent on the imbalance; returns (bits, imbalance)."""
    n, size = vs.n, len(vs)
    pattern = SpinVector(n, int(start_bits))
    o = member_overlaps(vs, pattern).astype(np.int16)
    s = pattern.signs.copy()
    best = abs(size - 2 * int(np.count_nonzero(o < 0)))
    floor = size & 1
    while best > floor:
        trial = o[None, :] - 2 * (s[:, None] * signs_T)
        neg = (trial < 0).sum(axis=1)
        imb = np.abs(size - 2 * neg)
        i = int(np.argmin(imb))
        if imb[i] >= best:
            break
        best = int(imb[i])
        o -= 2 * s[i] * signs_T[i]
        s[i] = -s[i]
    bits = 0
    for i in range(n):
        if s[i] > 0:
            bits |= 1 << i
    return bits, best


def bisect_design(
    vs: VersionSpace,
    rng: np.random.Generator,
    pool_size: int = 2000,
    descents: int = 4,
    exhaustive_budget: int = 1 << 24,
) -> tuple[SpinVector, int]:
    """Pattern splitting ``vs`` as evenly as possible, with its |sign sum|.

    Exhaustive over all 2**n candidates whenever ``n <= 13`` or the scan fits
    ``exhaustive_budget`` popcounts; otherwise a pool of random candidates
    followed by greedy single-flip descent from the best few.  Ties go to the
    first candidate found, so results are deterministic given the rng stream.
    The reported imbalance has the parity of |vs|, so 0 is attainable only
    for even sizes.
    """
    n, size = vs.n, len(vs)
    floor = size & 1
    if n <= 13 or (size << n) <= exhaustive_budget:
        half = (n - 1) // 2
        step = max(1, (1 << 22) // max(size, 1))
        best_bits, best = 0, None
        for lo in range(0, 1 << n, step):
            block = np.arange(lo, min(lo + step, 1 << n), dtype=np.uint32)
            disagree = np.bitwise_count(block[:, None] ^ vs.members[None, :])
            neg = (disagree > half).sum(axis=1)
            imb = np.abs(size - 2 * neg)
            i = int(np.argmin(imb))
            if best is None or imb[i] < best:
                best, best_bits = int(imb[i]), int(block[i])
                if best <= floor:
                    break
        return SpinVector(n, best_bits), int(best)

    pool = rng.integers(0, 1 << n, size=pool_size, dtype=np.uint32)
    imb = _imbalance_of_candidates(vs, pool)
    order = np.argsort(imb, kind="stable")
    best_bits, best = int(pool[order[0]]), int(imb[order[0]])
    if best <= floor:
        return SpinVector(n, best_bits), best

    signs_T = np.empty((n, size), dtype=np.int8)
    for i in range(n):
        signs_T[i] = 2 * _bit_column(vs.members, i) - 1
    for k in range(min(descents, pool.size)):
        bits, achieved = _descend(vs, signs_T, int(pool[order[k]]))
        if achieved < best:
            best_bits, best = bits, achieved
            if best <= floor:
                break
    return SpinVector(n, best_bits), best


def conditional_correct_fractions(
    vs: VersionSpace, pattern: SpinVector, label: int, i: int
) -> tuple[float | None, float | None]:
    """Fraction of members with weight ``i`` = +1 (resp. -1) matching the label.

    A fraction is None when the corresponding sub-space is empty.
    """
    if not 0 <= i < vs.n:
        raise ValueError(f"coordinate {i} out of range")
    correct = member_labels(vs, pattern) == label
    plus = _bit_column(vs.members, i) == 1
    n_plus = int(np.count_nonzero(plus))
    n_minus = len(vs) - n_plus
    a_plus = float(np.count_nonzero(correct & plus) / n_plus) if n_plus else None
    a_minus = float(np.count_nonzero(correct & ~plus) / n_minus) if n_minus else None
    return a_plus, a_minus


def overlap_histogram(vs: VersionSpace, pattern: SpinVector) -> dict[int, float]:
    """Distribution of member overlaps with ``pattern``; keys are odd ints."""
    values, counts = np.unique(member_overlaps(vs, pattern), return_counts=True)
    total = len(vs)
    return {int(q): int(c) / total for q, c in zip(values, counts)}
