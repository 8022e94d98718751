"""Exact teacher recovery by sign bisection plus single-flip probe queries.

Flipping the first ``k`` entries of a probe pattern sweeps its overlap with
the hidden weights quasi-continuously from +q to -q in steps of 2, so a sign
change brackets an index where the overlap magnitude is exactly 1.  Once such
a balance point is known, flipping one more entry resolves that weight from a
single label, and the last weight follows algebraically for free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spins import SpinVector, TeacherOracle, flip_entry, prefix_flip


@dataclass(frozen=True)
class BalancePoint:
    """Prefix length ``n_star`` at which the probe overlap is +-1."""

    n_star: int
    q_sign: int
    base_pattern: SpinVector
    queries_used: int


def find_balance_index(pattern: SpinVector, oracle: TeacherOracle) -> BalancePoint:
    """Bisect on the prefix-flip overlap sign to locate a +-1 overlap.

    Uses one query for the unflipped pattern; the sign of the fully flipped
    pattern is its negation and costs nothing.  Each bisection step queries a
    fresh interior midpoint, so at most ``1 + ceil(log2(n))`` labels are
    consumed in total.
    """
    n = oracle.n
    if pattern.n != n:
        raise ValueError(f"pattern length {pattern.n} does not match oracle length {n}")
    before = oracle.query_count
    left, right = 0, n
    sign_left = oracle.classify(pattern)
    sign_right = -sign_left  # full negation reverses the overlap
    while right - left > 1:
        mid = (left + right + 1) // 2
        sign_mid = oracle.classify(prefix_flip(pattern, mid))
        if sign_mid == sign_left:
            left = mid
        else:
            right = mid
            sign_right = sign_mid
    assert sign_left == -sign_right
    return BalancePoint(
        n_star=left,
        q_sign=sign_left,
        base_pattern=pattern,
        queries_used=oracle.query_count - before,
    )


def deduce_weight(i: int, bp: BalancePoint, oracle: TeacherOracle) -> int:
    """Resolve hidden weight ``i`` with one query around the balance point.

    At the balance point the overlap is ``q_sign * 1``; negating entry ``i``
    moves it to -1 or +3 (times ``q_sign``), so the returned label pins the
    sign of that single weight.
    """
    base = prefix_flip(bp.base_pattern, bp.n_star)
    label = oracle.classify(flip_entry(base, i))
    if label == bp.q_sign:
        return -base.entry(i) * bp.q_sign
    return base.entry(i) * bp.q_sign


def run_deductive(
    oracle: TeacherOracle,
    pattern: SpinVector | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[SpinVector, int]:
    """Recover the hidden weight vector exactly; returns (estimate, queries).

    ``pattern`` is the arbitrary starting probe; drawn uniformly from ``rng``
    when omitted.  The total audited query count is at most
    ``n + ceil(log2(n))``: bisection spends ``1 + ceil(log2(n))`` labels,
    each of the first ``n - 1`` weights costs one, and the last weight is
    implied by the known +-1 overlap at the balance point.
    """
    n = oracle.n
    if pattern is None:
        if rng is None:
            raise ValueError("need either a starting pattern or an rng to draw one")
        pattern = SpinVector.random(n, rng)
    before = oracle.query_count
    bp = find_balance_index(pattern, oracle)
    base = prefix_flip(pattern, bp.n_star)
    weights = np.empty(n, dtype=np.int8)
    for i in range(n - 1):
        weights[i] = deduce_weight(i, bp, oracle)
    residual = bp.q_sign - int(base.signs[: n - 1].astype(np.int64) @ weights[: n - 1])
    assert residual in (-1, 1), "balance-point overlap must leave a +-1 residual"
    weights[n - 1] = base.entry(n - 1) * residual
    used = oracle.query_count - before
    assert used <= n + math.ceil(math.log2(n))
    return SpinVector.from_signs(weights), used
