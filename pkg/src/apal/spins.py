"""Ising spin vectors, the hidden teacher oracle, and elementary transforms.

Spin vectors are stored bit-packed (entry ``i`` maps to bit ``i``, +1 to a set
bit), so overlaps and Hamming distances reduce to XOR + popcount on Python
integers.  The external representation is always the +-1 sign sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, slots=True)
class SpinVector:
    """Immutable length-``n`` vector of +-1 spins, packed into an int.

    ``n`` must be odd so that the overlap of any two spin vectors is odd and
    therefore never zero.
    """

    n: int
    bits: int

    def __post_init__(self):
        if self.n < 1 or self.n % 2 == 0:
            raise ValueError(f"spin vector length must be a positive odd integer, got {self.n}")
        if not 0 <= self.bits < (1 << self.n):
            raise ValueError("packed bits out of range for length")

    @classmethod
    def from_signs(cls, signs) -> "SpinVector":
        """Build from a +-1 sequence (any iterable of exactly +-1 entries)."""
        arr = np.asarray(signs)
        if arr.ndim != 1:
            raise ValueError("expected a one-dimensional sign sequence")
        if not np.all(np.abs(arr) == 1):
            raise ValueError("entries must be exactly +1 or -1")
        return cls(int(arr.size), _pack(arr))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "SpinVector":
        """Uniformly random spin vector of odd length ``n``."""
        return cls.from_signs(2 * rng.integers(0, 2, size=n, dtype=np.int8) - 1)

    @property
    def signs(self) -> np.ndarray:
        """The +-1 entries as an int8 array (a fresh copy)."""
        return _unpack(self.bits, self.n)

    def entry(self, i: int) -> int:
        """Sign of entry ``i`` (0-based)."""
        if not 0 <= i < self.n:
            raise ValueError(f"entry index {i} out of range for length {self.n}")
        return 1 if (self.bits >> i) & 1 else -1

    def __len__(self) -> int:
        return self.n

    def __neg__(self) -> "SpinVector":
        return SpinVector(self.n, self.bits ^ ((1 << self.n) - 1))

    def __repr__(self) -> str:
        return f"SpinVector({''.join('+' if (self.bits >> i) & 1 else '-' for i in range(self.n))})"


def _pack(signs: np.ndarray) -> int:
    bits = np.packbits((signs > 0).astype(np.uint8), bitorder="little")
    return int.from_bytes(bits.tobytes(), "little")


def _unpack(bits: int, n: int) -> np.ndarray:
    raw = np.frombuffer(bits.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
    b = np.unpackbits(raw, count=n, bitorder="little")
    return (2 * b.astype(np.int8) - 1)


def _check_lengths(a: SpinVector, b: SpinVector) -> None:
    if a.n != b.n:
        raise ValueError(f"length mismatch: {a.n} vs {b.n}")


def overlap(a: SpinVector, b: SpinVector) -> int:
    """Scalar product of two spin vectors; always odd (hence nonzero)."""
    _check_lengths(a, b)
    return a.n - 2 * (a.bits ^ b.bits).bit_count()


def classify(pattern: SpinVector, weights: SpinVector) -> int:
    """Sign of the pattern-weight overlap; never zero for odd lengths."""
    return 1 if overlap(pattern, weights) > 0 else -1


def prefix_flip(pattern: SpinVector, k: int) -> SpinVector:
    """Copy of ``pattern`` with the first ``k`` entries negated."""
    if not 0 <= k <= pattern.n:
        raise ValueError(f"prefix length {k} out of range for length {pattern.n}")
    return SpinVector(pattern.n, pattern.bits ^ ((1 << k) - 1))


def flip_entry(pattern: SpinVector, i: int) -> SpinVector:
    """Copy of ``pattern`` with entry ``i`` negated."""
    if not 0 <= i < pattern.n:
        raise ValueError(f"entry index {i} out of range for length {pattern.n}")
    return SpinVector(pattern.n, pattern.bits ^ (1 << i))


def hamming_error(estimate: SpinVector, truth: SpinVector) -> float:
    """Fraction of disagreeing entries, in [0, 1]."""
    _check_lengths(estimate, truth)
    return (estimate.bits ^ truth.bits).bit_count() / estimate.n


class TeacherOracle:
    """Hidden truth vector answering one-bit label queries.

    Every label request is counted, so query budgets are audited rather than
    self-reported by learners.  One oracle instance serves one learning
    trajectory.
    """

    def __init__(self, truth: SpinVector):
        self._truth = truth
        self._queries = 0

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "TeacherOracle":
        return cls(SpinVector.random(n, rng))

    @property
    def n(self) -> int:
        return self._truth.n

    @property
    def truth(self) -> SpinVector:
        """The hidden vector; for scoring only, never for learners."""
        return self._truth

    @property
    def query_count(self) -> int:
        return self._queries

    def classify(self, pattern: SpinVector) -> int:
        """Label of ``pattern`` under the hidden weights (+1 or -1)."""
        self._queries += 1
        return classify(pattern, self._truth)
