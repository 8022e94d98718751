"""Online Bayesian student: mean weights updated one labeled pattern at a time.

The posterior over hidden weights is summarized by its per-coordinate means.
Each new sample nudges every mean along the label-weighted pattern entry with
a data-dependent gain derived from a Gaussian approximation of the overlap
distribution; a small floor on the step keeps saturated-but-wrong signs
correctable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .spins import SpinVector


@dataclass(frozen=True)
class UpdateParams:
    """Cutoffs of the online update (defaults follow the reference protocol)."""

    w0: float = 8e-3
    delta_floor: float = 1e-12

    def __post_init__(self):
        if self.w0 <= 0 or self.delta_floor <= 0:
            raise ValueError("w0 and delta_floor must be positive")


DEFAULT_PARAMS = UpdateParams()


@dataclass
class BeliefState:
    """Running posterior summary: mean weights in [-1, 1] and sample count."""

    means: np.ndarray
    samples_seen: int = 0

    @classmethod
    def initial(cls, n: int) -> "BeliefState":
        """Flat prior: all means zero."""
        return cls(means=np.zeros(n), samples_seen=0)

    @property
    def n(self) -> int:
        return int(self.means.size)


def update_gain(x):
    """Gain factor exp(-x^2) / (1 + erf(x)); strictly positive, decreasing.

    Evaluated as 1 / erfcx(-x), which is stable for large |x|: the value
    grows like sqrt(pi) * |x| for very negative x and underflows gracefully
    to 0 for large positive x.
    """
    return 1.0 / special.erfcx(np.negative(x))


def belief_variance(state: BeliefState, params: UpdateParams = DEFAULT_PARAMS) -> float:
    """Overlap variance under independent coordinates: sum of (1 - m_i^2), floored."""
    raw = float(np.sum(1.0 - state.means**2))
    return max(raw, params.delta_floor)


def update_magnitude(
    state: BeliefState,
    pattern: SpinVector,
    label: int,
    params: UpdateParams = DEFAULT_PARAMS,
) -> float:
    """Step-size factor shared by all coordinates for one labeled pattern."""
    delta = belief_variance(state, params)
    h = float(pattern.signs @ state.means)
    return 2.0 / np.sqrt(2.0 * np.pi * delta) * float(update_gain(label * h / np.sqrt(2.0 * delta)))


def update(
    state: BeliefState,
    pattern: SpinVector,
    label: int,
    params: UpdateParams = DEFAULT_PARAMS,
) -> BeliefState:
    """One online step: means move by label * entry * W(m) * magnitude.

    W(m) = 1 - m^2, except it is raised to the ``w0`` floor when the sample
    pushes against the current sign and the default weight has collapsed
    below ``w0`` (escape hatch from a wrongly saturated mean).  Results are
    clamped to [-1, 1].
    """
    if pattern.n != state.n:
        raise ValueError(f"pattern length {pattern.n} does not match state size {state.n}")
    if label not in (-1, 1):
        raise ValueError("label must be +1 or -1")
    m = state.means
    r = update_magnitude(state, pattern, label, params)
    drive = label * pattern.signs.astype(np.float64)
    w = 1.0 - m**2
    w = np.where((drive * m < 0.0) & (w < params.w0), params.w0, w)
    means = np.clip(m + drive * w * r, -1.0, 1.0)
    return BeliefState(means=means, samples_seen=state.samples_seen + 1)


def infer(state: BeliefState) -> SpinVector:
    """Sign vector of the means; exact zeros resolve to +1."""
    return SpinVector.from_signs(np.where(state.means < 0.0, -1, 1).astype(np.int8))


def bayes_posterior_mean(m_i: float, a_plus: float | None, a_minus: float | None) -> float:
    """Posterior mean of one weight from conditional correct-classification rates.

    ``a_plus``/``a_minus`` may be None only when the matching prior weight
    probability is zero (the term then drops out).
    """
    p_plus = 0.5 * (1.0 + m_i)
    p_minus = 0.5 * (1.0 - m_i)
    t_plus = p_plus * a_plus if a_plus is not None else 0.0
    t_minus = p_minus * a_minus if a_minus is not None else 0.0
    if a_plus is None and p_plus != 0.0:
        raise ValueError("a_plus undefined but weight +1 has positive probability")
    if a_minus is None and p_minus != 0.0:
        raise ValueError("a_minus undefined but weight -1 has positive probability")
    denom = t_plus + t_minus
    if denom == 0.0:
        raise ValueError("sample has zero probability under the belief")
    return (t_plus - t_minus) / denom


def gaussian_conditionals(
    state: BeliefState,
    pattern: SpinVector,
    label: int,
    i: int,
    params: UpdateParams = DEFAULT_PARAMS,
) -> tuple[float, float]:
    """Gaussian-tail estimates of the conditional correct rates for weight ``i``.

    The overlap restricted to weight ``i`` = +-1 is approximated as Gaussian
    with the coordinate's contribution shifted to +-pattern entry; each rate
    is the mass of the positive tail.
    """
    if not 0 <= i < state.n:
        raise ValueError(f"coordinate {i} out of range")
    delta = belief_variance(state, params)
    signs = pattern.signs.astype(np.float64)
    rest = float(signs @ state.means) - signs[i] * state.means[i]
    sd = np.sqrt(delta)
    a_plus = float(special.ndtr(label * (signs[i] + rest) / sd))
    a_minus = float(special.ndtr(label * (-signs[i] + rest) / sd))
    return a_plus, a_minus


def linearized_conditionals(
    state: BeliefState,
    pattern: SpinVector,
    label: int,
    i: int,
    params: UpdateParams = DEFAULT_PARAMS,
) -> tuple[float, float]:
    """First-order form of the Gaussian conditionals, clamped to [0, 1].

    Exposes the pair A +- entry_i * (1 - m_i) * dA with A the positive-tail
    mass at the full mean overlap and dA the Gaussian density at zero.
    """
    if not 0 <= i < state.n:
        raise ValueError(f"coordinate {i} out of range")
    delta = belief_variance(state, params)
    signs = pattern.signs.astype(np.float64)
    h = float(signs @ state.means)
    a = float(special.ndtr(label * h / np.sqrt(delta)))
    da = float(np.exp(-h * h / (2.0 * delta)) / np.sqrt(2.0 * np.pi * delta))
    shift = signs[i] * (1.0 - state.means[i]) * da
    return float(np.clip(a + shift, 0.0, 1.0)), float(np.clip(a - shift, 0.0, 1.0))
