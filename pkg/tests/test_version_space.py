import itertools
import math

import numpy as np
import pytest

from apal.belief import bayes_posterior_mean
from apal.spins import SpinVector, classify
from apal.version_space import (
    EnumerationLimitError,
    VersionSpace,
    bisect_design,
    conditional_correct_fractions,
    generalization_error_exact,
    generalization_error_sampled,
    overlap_histogram,
    pattern_imbalance,
    space_stats,
)


def sv(*entries):
    return SpinVector.from_signs(entries)


def ref_members(n: int, samples: list[tuple[SpinVector, int]]) -> list[tuple[int, ...]]:
    """Brute-force filtering over all sign tuples, independent of bit packing."""
    out = []
    for combo in itertools.product((-1, 1), repeat=n):
        ok = True
        for xi, label in samples:
            dot = sum(c * e for c, e in zip(combo, xi.signs.tolist()))
            if (1 if dot > 0 else -1) != label:
                ok = False
                break
        if ok:
            out.append(combo)
    return out


def members_as_tuples(vs: VersionSpace) -> set[tuple[int, ...]]:
    return {tuple(vs.member_vector(i).signs.tolist()) for i in range(len(vs))}


def random_consistent_space(rng, n, p) -> tuple[VersionSpace, SpinVector, list]:
    """Version space after p random teacher-labeled samples."""
    truth = SpinVector.random(n, rng)
    vs = VersionSpace.initial(n)
    samples = []
    for _ in range(p):
        xi = SpinVector.random(n, rng)
        label = classify(xi, truth)
        vs = vs.filtered(xi, label)
        samples.append((xi, label))
    return vs, truth, samples


class TestEnumeration:
    def test_initial_sizes(self):
        assert len(VersionSpace.initial(3)) == 8
        assert len(VersionSpace.initial(1)) == 2
        assert VersionSpace.initial(3).samples_seen == 0
        assert space_stats(VersionSpace.initial(3)).entropy_density == 1.0

    def test_limit_enforced(self):
        with pytest.raises(EnumerationLimitError):
            VersionSpace.initial(27)
        assert len(VersionSpace.initial(25)) == 33_554_432

    def test_even_n_rejected(self):
        with pytest.raises(ValueError):
            VersionSpace.initial(4)


class TestFilter:
    def test_worked_three_spin_case(self):
        vs = VersionSpace.initial(3).filtered(sv(1, 1, 1), 1)
        assert len(vs) == 4
        assert members_as_tuples(vs) == {(1, 1, 1), (1, 1, -1), (1, -1, 1), (-1, 1, 1)}
        assert space_stats(vs).entropy_density == pytest.approx(2 / 3)

    def test_flipped_label_gives_complement(self):
        full = members_as_tuples(VersionSpace.initial(3))
        pos = members_as_tuples(VersionSpace.initial(3).filtered(sv(1, 1, 1), 1))
        neg = members_as_tuples(VersionSpace.initial(3).filtered(sv(1, 1, 1), -1))
        assert pos | neg == full and not pos & neg

    def test_repeat_sample_is_idempotent(self):
        vs = VersionSpace.initial(5).filtered(sv(1, -1, 1, 1, -1), 1)
        again = vs.filtered(sv(1, -1, 1, 1, -1), 1)
        assert np.array_equal(vs.members, again.members)
        assert again.samples_seen == 2

    def test_contradictory_label_raises(self):
        vs = VersionSpace.initial(3).filtered(sv(1, 1, 1), 1)
        with pytest.raises(RuntimeError):
            vs.filtered(sv(1, 1, 1), -1)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(3)
        for n in (3, 5, 7):
            vs, truth, samples = random_consistent_space(rng, n, n)
            assert members_as_tuples(vs) == set(ref_members(n, samples))

    def test_truth_membership_and_shrinkage(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            truth = SpinVector.random(7, rng)
            vs = VersionSpace.initial(7)
            prev = len(vs)
            for _ in range(10):
                xi = SpinVector.random(7, rng)
                vs = vs.filtered(xi, classify(xi, truth))
                assert vs.contains(truth)
                assert len(vs) <= prev
                prev = len(vs)


class TestStats:
    def test_worked_mean_weights(self):
        vs = VersionSpace.initial(3).filtered(sv(1, 1, 1), 1)
        assert space_stats(vs).mean_weights == pytest.approx([0.5, 0.5, 0.5])

    def test_initial_space_is_symmetric(self):
        st = space_stats(VersionSpace.initial(5), truth=sv(1, -1, 1, 1, -1))
        assert st.mean_weights == pytest.approx([0.0] * 5)
        assert st.generalization_error == pytest.approx(0.5)

    def test_exact_generalization_error_worked_case(self):
        # Full enumeration over 8 patterns x 4 members gives 12 mislabeled
        # pairs, i.e. 3/8 (two independent routes agree on this value).
        vs = VersionSpace.initial(3).filtered(sv(1, 1, 1), 1)
        assert generalization_error_exact(vs, sv(1, 1, 1)) == pytest.approx(3 / 8)

    def test_exact_matches_brute_force_enumeration(self):
        rng = np.random.default_rng(5)
        for n in (3, 5, 9):
            vs, truth, _ = random_consistent_space(rng, n, max(1, n // 2))
            # independent route: sign matrices over every pattern and member
            patterns = np.array(list(itertools.product((-1, 1), repeat=n)))
            members = np.array(sorted(members_as_tuples(vs)))
            truth_labels = np.sign(patterns @ np.array(truth.signs.tolist()))
            member_labels_mat = np.sign(patterns @ members.T)
            brute = np.mean(member_labels_mat != truth_labels[:, None])
            assert generalization_error_exact(vs, truth) == pytest.approx(brute, abs=1e-12)

    def test_sampled_estimator_agrees_with_exact(self):
        rng = np.random.default_rng(6)
        vs, truth, _ = random_consistent_space(rng, 9, 4)
        exact = generalization_error_exact(vs, truth)
        est = generalization_error_sampled(vs, truth, rng, test_samples=40_000)
        sigma = math.sqrt(max(exact * (1 - exact), 1e-12) / 40_000)
        assert abs(est - exact) < 4 * sigma + 1e-9

    def test_pair_correlations_diagonal(self):
        vs = VersionSpace.initial(3).filtered(sv(1, 1, 1), 1)
        st = space_stats(vs, with_pairs=True)
        assert np.allclose(np.diag(st.pair_correlations), 1.0)
        assert np.allclose(st.pair_correlations, st.pair_correlations.T)


class TestBisectDesign:
    def test_initial_space_any_pattern_is_perfect(self):
        vs = VersionSpace.initial(5)
        pattern, imbalance = bisect_design(vs, np.random.default_rng(0))
        assert imbalance == 0
        assert pattern_imbalance(vs, pattern) == 0

    def test_worked_case_reaches_zero(self):
        vs = VersionSpace.initial(3).filtered(sv(1, 1, 1), 1)
        # (+,-,-) splits this four-member space 2/2 by hand
        assert pattern_imbalance(vs, sv(1, -1, -1)) == 0
        pattern, imbalance = bisect_design(vs, np.random.default_rng(0))
        assert imbalance == 0
        assert pattern_imbalance(vs, pattern) == 0

    def test_odd_size_has_odd_imbalance(self):
        members = np.array([0b111, 0b110, 0b011], dtype=np.uint32)
        vs = VersionSpace(n=3, members=members, samples_seen=0)
        pattern, imbalance = bisect_design(vs, np.random.default_rng(0))
        assert imbalance % 2 == 1
        assert imbalance == 1

    def test_imbalance_parity_matches_size(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            vs, _, _ = random_consistent_space(rng, 7, 3)
            _, imbalance = bisect_design(vs, rng)
            assert imbalance % 2 == len(vs) % 2

    def test_stochastic_path_still_splits_well(self):
        rng = np.random.default_rng(9)
        vs, _, _ = random_consistent_space(rng, 11, 2)
        pattern, imbalance = bisect_design(vs, rng, exhaustive_budget=0)
        assert imbalance == pattern_imbalance(vs, pattern)
        assert imbalance <= max(2, len(vs) // 16)

    def test_stochastic_path_splits_near_identical_pair(self):
        # two members one flip apart: only ~21% of patterns separate them,
        # but the pool must find one
        rng = np.random.default_rng(10)
        base = SpinVector.random(15, rng)
        pair = np.sort(
            np.array([base.bits, base.bits ^ (1 << 4)], dtype=np.uint32)
        )
        vs = VersionSpace(n=15, members=pair, samples_seen=0)
        pattern, imbalance = bisect_design(vs, rng, exhaustive_budget=0)
        assert imbalance == 0

    def test_deterministic_given_stream(self):
        vs, _, _ = random_consistent_space(np.random.default_rng(11), 9, 3)
        p1, i1 = bisect_design(vs, np.random.default_rng(42), exhaustive_budget=0)
        p2, i2 = bisect_design(vs, np.random.default_rng(42), exhaustive_budget=0)
        assert p1 == p2 and i1 == i2

    def test_retained_size_bounded_by_imbalance(self):
        # filtering keeps one side of the split, so at most (|vs| + imbalance)/2
        rng = np.random.default_rng(16)
        truth = SpinVector.random(9, rng)
        vs = VersionSpace.initial(9)
        for _ in range(9):
            pattern, imbalance = bisect_design(vs, rng)
            before = len(vs)
            vs = vs.filtered(pattern, classify(pattern, truth))
            assert len(vs) <= (before + imbalance) // 2


class TestConditionals:
    def test_worked_initial_space_case(self):
        vs = VersionSpace.initial(3)
        a_plus, a_minus = conditional_correct_fractions(vs, sv(1, 1, 1), 1, 0)
        assert a_plus == pytest.approx(3 / 4)
        assert a_minus == pytest.approx(1 / 4)
        # composing the conditional split with a flat prior reproduces the
        # filtered-space mean weight
        assert bayes_posterior_mean(0.0, a_plus, a_minus) == pytest.approx(0.5)

    def test_symmetric_coordinate_gives_equal_fractions(self):
        members = np.array(
            [0b111, 0b110, 0b001, 0b000], dtype=np.uint32
        )  # closed under flipping coordinate 0
        vs = VersionSpace(n=3, members=members, samples_seen=0)
        a_plus, a_minus = conditional_correct_fractions(vs, sv(1, 1, 1), 1, 0)
        assert a_plus == a_minus == pytest.approx(0.5)

    def test_empty_subspace_flagged(self):
        # both members carry +1 in coordinate 0, so the J_0 = -1 sub-space is empty
        vs = VersionSpace(n=3, members=np.array([0b101, 0b111], dtype=np.uint32))
        a_plus, a_minus = conditional_correct_fractions(vs, sv(1, 1, 1), 1, 0)
        assert a_minus is None
        assert a_plus == pytest.approx(1.0)

    def test_exact_bayes_identity_random_instances(self):
        # composing the enumerated conditionals through the posterior-mean
        # formula must equal the enumerated mean of the filtered space exactly
        rng = np.random.default_rng(12)
        for _ in range(25):
            n = int(rng.choice([3, 5, 7, 9]))
            vs, truth, _ = random_consistent_space(rng, n, int(rng.integers(0, n + 1)))
            xi = SpinVector.random(n, rng)
            label = classify(xi, truth)
            before = space_stats(vs).mean_weights
            after = space_stats(vs.filtered(xi, label)).mean_weights
            for i in range(n):
                a_plus, a_minus = conditional_correct_fractions(vs, xi, label, i)
                composed = bayes_posterior_mean(before[i], a_plus, a_minus)
                assert composed == pytest.approx(after[i], abs=1e-12)


class TestOverlapHistogram:
    def test_initial_space_is_binomial(self):
        hist = overlap_histogram(VersionSpace.initial(3), sv(1, -1, 1))
        assert hist == {
            -3: pytest.approx(1 / 8),
            -1: pytest.approx(3 / 8),
            1: pytest.approx(3 / 8),
            3: pytest.approx(1 / 8),
        }

    def test_support_odd_and_normalized(self):
        rng = np.random.default_rng(13)
        vs, _, _ = random_consistent_space(rng, 9, 4)
        xi = SpinVector.random(9, rng)
        hist = overlap_histogram(vs, xi)
        assert sum(hist.values()) == pytest.approx(1.0)
        assert all(q % 2 != 0 and -9 <= q <= 9 for q in hist)

    def test_first_moment_identity(self):
        rng = np.random.default_rng(14)
        vs, _, _ = random_consistent_space(rng, 7, 3)
        xi = SpinVector.random(7, rng)
        hist = overlap_histogram(vs, xi)
        mean = sum(q * p for q, p in hist.items())
        st = space_stats(vs)
        assert mean == pytest.approx(float(xi.signs @ st.mean_weights))

    def test_variance_matches_pair_correlation_form(self):
        rng = np.random.default_rng(15)
        for n in (5, 7, 9):
            vs, _, _ = random_consistent_space(rng, n, n // 2)
            xi = SpinVector.random(n, rng)
            hist = overlap_histogram(vs, xi)
            mean = sum(q * p for q, p in hist.items())
            var = sum(q * q * p for q, p in hist.items()) - mean**2
            st = space_stats(vs, with_pairs=True)
            m, corr = st.mean_weights, st.pair_correlations
            s = xi.signs.astype(float)
            expected = float(np.sum(1.0 - m**2))
            for i in range(n):
                for j in range(i + 1, n):
                    expected += 2.0 * s[i] * s[j] * (corr[i, j] - m[i] * m[j])
            assert var == pytest.approx(expected, abs=1e-9)
