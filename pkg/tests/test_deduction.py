import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apal.deduction import deduce_weight, find_balance_index, run_deductive
from apal.spins import SpinVector, TeacherOracle, overlap, prefix_flip


def sv(*entries):
    return SpinVector.from_signs(entries)


def q_table(pattern: SpinVector, truth: SpinVector) -> list[int]:
    """Full prefix-flip overlap profile q(0..n), computed openly from the truth."""
    return [overlap(prefix_flip(pattern, k), truth) for k in range(pattern.n + 1)]


class TestFindBalanceIndex:
    def test_worked_three_spin_case(self):
        # T=(+,-,+), xi=(+,+,+): q = (1, -1, 1, -1); midpoint 2 is queried,
        # the full flip is inferred for free, so two queries suffice.
        truth, xi = sv(1, -1, 1), sv(1, 1, 1)
        oracle = TeacherOracle(truth)
        bp = find_balance_index(xi, oracle)
        assert (bp.n_star, bp.q_sign, bp.queries_used) == (2, 1, 2)

    def test_unique_crossing_at_origin(self):
        # q = (1, -1, -3, -1): the only crossing adjacent to a |q|=1 bracket
        # that bisection can settle on is n*=0.
        truth, xi = sv(1, 1, 1), sv(1, 1, -1)
        oracle = TeacherOracle(truth)
        assert q_table(xi, truth) == [1, -1, -3, -1]
        bp = find_balance_index(xi, oracle)
        assert bp.n_star == 0
        assert bp.q_sign == 1
        assert bp.queries_used == 1 + math.ceil(math.log2(3))

    @given(st.integers(0, 9), st.data())
    @settings(max_examples=120, deadline=None)
    def test_balance_point_is_valid(self, half_n, data):
        n = 2 * half_n + 1
        truth = SpinVector(n, data.draw(st.integers(0, (1 << n) - 1)))
        xi = SpinVector(n, data.draw(st.integers(0, (1 << n) - 1)))
        oracle = TeacherOracle(truth)
        bp = find_balance_index(xi, oracle)
        q = q_table(xi, truth)
        assert abs(q[bp.n_star]) == 1
        assert q[bp.n_star + 1] == -q[bp.n_star]
        assert np.sign(q[bp.n_star]) == bp.q_sign
        assert bp.queries_used <= 1 + math.ceil(math.log2(n)) if n > 1 else bp.queries_used == 1

    def test_bracketing_invariant_replay(self):
        # Replay the bisection decisions from the open q table and check the
        # bracket endpoints always hold opposite signs.
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = int(rng.choice([3, 5, 9, 15, 33]))
            truth, xi = SpinVector.random(n, rng), SpinVector.random(n, rng)
            q = q_table(xi, truth)
            left, right = 0, n
            while right - left > 1:
                assert np.sign(q[left]) == -np.sign(q[right])
                mid = (left + right + 1) // 2
                if np.sign(q[mid]) == np.sign(q[left]):
                    left = mid
                else:
                    right = mid
            assert np.sign(q[left]) == -np.sign(q[right])
            bp = find_balance_index(xi, TeacherOracle(truth))
            assert bp.n_star == left


class TestDeduceWeight:
    def test_worked_three_spin_case(self):
        truth, xi = sv(1, -1, 1), sv(1, 1, 1)
        oracle = TeacherOracle(truth)
        bp = find_balance_index(xi, oracle)
        # continuing at n*=2: probing (+,-,+) returns the balance sign, so the
        # first weight is -(-1)(+1) = +1; probing (-,+,+) flips it, giving -1.
        assert deduce_weight(0, bp, oracle) == 1
        assert deduce_weight(1, bp, oracle) == -1
        assert deduce_weight(2, bp, oracle) == 1

    @given(st.integers(1, 8), st.data())
    @settings(max_examples=60, deadline=None)
    def test_every_weight_recovered(self, half_n, data):
        n = 2 * half_n + 1
        truth = SpinVector(n, data.draw(st.integers(0, (1 << n) - 1)))
        xi = SpinVector(n, data.draw(st.integers(0, (1 << n) - 1)))
        oracle = TeacherOracle(truth)
        bp = find_balance_index(xi, oracle)
        for i in range(n):
            assert deduce_weight(i, bp, oracle) == truth.entry(i)


class TestRunDeductive:
    def test_worked_three_spin_case_total_queries(self):
        truth, xi = sv(1, -1, 1), sv(1, 1, 1)
        oracle = TeacherOracle(truth)
        estimate, used = run_deductive(oracle, pattern=xi)
        assert estimate == truth
        assert used == 4
        assert oracle.query_count == 4

    def test_single_weight_needs_one_query(self):
        oracle = TeacherOracle(sv(-1))
        estimate, used = run_deductive(oracle, pattern=sv(1))
        assert estimate == sv(-1)
        assert used == 1

    def test_bound_at_n_33(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            oracle = TeacherOracle.random(33, rng)
            estimate, used = run_deductive(oracle, rng=rng)
            assert estimate == oracle.truth
            assert used <= 33 + 6

    def test_large_system(self):
        rng = np.random.default_rng(17)
        oracle = TeacherOracle.random(1001, rng)
        estimate, used = run_deductive(oracle, rng=rng)
        assert estimate == oracle.truth
        assert used <= 1001 + 10

    @given(st.integers(0, 9), st.data())
    @settings(max_examples=120, deadline=None)
    def test_exact_recovery_within_budget(self, half_n, data):
        n = 2 * half_n + 1
        truth = SpinVector(n, data.draw(st.integers(0, (1 << n) - 1)))
        xi = SpinVector(n, data.draw(st.integers(0, (1 << n) - 1)))
        oracle = TeacherOracle(truth)
        estimate, used = run_deductive(oracle, pattern=xi)
        assert estimate == truth
        assert used == oracle.query_count
        assert used <= n + math.ceil(math.log2(n)) if n > 1 else used == 1

    def test_needs_pattern_or_rng(self):
        with pytest.raises(ValueError):
            run_deductive(TeacherOracle(sv(1, 1, 1)))
