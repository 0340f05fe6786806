import math
import numpy as np
import pytest

from GeneralizedCounters.SeededRng import SeededRng
from GeneralizedCounters.tables import ValueTable
from GeneralizedCounters.action_selection import (StochasticRule, BonusForm, action_distribution, policy_distribution,
                                                  sample_action, lll_select, lll_scores, mindiff_select, ucb_select,
                                                  greedy_select, reward_bonus)
from GeneralizedCounters.exceptions import ConfigurationError, ContractViolation


def _table(*rows):
    Q = ValueTable(len(rows), len(rows[0]))
    Q.q[:] = rows
    return Q


class TestPolicyDistribution:

    def test_pure_greedy(self):
        f = policy_distribution(StochasticRule("epsilon_greedy", epsilon=0.0), _table([1.0, 0.0]), 0)
        np.testing.assert_allclose(f, [1.0, 0.0])

    def test_epsilon_greedy(self):
        f = policy_distribution(StochasticRule("epsilon_greedy", epsilon=0.2), _table([1.0, 0.0]), 0)
        np.testing.assert_allclose(f, [0.9, 0.1])

    def test_greedy_ties_split(self):
        f = action_distribution(StochasticRule("epsilon_greedy", epsilon=0.3), [2.0, 2.0, 0.0])
        np.testing.assert_allclose(f, [0.45, 0.45, 0.1])

    def test_softmax_high_temperature_is_uniform(self):
        f = policy_distribution(StochasticRule("softmax", temperature=1e9), _table([1.0, 0.0]), 0)
        np.testing.assert_allclose(f, [0.5, 0.5], atol=1e-6)

    def test_softmax_large_values_stay_finite(self):
        f = action_distribution(StochasticRule("softmax", temperature=0.01), [1e4, 0.0])
        np.testing.assert_allclose(f, [1.0, 0.0])

    def test_invalid_actions_get_zero(self):
        for rule in (StochasticRule("epsilon_greedy", 0.5), StochasticRule("softmax", temperature=1.0)):
            f = action_distribution(rule, [0.0, 5.0, 1.0], actions=[0, 2])
            assert f[1] == 0.0
            assert f.sum() == pytest.approx(1.0)

    def test_non_positive_temperature(self):
        with pytest.raises(ConfigurationError):
            StochasticRule("softmax", temperature=0.0)

    def test_shift_invariance(self):
        rng = np.random.default_rng(5)
        for rule in (StochasticRule("epsilon_greedy", 0.1), StochasticRule("softmax", temperature=0.25)):
            for _ in range(50):
                q = rng.normal(size=4)
                gc = rng.integers(0, 10, size=4)
                f, f_shifted = action_distribution(rule, q), action_distribution(rule, q + 100.0)
                np.testing.assert_allclose(f, f_shifted, atol=1e-12)
                assert lll_select(f, gc) == lll_select(f_shifted, gc)


class TestSampleAction:

    def test_point_mass(self):
        rng = SeededRng(0)
        assert all(sample_action([1.0, 0.0], rng) == 0 for _ in range(100))

    def test_fair_coin(self):
        rng = SeededRng(1)
        draws = np.array([sample_action([0.5, 0.5], rng) for _ in range(100000)])
        assert abs(draws.mean() - 0.5) < 0.01

    def test_zero_entry_never_sampled(self):
        rng = SeededRng(2)
        assert all(sample_action([0.3, 0.0, 0.7], rng) != 1 for _ in range(1000))


class TestLllSelect:

    def test_ratio(self):
        assert lll_select([0.5, 0.5], [1.0, 2.0]) == 0

    def test_unvisited_priority(self):
        assert lll_select([0.5, 0.5], [0.0, 5.0]) == 0

    def test_zero_probability_excluded(self):
        assert lll_select([0.0, 1.0], [0.0, 3.0]) == 1

    def test_ties_lowest_index(self):
        assert lll_select([0.25, 0.25, 0.5], [1.0, 1.0, 2.0]) == 0

    def test_all_zero_probabilities(self):
        with pytest.raises(ContractViolation):
            lll_select([0.0, 0.0], [1.0, 1.0])

    def test_scores(self):
        scores = lll_scores([0.5, 0.0, 0.5], [2.0, 1.0, 0.0])
        assert scores[0] == pytest.approx(math.log(0.25))
        assert scores[1] == -np.inf and scores[2] == np.inf

    def test_frequencies_follow_f(self):
        rng = np.random.default_rng(8)
        T = 100000
        for n_actions in (2, 3, 5):
            f = rng.dirichlet(np.ones(n_actions))
            counts = np.zeros(n_actions)
            for _ in range(T):
                counts[lll_select(f, counts)] += 1
            assert np.abs(counts / T - f).max() <= 0.01


class TestMindiffSelect:

    def test_examples(self):
        assert mindiff_select([0.5, 0.5], [3, 1], 4) == 1
        assert mindiff_select([0.2, 0.8], [0, 0], 0) == 1
        assert mindiff_select([0.5, 0.5], [2, 2], 4) == 0

    def test_zero_probability_never_chosen(self):
        assert mindiff_select([0.0, 1.0], [0, 10], 10) == 1

    def test_frequency_bound_at_every_step(self):
        rng = np.random.default_rng(3)
        T = 10000
        for trial in range(20):
            n_actions = (2, 3, 5)[trial % 3]
            f = rng.dirichlet(np.ones(n_actions))
            counts = np.zeros(n_actions, dtype=np.int64)
            for t in range(1, T + 1):
                counts[mindiff_select(f, counts, t - 1)] += 1
                assert (counts / t - f).max() <= 1 / t + 1e-12
            assert np.abs(counts / T - f).max() <= n_actions / T + 1e-12


class TestUcbSelect:

    def test_examples(self):
        assert ucb_select(_table([0.0, 0.0]), [1.0, 2.0], 0, 3) == 0
        assert ucb_select(_table([-5.0, 3.0]), [0.0, 5.0], 0, 10) == 0
        assert ucb_select(_table([10.0, 0.0]), [100.0, 100.0], 0, 101) == 0

    def test_pure(self):
        Q = _table([0.3, 0.2, 0.1])
        assert ucb_select(Q, [4.0, 2.0, 1.0], 0, 50) == ucb_select(Q, [4.0, 2.0, 1.0], 0, 50)

    def test_invalid_actions_skipped(self):
        assert ucb_select(_table([0.0, 0.0]), [0.0, 0.0], 0, 1, actions=[1]) == 1


def test_greedy_select_respects_valid_actions():
    assert greedy_select([5.0, 1.0, 2.0], actions=[1, 2]) == 2


class TestRewardBonus:

    def test_first_visit(self):
        assert reward_bonus(0.0, 1.0, BonusForm("inverse_gc"), 0.1) == pytest.approx(1.0)

    def test_inverse_gc(self):
        assert reward_bonus(2.0, 4.0, BonusForm("inverse_gc", beta=1.0), 0.1) == pytest.approx(2.25)

    def test_inverse_sqrt_neglog(self):
        alpha = 0.1
        gc = math.log(0.5) / math.log(1 - alpha)
        bonus = reward_bonus(0.0, gc, BonusForm("inverse_sqrt_neglog"), alpha)
        assert bonus == pytest.approx(0.05 / math.sqrt(math.log(2)))
        assert bonus == pytest.approx(0.06006, abs=1e-5)

    def test_default_betas(self):
        assert BonusForm("inverse_gc").beta == 1.0
        assert BonusForm("inverse_sqrt_neglog").beta == 0.05

    def test_requires_updated_counter(self):
        with pytest.raises(ContractViolation):
            reward_bonus(0.0, 0.0, BonusForm(), 0.1)
