"""Objective construction, bound initialization and the reachability to
mean-payoff reduction."""

import pytest

from conftest import chain_model, loop_exit_model
from sgsolve.graph import mec_decompose
from sgsolve.objectives import (
    LabelMismatch,
    Objective,
    ObjectiveKind,
    init_bounds,
    reach_as_meanpayoff,
)


class TestConstructors:
    def test_reachability(self):
        obj = Objective.reachability({1, 2}, avoid={0})
        assert obj.kind is ObjectiveKind.REACHABILITY
        assert obj.goal == frozenset({1, 2})
        assert obj.avoid == frozenset({0})
        assert obj.value_floor() == 0.0
        assert obj.value_ceiling() == 1.0

    def test_goal_avoid_overlap_rejected(self):
        with pytest.raises(LabelMismatch):
            Objective.reachability({1}, avoid={1})

    def test_safety(self):
        obj = Objective.safety({3})
        assert obj.kind is ObjectiveKind.SAFETY
        assert obj.avoid == frozenset({3})

    def test_mean_payoff_takes_reward_range(self):
        obj = Objective.mean_payoff(loop_exit_model())
        assert obj.is_mean_payoff
        assert obj.rmin == 4.0
        assert obj.rmax == 5.0
        assert obj.value_floor() == 4.0
        assert obj.value_ceiling() == 5.0


class TestInitBounds:
    def test_mean_payoff_uniform(self):
        m = loop_exit_model()
        bounds = init_bounds(m, Objective.mean_payoff(m))
        assert bounds.lb == [4.0, 4.0]
        assert bounds.ub == [5.0, 5.0]

    def test_reachability_pins_goal_and_avoid(self):
        m = chain_model()
        bounds = init_bounds(m, Objective.reachability({2}), qualitative=False)
        assert bounds.lb == [0.0, 0.0, 1.0]
        assert bounds.ub == [1.0, 1.0, 1.0]

    def test_qualitative_pins_value_one_region(self):
        m = chain_model()
        bounds = init_bounds(m, Objective.reachability({2}))
        # Every state surely reaches the goal.
        assert bounds.lb == [1.0, 1.0, 1.0]

    def test_qualitative_pins_value_zero_region(self):
        m = chain_model()
        bounds = init_bounds(m, Objective.reachability({0}))
        assert bounds.ub[1] == 0.0
        assert bounds.ub[2] == 0.0

    def test_unknown_label_state_rejected(self):
        m = chain_model()
        with pytest.raises(LabelMismatch):
            init_bounds(m, Objective.reachability({17}))

    def test_safety_bounds_need_dualization(self):
        m = chain_model()
        with pytest.raises(LabelMismatch):
            init_bounds(m, Objective.safety({0}))


class TestReachAsMeanPayoff:
    def test_goal_states_become_absorbing_reward_one(self):
        m = chain_model()
        transformed, obj = reach_as_meanpayoff(m, {2})
        assert obj.is_mean_payoff
        assert obj.rmin == 0.0 and obj.rmax == 1.0
        assert transformed.is_absorbing(2)
        assert transformed.rewards == (0.0, 0.0, 1.0)

    def test_non_goal_structure_preserved(self):
        m = loop_exit_model()
        transformed, _ = reach_as_meanpayoff(m, {0})
        assert transformed.actions[1] == m.actions[1]
        assert transformed.rewards[1] == 0.0

    def test_goal_loses_other_actions(self):
        m = loop_exit_model()
        transformed, _ = reach_as_meanpayoff(m, {1})
        assert transformed.num_actions(1) == 1
        assert transformed.is_absorbing(1)
        # The goal self-loop is a maximal end component of its own.
        assert any(
            mec.states == frozenset({1})
            for mec in mec_decompose(transformed).mecs
        )

    def test_empty_goal_rejected(self):
        with pytest.raises(LabelMismatch):
            reach_as_meanpayoff(chain_model(), set())

    def test_unknown_goal_state_rejected(self):
        with pytest.raises(LabelMismatch):
            reach_as_meanpayoff(chain_model(), {9})
