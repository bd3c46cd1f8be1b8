"""Complete-exploration solver."""

import pytest

from conftest import random_game, random_objective, split_value_mec_model
from sgsolve.bounds import BoundsVector
from sgsolve.ce import solve_ce
from sgsolve.generators import fig1_left, fig1_right, fig2_chain, generate
from sgsolve.objectives import LabelMismatch, Objective
from sgsolve.oracle import SingularSystem, TooLarge, game_value_bruteforce


def oracle_instances(rng, count, max_states=6):
    made = 0
    while made < count:
        model = random_game(rng, max_states=max_states)
        objective = random_objective(rng, model)
        try:
            values = game_value_bruteforce(model, objective)
        except (TooLarge, SingularSystem):
            continue
        made += 1
        yield model, objective, values


def test_fig1_left_meanpayoff():
    model, _ = fig1_left()
    result = solve_ce(model, Objective.mean_payoff(model))
    assert result.converged
    assert result.value == pytest.approx(5.0, abs=1e-6)
    assert result.lower <= 5.0 <= result.upper


def test_fig1_right_reachability():
    model, labels = fig1_right()
    result = solve_ce(model, Objective.reachability(labels["goal"]))
    assert result.converged
    assert result.value == pytest.approx(0.0, abs=1e-6)


def test_fig2_chain_values():
    for k in (1, 2, 4):
        model, labels = fig2_chain(k)
        result = solve_ce(model, Objective.reachability(labels["goal"]))
        assert result.converged
        assert result.value == pytest.approx(2.0**-k, abs=1e-6)


def test_split_value_mec():
    for order_a in (0, 1):
        for order_b in (0, 1):
            model = split_value_mec_model(order_a, order_b)
            result = solve_ce(model, Objective.mean_payoff(model))
            assert result.converged
            assert result.value == pytest.approx(10.0, abs=1e-6)


def test_safety_duality(rng):
    for model, objective, values in oracle_instances(rng, 15):
        if not objective.kind.value == "safety":
            objective = Objective.safety({0})
            values = game_value_bruteforce(model, objective)
        result = solve_ce(model, objective)
        assert result.converged
        assert result.objective == "safety"
        assert abs(result.value - values[model.initial]) <= 1e-6
        assert result.lower - 1e-12 <= values[model.initial] <= result.upper + 1e-12


def test_agrees_with_oracle(rng):
    for model, objective, values in oracle_instances(rng, 60):
        result = solve_ce(model, objective)
        assert result.converged
        assert abs(result.value - values[model.initial]) <= 1e-6


def test_collapse_toggle_agrees(rng):
    for model, objective, values in oracle_instances(rng, 20):
        plain = solve_ce(model, objective, enable_collapse=False)
        collapsed = solve_ce(model, objective, enable_collapse=True)
        assert plain.converged and collapsed.converged
        assert abs(plain.value - collapsed.value) <= 2e-6
        assert abs(plain.value - values[model.initial]) <= 1e-6


def test_qualitative_toggle_agrees(rng):
    for model, objective, values in oracle_instances(rng, 15):
        result = solve_ce(model, objective, qualitative=False)
        assert result.converged
        assert abs(result.value - values[model.initial]) <= 1e-6


def test_budget_exhaustion_keeps_sound_bounds():
    model, labels = fig2_chain(3)
    result = solve_ce(model, Objective.reachability(labels["goal"]), max_sweeps=1)
    assert not result.converged
    assert result.iterations == 1
    true_value = 2.0**-3
    assert result.lower - 1e-12 <= true_value <= result.upper + 1e-12
    assert result.lower <= result.value <= result.upper


def test_initial_bounds_override():
    model, _ = fig1_left()
    start = BoundsVector([4.0, 4.0], [10.0, 10.0])
    result = solve_ce(model, Objective.mean_payoff(model), initial_bounds=start)
    assert result.converged
    assert result.value == pytest.approx(5.0, abs=1e-6)


def test_instrument_sees_monotone_bounds():
    model, _ = generate("treemulsec", n=3)
    previous = {}

    def check(sweeps, work, bounds):
        for s in work.states():
            assert bounds.lb[s] <= bounds.ub[s] + 1e-12
        if previous:
            for s in work.states():
                assert bounds.lb[s] >= previous["lb"][s] - 1e-12
                assert bounds.ub[s] <= previous["ub"][s] + 1e-12
        previous["lb"] = list(bounds.lb)
        previous["ub"] = list(bounds.ub)

    result = solve_ce(model, Objective.mean_payoff(model), instrument=check)
    assert result.converged


def test_empty_goal_rejected():
    model, _ = fig1_left()
    with pytest.raises(LabelMismatch):
        solve_ce(model, Objective.reachability(set()))


def test_bad_epsilon_rejected():
    model, _ = fig1_left()
    with pytest.raises(ValueError):
        solve_ce(model, Objective.mean_payoff(model), epsilon=0.0)


def test_state_map_tracks_collapsing():
    model, labels = fig2_chain(2)
    result = solve_ce(model, Objective.reachability(labels["goal"]))
    assert result.state_map is not None
    assert len(result.state_map) == model.num_states
    (goal,) = labels["goal"]
    assert result.bounds.lb[result.state_map[goal]] == 1.0
