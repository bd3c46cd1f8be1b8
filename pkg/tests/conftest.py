"""Shared helpers: hand-built models and a random-game generator whose
instances are small enough for the brute-force reference solver."""

from __future__ import annotations

import random

import pytest

from sgsolve import Objective
from sgsolve.model import Distribution, GameModel, Player, build_game

MAX = Player.MAXIMIZER
MIN = Player.MINIMIZER


def dirac(t: int) -> Distribution:
    return Distribution.dirac(t)


def dist(*pairs) -> Distribution:
    return Distribution.of(list(pairs))


def chain_model() -> GameModel:
    """0 -> 1 -> 2(absorbing), single action each."""
    return build_game(
        [MAX, MAX, MAX],
        [(dirac(1),), (dirac(2),), (dirac(2),)],
        [0.0, 0.0, 1.0],
        0,
    )


def loop_exit_model() -> GameModel:
    """Maximizer state 1 with a self-loop (reward 4) and an exit to the
    absorbing reward-5 state 0."""
    return build_game(
        [MAX, MAX],
        [(dirac(0),), (dirac(1), dirac(0))],
        [5.0, 4.0],
        1,
    )


def split_value_mec_model(order_a: int = 0, order_b: int = 0) -> GameModel:
    """One MEC holding both a Maximizer state (reward 10, can loop) and a
    Minimizer state (reward 0, can loop); the values split to 10 and 0."""
    a_acts = [dirac(0), dirac(1)]
    b_acts = [dirac(0), dirac(1)]
    if order_a:
        a_acts.reverse()
    if order_b:
        b_acts.reverse()
    return build_game([MAX, MIN], [tuple(a_acts), tuple(b_acts)], [10.0, 0.0], 0)


def random_game(rng: random.Random, max_states: int = 8) -> GameModel:
    """Small game with dyadic probabilities (multiples of 1/16), up to 3
    actions per state and integer rewards in [0, 10]."""
    n = rng.randint(2, max_states)
    owners = [rng.choice([MAX, MIN]) for _ in range(n)]
    rewards = [float(rng.randint(0, 10)) for _ in range(n)]
    actions = []
    for _ in range(n):
        dists = []
        for _ in range(rng.choice([1, 1, 2, 2, 3])):
            k = rng.randint(1, min(3, n))
            targets = rng.sample(range(n), k)
            cuts = sorted(rng.sample(range(1, 16), k - 1))
            weights = []
            prev = 0
            for c in cuts + [16]:
                weights.append((c - prev) / 16)
                prev = c
            dists.append(Distribution.of(list(zip(targets, weights))))
        actions.append(tuple(dists))
    return build_game(owners, actions, rewards, rng.randint(0, n - 1))


def random_objective(rng: random.Random, model: GameModel) -> Objective:
    roll = rng.random()
    if roll < 0.4:
        return Objective.mean_payoff(model)
    k = rng.randint(1, max(1, model.num_states // 2))
    states = frozenset(rng.sample(range(model.num_states), k))
    if roll < 0.8:
        return Objective.reachability(states)
    return Objective.safety(states)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xC0FFEE)
