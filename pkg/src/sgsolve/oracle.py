"""Reference solver for small games, by brute force over strategy pairs.

Deliberately independent of the iterative solvers: values of the induced
Markov chains are obtained by direct linear algebra (numpy) and graph
condensation (networkx), so agreement between the two is meaningful.
"""

from __future__ import annotations

import itertools
import math
from typing import Optional, Sequence

import networkx as nx
import numpy as np

from .model import GameModel, Player
from .objectives import Objective, ObjectiveKind

RESIDUAL_TOLERANCE = 1e-12
DETERMINACY_TOLERANCE = 1e-9
MAX_STRATEGY_PAIRS = 1_000_000


class SingularSystem(Exception):
    pass


class TooLarge(Exception):
    pass


def _chain_rows(model: GameModel, choice: Sequence[int]) -> list[tuple[tuple[int, float], ...]]:
    return [model.distribution(s, choice[s]).support for s in model.states()]


def _check_chain(model: GameModel) -> list[tuple[tuple[int, float], ...]]:
    for s in model.states():
        if model.num_actions(s) != 1:
            raise ValueError(f"state {s} has {model.num_actions(s)} actions, chain expected")
    return _chain_rows(model, [0] * model.num_states)


def _reach_values(
    rows: Sequence[tuple[tuple[int, float], ...]],
    goal: frozenset[int],
    avoid: frozenset[int],
) -> np.ndarray:
    """Hitting probabilities of ``goal`` while avoiding ``avoid`` in a
    Markov chain given as per-state sparse successor rows."""
    n = len(rows)
    # Treat avoid states as absorbing misses.
    effective_goal = set(goal) - set(avoid)
    # States with any path to the goal (not passing through avoid).
    can_reach = set(effective_goal)
    changed = True
    while changed:
        changed = False
        for s in range(n):
            if s in can_reach or s in avoid or s in effective_goal:
                continue
            if any(t in can_reach for t, _ in rows[s]):
                can_reach.add(s)
                changed = True
    values = np.zeros(n)
    for g in effective_goal:
        values[g] = 1.0
    unknown = sorted(can_reach - effective_goal)
    if unknown:
        pos = {s: i for i, s in enumerate(unknown)}
        m = len(unknown)
        a = np.eye(m)
        b = np.zeros(m)
        for s in unknown:
            for t, p in rows[s]:
                if t in effective_goal:
                    b[pos[s]] += p
                elif t in pos:
                    a[pos[s], pos[t]] -= p
        try:
            x = np.linalg.solve(a, b)
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(str(exc)) from exc
        if np.max(np.abs(a @ x - b)) > RESIDUAL_TOLERANCE:
            raise SingularSystem("reachability system residual too large")
        for s in unknown:
            values[s] = x[pos[s]]
    return values


def _stationary(rows, states: Sequence[int]) -> np.ndarray:
    pos = {s: i for i, s in enumerate(states)}
    m = len(states)
    p = np.zeros((m, m))
    for s in states:
        for t, q in rows[s]:
            p[pos[s], pos[t]] = q
    a = np.vstack([p.T - np.eye(m), np.ones((1, m))])
    b = np.zeros(m + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(a, b, rcond=None)
    if np.max(np.abs(a @ pi - b)) > 1e-10:
        raise SingularSystem("stationary distribution residual too large")
    return pi


def _meanpayoff_values(
    rows: Sequence[tuple[tuple[int, float], ...]],
    rewards: Sequence[float],
) -> np.ndarray:
    n = len(rows)
    graph = nx.DiGraph()
    graph.add_nodes_from(range(n))
    for s in range(n):
        for t, _ in rows[s]:
            graph.add_edge(s, t)
    values = np.zeros(n)
    in_bscc = np.zeros(n, dtype=bool)
    for comp in nx.strongly_connected_components(graph):
        members = sorted(comp)
        if any(t not in comp for s in members for t, _ in rows[s]):
            continue
        pi = _stationary(rows, members)
        gain = float(sum(pi[i] * rewards[s] for i, s in enumerate(members)))
        for s in members:
            values[s] = gain
            in_bscc[s] = True
    transient = [s for s in range(n) if not in_bscc[s]]
    if transient:
        pos = {s: i for i, s in enumerate(transient)}
        m = len(transient)
        a = np.eye(m)
        b = np.zeros(m)
        for s in transient:
            for t, p in rows[s]:
                if t in pos:
                    a[pos[s], pos[t]] -= p
                else:
                    b[pos[s]] += p * values[t]
        try:
            x = np.linalg.solve(a, b)
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(str(exc)) from exc
        if np.max(np.abs(a @ x - b)) > RESIDUAL_TOLERANCE:
            raise SingularSystem("mean-payoff system residual too large")
        for s in transient:
            values[s] = x[pos[s]]
    return values


def solve_mc_reach(chain: GameModel, goal, avoid=()) -> list[float]:
    """Exact reach probabilities for a one-action-per-state model."""
    rows = _check_chain(chain)
    return list(_reach_values(rows, frozenset(goal), frozenset(avoid)))


def solve_mc_meanpayoff(chain: GameModel) -> list[float]:
    """Exact mean payoff for a one-action-per-state model."""
    rows = _check_chain(chain)
    return list(_meanpayoff_values(rows, chain.rewards))


def _chain_objective_values(rows, model: GameModel, objective: Objective) -> np.ndarray:
    if objective.kind is ObjectiveKind.REACHABILITY:
        return _reach_values(rows, objective.goal, objective.avoid)
    if objective.kind is ObjectiveKind.SAFETY:
        return 1.0 - _reach_values(rows, objective.avoid, frozenset())
    return _meanpayoff_values(rows, model.rewards)


def game_value_bruteforce(
    model: GameModel,
    objective: Objective,
    state: Optional[int] = None,
) -> list[float] | float:
    """Exact game values by enumerating all positional strategy pairs.

    Computes sup-inf and inf-sup over the induced chain values and checks
    that they coincide (determinacy) within 1e-9.  Raises TooLarge when
    the number of pairs exceeds 1e6.
    """
    n = model.num_states
    max_states = [s for s in model.states() if model.owner(s) is Player.MAXIMIZER]
    min_states = [s for s in model.states() if model.owner(s) is Player.MINIMIZER]
    total = 1
    for s in model.states():
        total *= model.num_actions(s)
        if total > MAX_STRATEGY_PAIRS:
            raise TooLarge(f"more than {MAX_STRATEGY_PAIRS} strategy pairs")

    max_choices = list(
        itertools.product(*(range(model.num_actions(s)) for s in max_states))
    )
    min_choices = list(
        itertools.product(*(range(model.num_actions(s)) for s in min_states))
    )
    values = np.empty((len(max_choices), len(min_choices), n))
    choice = [0] * n
    for i, sigma in enumerate(max_choices):
        for s, a in zip(max_states, sigma):
            choice[s] = a
        for j, tau in enumerate(min_choices):
            for s, a in zip(min_states, tau):
                choice[s] = a
            rows = _chain_rows(model, choice)
            values[i, j] = _chain_objective_values(rows, model, objective)

    supinf = values.min(axis=1).max(axis=0)
    infsup = values.max(axis=0).min(axis=0)
    if np.max(np.abs(supinf - infsup)) > DETERMINACY_TOLERANCE:
        raise SingularSystem(
            "sup-inf and inf-sup disagree beyond tolerance: "
            f"{np.max(np.abs(supinf - infsup))}"
        )
    result = [float(v) for v in supinf]
    if state is not None:
        return result[state]
    return result
