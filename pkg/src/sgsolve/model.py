"""Immutable sparse representation of turn-based stochastic games.

States are dense integer ids.  Every state is owned by one of the two
players, carries a real-valued reward and a non-empty list of actions,
each of which is a probability distribution over successor states.
Models are immutable after construction; structural transformations
(collapsing state sets, fixing a player's strategy) produce fresh models
together with a remap table.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence

PROBABILITY_SUM_TOLERANCE = 1e-12


class Player(Enum):
    MAXIMIZER = "max"
    MINIMIZER = "min"

    @property
    def opponent(self) -> "Player":
        return Player.MINIMIZER if self is Player.MAXIMIZER else Player.MAXIMIZER


class ModelError(Exception):
    """Base class for structural model errors."""


class EmptyActionSet(ModelError):
    def __init__(self, state: int):
        super().__init__(f"state {state} has no actions")
        self.state = state


class DistributionSumError(ModelError):
    def __init__(self, state: int, action: int, total: float):
        super().__init__(
            f"distribution of state {state}, action {action} sums to {total!r}"
        )
        self.state = state
        self.action = action
        self.total = total


class DanglingTarget(ModelError):
    def __init__(self, state: int, action: int, target: int):
        super().__init__(
            f"state {state}, action {action} targets unknown state {target}"
        )
        self.state = state
        self.action = action
        self.target = target


class OverlappingSets(ModelError):
    pass


class ForeignAction(ModelError):
    def __init__(self, state: int, action: int):
        super().__init__(f"action ({state}, {action}) does not originate in its set")
        self.state = state
        self.action = action


class MissingChoice(ModelError):
    def __init__(self, state: int):
        super().__init__(f"no choice given for fixed-player state {state}")
        self.state = state


@dataclass(frozen=True)
class Distribution:
    """Sparse probability distribution over successor states.

    Support entries are (state, probability) pairs with distinct states,
    sorted by state id.  Probabilities are strictly positive and sum to 1
    within PROBABILITY_SUM_TOLERANCE.
    """

    support: tuple[tuple[int, float], ...]

    @staticmethod
    def of(pairs: Iterable[tuple[int, float]] | Mapping[int, float]) -> "Distribution":
        if isinstance(pairs, Mapping):
            items = pairs.items()
        else:
            items = pairs
        merged: dict[int, float] = {}
        for target, prob in items:
            if prob == 0.0:
                continue
            merged[target] = merged.get(target, 0.0) + prob
        return Distribution(tuple(sorted(merged.items())))

    @staticmethod
    def dirac(target: int) -> "Distribution":
        return Distribution(((target, 1.0),))

    def targets(self) -> tuple[int, ...]:
        return tuple(t for t, _ in self.support)

    def probability(self, target: int) -> float:
        for t, p in self.support:
            if t == target:
                return p
        return 0.0

    def total(self) -> float:
        return sum(p for _, p in self.support)

    def is_self_loop(self, state: int) -> bool:
        return self.support == ((state, 1.0),)

    def expectation(self, values: Sequence[float]) -> float:
        return sum(p * values[t] for t, p in self.support)


@dataclass(frozen=True)
class CollapseMap:
    """Maps state ids of the pre-collapse model onto the collapsed one."""

    representative: tuple[int, ...]
    collapsed_sets: tuple[frozenset[int], ...]

    def __call__(self, state: int) -> int:
        return self.representative[state]


@dataclass(frozen=True)
class GameModel:
    owners: tuple[Player, ...]
    actions: tuple[tuple[Distribution, ...], ...]
    rewards: tuple[float, ...]
    initial: int
    predecessors: tuple[frozenset[tuple[int, int]], ...] = field(repr=False)

    @property
    def num_states(self) -> int:
        return len(self.owners)

    def states(self) -> range:
        return range(self.num_states)

    def owner(self, state: int) -> Player:
        return self.owners[state]

    def num_actions(self, state: int) -> int:
        return len(self.actions[state])

    def distribution(self, state: int, action: int) -> Distribution:
        return self.actions[state][action]

    def is_absorbing(self, state: int) -> bool:
        return all(d.is_self_loop(state) for d in self.actions[state])

    def reward_range(self) -> tuple[float, float]:
        return min(self.rewards), max(self.rewards)

    def num_transitions(self) -> int:
        return sum(
            len(d.support) for dists in self.actions for d in dists
        )


def _compute_predecessors(
    action_lists: Sequence[Sequence[Distribution]],
) -> tuple[frozenset[tuple[int, int]], ...]:
    preds: list[set[tuple[int, int]]] = [set() for _ in action_lists]
    for state, dists in enumerate(action_lists):
        for action, dist in enumerate(dists):
            for target, _ in dist.support:
                preds[target].add((state, action))
    return tuple(frozenset(p) for p in preds)


def build_game(
    owners: Sequence[Player],
    action_lists: Sequence[Sequence[Distribution]],
    rewards: Sequence[float],
    initial: int,
) -> GameModel:
    """Validate the raw ingredients and assemble a GameModel.

    Raises EmptyActionSet, DistributionSumError or DanglingTarget on the
    first violation encountered.
    """
    n = len(owners)
    if not (n >= 1 and len(action_lists) == n and len(rewards) == n):
        raise ModelError("owners, action lists and rewards must have equal length >= 1")
    if not 0 <= initial < n:
        raise ModelError(f"initial state {initial} out of range")
    for state, dists in enumerate(action_lists):
        if len(dists) == 0:
            raise EmptyActionSet(state)
        for action, dist in enumerate(dists):
            total = dist.total()
            if abs(total - 1.0) > PROBABILITY_SUM_TOLERANCE:
                raise DistributionSumError(state, action, total)
            last = -1
            for target, prob in dist.support:
                if not 0 <= target < n:
                    raise DanglingTarget(state, action, target)
                if target <= last:
                    raise ModelError(
                        f"distribution of state {state}, action {action} "
                        "has unsorted or duplicate targets"
                    )
                if prob <= 0.0:
                    raise ModelError(
                        f"non-positive probability at state {state}, action {action}"
                    )
                last = target
    return GameModel(
        owners=tuple(owners),
        actions=tuple(tuple(dists) for dists in action_lists),
        rewards=tuple(float(r) for r in rewards),
        initial=initial,
        predecessors=_compute_predecessors(action_lists),
    )


def collapse(
    model: GameModel,
    sets: Sequence[Iterable[int]],
    exit_actions: Sequence[Sequence[tuple[int, int]]],
    *,
    rep_owners: Optional[Sequence[Optional[Player]]] = None,
    rep_rewards: Optional[Sequence[Optional[float]]] = None,
    stay_loops: Iterable[int] = (),
) -> tuple[GameModel, CollapseMap]:
    """Merge each given state set into a single representative state.

    For every set, the retained exit actions are carried over to the
    representative with their in-set probability mass redirected onto the
    representative itself.  An exit action that becomes a pure self-loop
    is dropped unless it is the only retained action.  A set with an
    empty exit list is made absorbing via a fresh self-loop.  Set indices
    listed in ``stay_loops`` get an extra self-loop action in addition to
    their exits (used when remaining in the merged region is a real
    option with a well-defined value).

    Returns the new model and the old-to-new state remap.
    """
    frozen_sets = [frozenset(s) for s in sets]
    if len(frozen_sets) != len(exit_actions):
        raise ModelError("sets and exit_actions must align")
    seen: set[int] = set()
    for s in frozen_sets:
        if s & seen:
            raise OverlappingSets(f"state sets overlap on {sorted(s & seen)}")
        seen |= s
    for set_idx, (members, exits) in enumerate(zip(frozen_sets, exit_actions)):
        for state, action in exits:
            if state not in members:
                raise ForeignAction(state, action)
            if not 0 <= action < model.num_actions(state):
                raise ForeignAction(state, action)

    stay_loops = set(stay_loops)
    set_of_state: dict[int, int] = {}
    for idx, members in enumerate(frozen_sets):
        for state in members:
            set_of_state[state] = idx

    # New ids: untouched states keep relative order; each set is placed at
    # the position of its smallest member.
    anchor: dict[int, int] = {min(m): i for i, m in enumerate(frozen_sets)}
    new_id: list[int] = [-1] * model.num_states
    order: list[tuple[str, int]] = []
    for state in model.states():
        if state in set_of_state:
            if state in anchor:
                order.append(("set", anchor[state]))
        else:
            order.append(("state", state))
    rep_of_set: dict[int, int] = {}
    for pos, (kind, ref) in enumerate(order):
        if kind == "state":
            new_id[ref] = pos
        else:
            rep_of_set[ref] = pos
    for state, idx in set_of_state.items():
        new_id[state] = rep_of_set[idx]

    def remap(dist: Distribution) -> Distribution:
        return Distribution.of((new_id[t], p) for t, p in dist.support)

    owners: list[Player] = []
    action_lists: list[list[Distribution]] = []
    rewards: list[float] = []
    for pos, (kind, ref) in enumerate(order):
        if kind == "state":
            owners.append(model.owner(ref))
            rewards.append(model.rewards[ref])
            action_lists.append([remap(d) for d in model.actions[ref]])
            continue
        members = frozen_sets[ref]
        first = min(members)
        owner = None
        if rep_owners is not None:
            owner = rep_owners[ref]
        owners.append(owner if owner is not None else model.owner(first))
        reward = None
        if rep_rewards is not None:
            reward = rep_rewards[ref]
        rewards.append(reward if reward is not None else model.rewards[first])
        retained: list[Distribution] = []
        for state, action in exit_actions[ref]:
            mapped = remap(model.distribution(state, action))
            if mapped.is_self_loop(pos) and len(exit_actions[ref]) > 1:
                continue
            retained.append(mapped)
        if not retained or ref in stay_loops:
            retained.append(Distribution.dirac(pos))
        action_lists.append(retained)

    collapsed = build_game(owners, action_lists, rewards, new_id[model.initial])
    return collapsed, CollapseMap(tuple(new_id), tuple(frozen_sets))


def induced_mdp(
    model: GameModel,
    fixed: Player,
    strategy: Mapping[int, int],
) -> GameModel:
    """Restrict the fixed player to the given strategy.

    States of the fixed player keep only their chosen action; all other
    states are unchanged.  Ownership is preserved for bookkeeping.
    """
    action_lists: list[Sequence[Distribution]] = []
    for state in model.states():
        if model.owner(state) is fixed:
            if state not in strategy:
                raise MissingChoice(state)
            choice = strategy[state]
            if not 0 <= choice < model.num_actions(state):
                raise MissingChoice(state)
            action_lists.append((model.distribution(state, choice),))
        else:
            action_lists.append(model.actions[state])
    return build_game(model.owners, action_lists, model.rewards, model.initial)
