"""Objective definitions, bound initialization and the reduction of
reachability to mean payoff."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from . import graph
from .bounds import BoundsVector
from .model import Distribution, GameModel, build_game


class LabelMismatch(Exception):
    pass


class ObjectiveKind(Enum):
    REACHABILITY = "reachability"
    SAFETY = "safety"
    MEAN_PAYOFF = "mean-payoff"


@dataclass(frozen=True)
class Objective:
    """What the players compete over.

    Reachability carries a goal set and an optional avoid set; safety an
    unsafe set (solved internally as reachability of the unsafe set by
    the swapped players, value = 1 - reach value); mean payoff carries
    the minimum and maximum reward occurring in the model, which double
    as the a-priori value bounds.
    """

    kind: ObjectiveKind
    goal: frozenset[int] = frozenset()
    avoid: frozenset[int] = frozenset()
    rmin: float = 0.0
    rmax: float = 1.0

    @staticmethod
    def reachability(goal: Iterable[int], avoid: Iterable[int] = ()) -> "Objective":
        goal = frozenset(goal)
        avoid = frozenset(avoid)
        if goal & avoid:
            raise LabelMismatch("goal and avoid sets overlap")
        return Objective(ObjectiveKind.REACHABILITY, goal=goal, avoid=avoid)

    @staticmethod
    def safety(unsafe: Iterable[int]) -> "Objective":
        return Objective(ObjectiveKind.SAFETY, avoid=frozenset(unsafe))

    @staticmethod
    def mean_payoff(model: GameModel) -> "Objective":
        rmin, rmax = model.reward_range()
        return Objective(ObjectiveKind.MEAN_PAYOFF, rmin=rmin, rmax=rmax)

    @property
    def is_mean_payoff(self) -> bool:
        return self.kind is ObjectiveKind.MEAN_PAYOFF

    def value_floor(self) -> float:
        return 0.0 if not self.is_mean_payoff else self.rmin

    def value_ceiling(self) -> float:
        return 1.0 if not self.is_mean_payoff else self.rmax


def _check_labels(model: GameModel, states: frozenset[int]) -> None:
    for s in states:
        if not 0 <= s < model.num_states:
            raise LabelMismatch(f"label refers to unknown state {s}")


def init_bounds(
    model: GameModel,
    objective: Objective,
    qualitative: bool = True,
) -> BoundsVector:
    """Safe initial under- and over-approximation of the value.

    Reachability starts at [0, 1] with goal states pinned to 1; when
    qualitative precomputation is enabled, states that cannot reach the
    goal at all get their upper bound pinned to 0.  Mean payoff starts at
    [rmin, rmax].
    """
    n = model.num_states
    if objective.kind is ObjectiveKind.MEAN_PAYOFF:
        return BoundsVector([objective.rmin] * n, [objective.rmax] * n)
    if objective.kind is ObjectiveKind.SAFETY:
        raise LabelMismatch("safety bounds are initialized on the dualized model")
    _check_labels(model, objective.goal)
    _check_labels(model, objective.avoid)
    bounds = BoundsVector([0.0] * n, [1.0] * n)
    for g in objective.goal:
        bounds.lb[g] = 1.0
    for a in objective.avoid:
        bounds.ub[a] = 0.0
    if qualitative and objective.goal:
        value1, value0 = graph.qualitative_reach(model, objective.goal, objective.avoid)
        for s in value0:
            bounds.ub[s] = 0.0
        for s in value1:
            bounds.lb[s] = 1.0
    return bounds


def reach_as_meanpayoff(
    model: GameModel,
    goal: Iterable[int],
) -> tuple[GameModel, Objective]:
    """Turn a reachability query into an equivalent mean-payoff one.

    Goal states become absorbing with reward 1 and every other state gets
    reward 0; the mean payoff of the result equals the reachability value
    of the original model.
    """
    goal = frozenset(goal)
    if not goal:
        raise LabelMismatch("goal must be non-empty")
    _check_labels(model, goal)
    action_lists = []
    rewards = []
    for s in model.states():
        if s in goal:
            action_lists.append((Distribution.dirac(s),))
            rewards.append(1.0)
        else:
            action_lists.append(model.actions[s])
            rewards.append(0.0)
    transformed = build_game(model.owners, action_lists, rewards, model.initial)
    return transformed, Objective.mean_payoff(transformed)
