"""Lower/upper bound vectors and the Bellman operator."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .model import GameModel, Player


@dataclass
class BoundsVector:
    """Per-state lower and upper bounds on the game value.

    The solvers only ever tighten these: lb is non-decreasing, ub
    non-increasing, and lb <= ub throughout.
    """

    lb: list[float]
    ub: list[float]

    def gap(self, state: int) -> float:
        return self.ub[state] - self.lb[state]

    def copy(self) -> "BoundsVector":
        return BoundsVector(list(self.lb), list(self.ub))

    def __len__(self) -> int:
        return len(self.lb)


@dataclass(frozen=True)
class Strategy:
    """Memoryless deterministic choice for one player."""

    player: Player
    choice: tuple[Optional[int], ...]  # None on the other player's states


def state_update(model: GameModel, x: Sequence[float], state: int) -> float:
    """One Bellman step at a single state: optimal one-step expectation."""
    best = None
    maximize = model.owner(state) is Player.MAXIMIZER
    for dist in model.actions[state]:
        value = sum(p * x[t] for t, p in dist.support)
        if best is None or (value > best if maximize else value < best):
            best = value
    assert best is not None
    return best


def bellman(
    model: GameModel,
    x: Sequence[float],
    scope: Optional[Iterable[int]] = None,
) -> list[float]:
    """Apply the Bellman update on ``scope`` (default: all states).

    States outside the scope keep their current estimate.  If ``x`` is a
    correct lower (upper) bound on the value, so is the result.
    """
    result = list(x)
    states = model.states() if scope is None else scope
    for s in states:
        result[s] = state_update(model, x, s)
    return result


def optimal_actions(
    model: GameModel,
    x: Sequence[float],
    state: int,
    tolerance: float = 0.0,
) -> tuple[int, ...]:
    """All actions attaining the Bellman optimum at ``state`` under ``x``
    up to ``tolerance``, in ascending index order.

    A positive tolerance keeps near-ties: while the bounds are still far
    from the value, differences much smaller than the remaining gap are
    numerical noise and must not be allowed to exclude actions."""
    maximize = model.owner(state) is Player.MAXIMIZER
    values = [
        sum(p * x[t] for t, p in dist.support) for dist in model.actions[state]
    ]
    best = max(values) if maximize else min(values)
    return tuple(
        a for a, v in enumerate(values) if abs(v - best) <= tolerance
    )


def extract_strategy(model: GameModel, bounds: BoundsVector, player: Player) -> Strategy:
    """Witness strategy: argmax on lb for Maximizer, argmin on ub for
    Minimizer; ties broken by lowest action index."""
    reference = bounds.lb if player is Player.MAXIMIZER else bounds.ub
    choice: list[Optional[int]] = []
    for s in model.states():
        if model.owner(s) is player:
            choice.append(optimal_actions(model, reference, s)[0])
        else:
            choice.append(None)
    return Strategy(player, tuple(choice))


def converged(bounds: BoundsVector, state: int, epsilon: float) -> bool:
    """Whether the midpoint of the bounds is an epsilon-precise value."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return bounds.ub[state] - bounds.lb[state] < 2.0 * epsilon


def midpoint(bounds: BoundsVector, state: int) -> float:
    return 0.5 * (bounds.lb[state] + bounds.ub[state])
