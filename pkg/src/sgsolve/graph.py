"""Qualitative and structural analysis of game graphs.

SCC decomposition, maximal end components, sure attractors and the
value-0 / value-1 sets for reachability.  All algorithms are iterative;
generated models can have paths far deeper than the interpreter stack.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .model import Distribution, GameModel, Player

ActionFilter = Callable[[int], Iterable[int]]


@dataclass(frozen=True)
class EndComponent:
    """A state set closed under the listed actions and strongly connected
    through them."""

    states: frozenset[int]
    actions: tuple[tuple[int, tuple[int, ...]], ...]  # (state, action indices)

    def action_map(self) -> dict[int, tuple[int, ...]]:
        return dict(self.actions)

    def key(self) -> tuple:
        return (self.states, self.actions)

    @staticmethod
    def of(states: Iterable[int], actions: dict[int, Sequence[int]]) -> "EndComponent":
        return EndComponent(
            frozenset(states),
            tuple(sorted((s, tuple(sorted(a))) for s, a in actions.items())),
        )


@dataclass(frozen=True)
class MecDecomposition:
    mecs: tuple[EndComponent, ...]
    membership: tuple[Optional[int], ...]  # state -> MEC index or None


def _edges(
    model: GameModel,
    state: int,
    restrict: Optional[frozenset[int]],
    allowed: Optional[ActionFilter],
) -> set[int]:
    actions = range(model.num_actions(state)) if allowed is None else allowed(state)
    out: set[int] = set()
    for a in actions:
        for t, _ in model.distribution(state, a).support:
            if restrict is None or t in restrict:
                out.add(t)
    return out


def scc_decompose(
    model: GameModel,
    restrict_to: Optional[Iterable[int]] = None,
    allowed_actions: Optional[ActionFilter] = None,
) -> list[list[int]]:
    """Tarjan's algorithm, iterative.  Returns SCCs in reverse topological
    order (components without outgoing edges first)."""
    restrict = None if restrict_to is None else frozenset(restrict_to)
    vertices = sorted(restrict) if restrict is not None else list(model.states())

    index: dict[int, int] = {}
    lowlink: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    sccs: list[list[int]] = []
    counter = 0

    for root in vertices:
        if root in index:
            continue
        # Each work item is (vertex, iterator over its successors).
        work: list[tuple[int, Iterable[int]]] = []
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work.append((root, iter(sorted(_edges(model, root, restrict, allowed_actions)))))
        while work:
            v, successors = work[-1]
            advanced = False
            for w in successors:
                if restrict is not None and w not in restrict:
                    continue
                if w not in index:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append(
                        (w, iter(sorted(_edges(model, w, restrict, allowed_actions))))
                    )
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                component: list[int] = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    component.append(w)
                    if w == v:
                        break
                sccs.append(sorted(component))
    return sccs


def mec_decompose(
    model: GameModel,
    restrict_to: Optional[Iterable[int]] = None,
    allowed_actions: Optional[ActionFilter] = None,
) -> MecDecomposition:
    """Maximal end components by iterative SCC refinement.

    Actions whose support leaves the candidate region are pruned; states
    left without actions are dropped, and the process repeats until
    stable.  ``restrict_to`` prunes actions leaving the given set rather
    than treating them as errors.
    """
    if restrict_to is not None:
        base = frozenset(restrict_to)
    else:
        base = frozenset(model.states())

    def initial_actions(state: int) -> tuple[int, ...]:
        if allowed_actions is None:
            return tuple(range(model.num_actions(state)))
        return tuple(allowed_actions(state))

    mecs: list[EndComponent] = []
    worklist: list[dict[int, tuple[int, ...]]] = [
        {s: initial_actions(s) for s in sorted(base)}
    ]
    while worklist:
        candidate = worklist.pop()
        states = frozenset(candidate)
        # Keep only actions fully inside the candidate.
        pruned: dict[int, tuple[int, ...]] = {}
        changed = False
        for s, acts in candidate.items():
            kept = tuple(
                a
                for a in acts
                if all(t in states for t, _ in model.distribution(s, a).support)
            )
            if kept != acts:
                changed = True
            if kept:
                pruned[s] = kept
            else:
                changed = True
        if not pruned:
            continue
        allowed = {s: set(a) for s, a in pruned.items()}
        components = scc_decompose(
            model,
            restrict_to=pruned.keys(),
            allowed_actions=lambda s: allowed[s],
        )
        if not changed and len(components) == 1 and len(components[0]) == len(candidate):
            comp = components[0]
            if len(comp) > 1 or _has_internal_action(model, comp[0], pruned[comp[0]]):
                mecs.append(EndComponent.of(comp, {s: pruned[s] for s in comp}))
            continue
        for comp in components:
            comp_set = set(comp)
            sub = {s: pruned[s] for s in comp if s in pruned}
            if sub:
                worklist.append(sub)
        # Singleton components without a self-loop action would be pushed
        # forever; they are filtered by the pruning step above (their
        # actions leave the singleton), so the loop terminates.
    mecs.sort(key=lambda ec: min(ec.states))
    membership: list[Optional[int]] = [None] * model.num_states
    for i, ec in enumerate(mecs):
        for s in ec.states:
            membership[s] = i
    return MecDecomposition(tuple(mecs), tuple(membership))


def _has_internal_action(model: GameModel, state: int, actions: Sequence[int]) -> bool:
    return any(
        all(t == state for t, _ in model.distribution(state, a).support)
        for a in actions
    )


def attractor(
    model: GameModel,
    target: Iterable[int],
    player: Optional[Player] = None,
) -> frozenset[int]:
    """Backward closure of states that surely reach ``target``.

    With ``player`` set, that player picks actions (one action whose full
    support already lies in the attractor suffices) while the opponent is
    universally quantified; with ``player`` None ("sure" mode) all actions
    of every state must lead into the attractor.  Probabilistic branching
    is treated as universal: the entire support must be inside.
    """
    target = set(target)
    if not target:
        raise ValueError("attractor target must be non-empty")
    inside = set(target)
    changed = True
    while changed:
        changed = False
        for s in model.states():
            if s in inside:
                continue
            dists = model.actions[s]
            sure = [all(t in inside for t, _ in d.support) for d in dists]
            if player is not None and model.owner(s) is player:
                ok = any(sure)
            else:
                ok = all(sure)
            if ok:
                inside.add(s)
                changed = True
    return frozenset(inside)


def _positive_reach(model: GameModel, goal: set[int]) -> set[int]:
    """States from which Maximizer can reach ``goal`` with positive
    probability against every Minimizer strategy."""
    reach = set(goal)
    changed = True
    while changed:
        changed = False
        for s in model.states():
            if s in reach:
                continue
            hits = [
                any(t in reach for t, _ in d.support) for d in model.actions[s]
            ]
            if model.owner(s) is Player.MAXIMIZER:
                ok = any(hits)
            else:
                ok = all(hits)
            if ok:
                reach.add(s)
                changed = True
    return reach


def _almost_sure_reach(model: GameModel, goal: set[int]) -> set[int]:
    """States from which Maximizer can force reaching ``goal`` with
    probability 1.  Standard two-nested fixpoint: the outer set shrinks to
    the region Maximizer never has to leave, the inner set grows from the
    goal through actions that stay in the outer set and make progress."""
    outer = set(model.states())
    while True:
        inner = set(g for g in goal if g in outer)
        grown = True
        while grown:
            grown = False
            for s in sorted(outer):
                if s in inner:
                    continue
                good = [
                    all(t in outer for t, _ in d.support)
                    and any(t in inner for t, _ in d.support)
                    for d in model.actions[s]
                ]
                if model.owner(s) is Player.MAXIMIZER:
                    ok = any(good)
                else:
                    ok = all(good)
                if ok:
                    inner.add(s)
                    grown = True
        if inner == outer:
            return inner
        outer = inner


def qualitative_reach(
    model: GameModel,
    goal: Iterable[int],
    unsafe: Iterable[int] = (),
) -> tuple[frozenset[int], frozenset[int]]:
    """Graph-based value-1 and value-0 sets for Maximizer reachability.

    Returns (value1, value0).  Unsafe states are excluded from both the
    goal and every value-1 witness (they are assumed absorbing or are
    removed from play by the caller's remapping).
    """
    goal = set(goal)
    unsafe = set(unsafe)
    goal -= unsafe
    if not goal:
        return frozenset(), frozenset(model.states()) - frozenset(goal)
    positive = _positive_reach(model, goal) - unsafe
    value0 = frozenset(model.states()) - frozenset(positive)
    value1 = frozenset(_almost_sure_reach(model, goal) - unsafe)
    return value1, value0


def controlled_ec(model: GameModel, ec: EndComponent) -> Optional[Player]:
    """The player controlling the EC, if the other player has no choice.

    Returns the player P when every state of P's opponent inside the EC
    has exactly one available action.  In an EC where nobody has a choice
    the owner of the smallest state is reported.
    """
    max_trivial = all(
        model.num_actions(s) == 1
        for s in ec.states
        if model.owner(s) is Player.MAXIMIZER
    )
    min_trivial = all(
        model.num_actions(s) == 1
        for s in ec.states
        if model.owner(s) is Player.MINIMIZER
    )
    if max_trivial and min_trivial:
        return model.owner(min(ec.states))
    if min_trivial:
        return Player.MAXIMIZER
    if max_trivial:
        return Player.MINIMIZER
    return None
