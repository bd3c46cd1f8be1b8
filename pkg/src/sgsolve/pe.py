"""Partial-exploration solver: simulation-guided interval iteration.

Paths are sampled from the initial state, choosing the bound-optimal
action of the owner and weighting successors by transition probability
times bound gap.  Only visited states are expanded; unexplored frontier
states keep their a-priori bounds.  End components discovered inside the
explored region are handled by the same deflate/inflate machinery as the
complete solver, and the exit used in a deflation is remembered per
state, so that later simulations jump out of regions whose bounds already
account for their best exit instead of looping inside them.
"""

from __future__ import annotations

import random
from typing import Callable, Optional

from .bounds import BoundsVector, converged as bounds_converged
from .ecsolve import MecTracker
from .graph import mec_decompose
from .model import Distribution, GameModel, Player, build_game
from .objectives import LabelMismatch, Objective, ObjectiveKind
from .result import SolveResult

DEFAULT_MAX_PATHS = 10_000_000
REVISIT_BUDGET = 2
COMPONENT_SEARCH_PERIOD = 8

PeInstrument = Callable[[int, GameModel, "PartialState"], None]


class PartialState:
    """Mutable exploration state: per-state bounds over the full id space
    (frontier states sit at their a-priori bounds) plus the explored set."""

    def __init__(self, model: GameModel, objective: Objective):
        self.model = model
        self.objective = objective
        lo = objective.value_floor()
        hi = objective.value_ceiling()
        self.bounds = BoundsVector([lo] * model.num_states, [hi] * model.num_states)
        self.explored: set[int] = set()

    def expand(self, state: int) -> None:
        if state in self.explored:
            return
        self.explored.add(state)
        if self.objective.kind is ObjectiveKind.REACHABILITY:
            if state in self.objective.goal:
                self.bounds.lb[state] = 1.0
                self.bounds.ub[state] = 1.0
            elif state in self.objective.avoid:
                self.bounds.lb[state] = 0.0
                self.bounds.ub[state] = 0.0

    def gap(self, state: int) -> float:
        return self.bounds.ub[state] - self.bounds.lb[state]


def _swap_owners(model: GameModel) -> GameModel:
    return build_game(
        tuple(o.opponent for o in model.owners),
        model.actions,
        model.rewards,
        model.initial,
    )


def _make_absorbing(model: GameModel, states: frozenset[int]) -> GameModel:
    if not states:
        return model
    action_lists = [
        (Distribution.dirac(s),) if s in states else model.actions[s]
        for s in model.states()
    ]
    return build_game(model.owners, action_lists, model.rewards, model.initial)


def _guidance_action(model: GameModel, state: int, bounds: BoundsVector) -> int:
    """Bound-optimal action: argmax on ub for Maximizer, argmin on lb for
    Minimizer, lowest index on ties."""
    maximize = model.owner(state) is Player.MAXIMIZER
    reference = bounds.ub if maximize else bounds.lb
    best_a = 0
    best_v = None
    for a in range(model.num_actions(state)):
        v = sum(p * reference[t] for t, p in model.distribution(state, a).support)
        if best_v is None or (v > best_v if maximize else v < best_v):
            best_v = v
            best_a = a
    return best_a


def _sample_successor(
    dist: Distribution, part: PartialState, rng: random.Random
) -> int:
    weights = [p * part.gap(t) for t, p in dist.support]
    total = sum(weights)
    if total <= 0.0:
        weights = [p for _, p in dist.support]
        total = sum(weights)
    pick = rng.random() * total
    acc = 0.0
    for (t, _), w in zip(dist.support, weights):
        acc += w
        if pick <= acc:
            return t
    return dist.support[-1][0]


def sample_path(
    model: GameModel,
    part: PartialState,
    memory: dict[int, list[tuple[tuple, tuple[int, int]]]],
    rng: random.Random,
    epsilon: float,
) -> tuple[list[tuple[int, int]], bool]:
    """One guided simulation from the initial state.

    Returns the visited (state, action) pairs and whether the path was cut
    off by the revisit budget (a sign of looping inside an unresolved end
    component)."""
    path: list[tuple[int, int]] = []
    visits: dict[int, int] = {}
    looped = False
    state = model.initial
    while True:
        part.expand(state)
        visits[state] = visits.get(state, 0) + 1
        if model.is_absorbing(state):
            break
        if part.gap(state) < 2.0 * epsilon:
            break
        if visits[state] > REVISIT_BUDGET:
            looped = True
            break
        if len(path) > 50 * len(part.explored) + 100:
            break
        entries = memory.get(state)
        if entries:
            # Jump out via a recorded exit, preferring the one whose
            # successors have the most remaining uncertainty; still record
            # the current state so backpropagation keeps updating it.
            def _exit_weight(entry):
                s, a = entry[1]
                return sum(p * part.gap(t) for t, p in model.distribution(s, a).support)

            from_state, action = max(entries, key=_exit_weight)[1]
            dist = model.distribution(from_state, action)
            if from_state != state:
                path.append((state, _guidance_action(model, state, part.bounds)))
            path.append((from_state, action))
        else:
            action = _guidance_action(model, state, part.bounds)
            dist = model.distribution(state, action)
            path.append((state, action))
        state = _sample_successor(dist, part, rng)
    return path, looped


def _update_state(model: GameModel, bounds: BoundsVector, state: int) -> None:
    """Guarded Bellman update of both bounds at one state."""
    maximize = model.owner(state) is Player.MAXIMIZER
    best_u = None
    best_l = None
    for a in range(model.num_actions(state)):
        support = model.distribution(state, a).support
        u = sum(p * bounds.ub[t] for t, p in support)
        l = sum(p * bounds.lb[t] for t, p in support)
        if best_u is None:
            best_u, best_l = u, l
        elif maximize:
            best_u = max(best_u, u)
            best_l = max(best_l, l)
        else:
            best_u = min(best_u, u)
            best_l = min(best_l, l)
    if best_u < bounds.ub[state]:
        bounds.ub[state] = max(best_u, bounds.lb[state])
    if best_l > bounds.lb[state]:
        bounds.lb[state] = min(best_l, bounds.ub[state])


def _backpropagate(model: GameModel, part: PartialState, path) -> None:
    for state, _ in reversed(path):
        _update_state(model, part.bounds, state)


def _refresh_components(
    model: GameModel,
    part: PartialState,
    objective: Objective,
    trackers: list[MecTracker],
    memory: dict[int, list[tuple[tuple, tuple[int, int]]]],
    use_memory: bool,
) -> list[MecTracker]:
    """Re-run MEC search on the explored region; carry over tracker caches
    whose components persist or grew, then de-/inflate everything."""
    decomposition = mec_decompose(model, restrict_to=part.explored)
    old_by_key = {tracker.mec.key(): tracker for tracker in trackers}
    old_by_state: dict[int, MecTracker] = {}
    for tracker in trackers:
        for s in tracker.mec.states:
            old_by_state[s] = tracker
    fresh: list[MecTracker] = []
    for mec in decomposition.mecs:
        tracker = old_by_key.get(mec.key())
        if tracker is None:
            tracker = MecTracker(mec, objective)
            for s in mec.states:
                old = old_by_state.get(s)
                if old is not None:
                    tracker.absorb(old)
        fresh.append(tracker)
    for tracker in fresh:
        records = tracker.process(model, part.bounds)
        valid = tracker.candidate_keys() | {r.candidate_key for r in records}
        for s in tracker.mec.states:
            if s in memory:
                memory[s] = [e for e in memory[s] if e[0] in valid]
                if not memory[s]:
                    del memory[s]
        if use_memory:
            for record in records:
                for s in record.states:
                    entries = memory.setdefault(s, [])
                    entries[:] = [e for e in entries if e[0] != record.candidate_key]
                    entries.append((record.candidate_key, record.exit))
    # Simulations jump straight to recorded exits, so interior component
    # states do not appear on paths; sweep the explored region so exit
    # values still propagate to them.
    for _ in range(2):
        for s in sorted(part.explored, reverse=True):
            _update_state(model, part.bounds, s)
    return fresh


def solve_pe(
    model: GameModel,
    objective: Objective,
    epsilon: float = 1e-6,
    *,
    seed: int = 0,
    max_paths: int = DEFAULT_MAX_PATHS,
    use_deflate_memory: bool = True,
    instrument: Optional[PeInstrument] = None,
) -> SolveResult:
    """Simulation-guided solving to an epsilon-precise value at the
    initial state.  Deterministic for a fixed seed.

    ``use_deflate_memory`` disables the jump-to-recorded-exit fix; without
    it, simulations can keep looping inside an end component whose bounds
    are already fully deflated and the path budget runs out."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if objective.kind is ObjectiveKind.SAFETY:
        inner = solve_pe(
            _swap_owners(model),
            Objective.reachability(objective.avoid),
            epsilon,
            seed=seed,
            max_paths=max_paths,
            use_deflate_memory=use_deflate_memory,
            instrument=instrument,
        )
        return SolveResult(
            value=1.0 - inner.value,
            lower=1.0 - inner.upper,
            upper=1.0 - inner.lower,
            precision=epsilon,
            mode="pe",
            objective="safety",
            iterations=inner.iterations,
            states_explored=inner.states_explored,
            converged=inner.converged,
            bounds=None,
            state_map=inner.state_map,
            stats=dict(inner.stats, dualized=True),
        )

    work = model
    if objective.kind is ObjectiveKind.REACHABILITY:
        if not objective.goal:
            raise LabelMismatch("reachability goal must be non-empty")
        work = _make_absorbing(work, objective.goal | objective.avoid)

    rng = random.Random(seed)
    part = PartialState(work, objective)
    part.expand(work.initial)
    memory: dict[int, tuple[tuple, tuple[int, int]]] = {}
    trackers: list[MecTracker] = []
    paths = 0
    done = False
    while paths < max_paths and not done:
        paths += 1
        path, looped = sample_path(work, part, memory, rng, epsilon)
        _backpropagate(work, part, path)
        if looped or paths % COMPONENT_SEARCH_PERIOD == 0:
            trackers = _refresh_components(
                work, part, objective, trackers, memory, use_deflate_memory
            )
            _backpropagate(work, part, path)
        if instrument is not None:
            instrument(paths, work, part)
        done = bounds_converged(part.bounds, work.initial, epsilon)

    bounds = part.bounds
    return SolveResult(
        value=0.5 * (bounds.lb[work.initial] + bounds.ub[work.initial]),
        lower=bounds.lb[work.initial],
        upper=bounds.ub[work.initial],
        precision=epsilon,
        mode="pe",
        objective=objective.kind.value,
        iterations=paths,
        states_explored=len(part.explored),
        converged=done,
        bounds=bounds,
        state_map=tuple(range(model.num_states)),
        stats={"seed": seed},
    )
