"""Complete-exploration solver: Gauss-Seidel interval iteration over the
whole game, with qualitative precomputation, controlled-EC collapsing and
deflate/inflate handling of end components."""

from __future__ import annotations

from typing import Callable, Optional

from .bounds import BoundsVector, converged, midpoint, state_update
from .ecsolve import MecTracker
from .graph import controlled_ec, mec_decompose, qualitative_reach
from .model import Distribution, GameModel, build_game, collapse
from .objectives import LabelMismatch, Objective, ObjectiveKind
from .result import SolveResult

Instrument = Callable[[int, GameModel, BoundsVector], None]

DEFAULT_MAX_SWEEPS = 10_000_000


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


def _merge_bounds(bounds: BoundsVector, cmap, new_n: int) -> BoundsVector:
    lb = [float("-inf")] * new_n
    ub = [float("inf")] * new_n
    for old in range(len(bounds)):
        new = cmap(old)
        lb[new] = max(lb[new], bounds.lb[old])
        ub[new] = min(ub[new], bounds.ub[old])
    for s in range(new_n):
        if lb[s] > ub[s]:
            mid = 0.5 * (lb[s] + ub[s])
            lb[s] = ub[s] = mid
    return BoundsVector(lb, ub)


def _collapse_controlled(
    model: GameModel,
    objective: Objective,
    protected: frozenset[int],
) -> tuple[GameModel, Optional[object]]:
    """Merge controlled ECs (ECs in which the non-controlling player has
    no choice anywhere) into single representatives.

    For mean payoff only uniform-reward ECs qualify; the representative
    keeps an explicit self-loop so staying remains an option with the
    member reward.  For reachability only Maximizer-controlled ECs
    disjoint from goal and avoid are merged (Minimizer-controlled ones
    without the goal are part of the value-0 region handled elsewhere)."""
    decomposition = mec_decompose(model)
    sets, exits_list, owners, rewards, stays = [], [], [], [], set()
    for mec in decomposition.mecs:
        if len(mec.states) < 2 or mec.states & protected:
            continue
        controller = _collapsible_controller(model, mec, objective)
        if controller is None:
            continue
        exits = [
            (s, a)
            for s in sorted(mec.states)
            for a in range(model.num_actions(s))
            if model.owner(s) is controller
            and any(t not in mec.states for t, _ in model.distribution(s, a).support)
        ]
        idx = len(sets)
        sets.append(mec.states)
        exits_list.append(exits)
        owners.append(controller)
        if objective.is_mean_payoff:
            rewards.append(model.rewards[min(mec.states)])
            stays.add(idx)
        else:
            rewards.append(None)
            stays.add(idx)  # staying is a real (value 0) option
    if not sets:
        return model, None
    collapsed, cmap = collapse(
        model, sets, exits_list,
        rep_owners=owners, rep_rewards=rewards, stay_loops=stays,
    )
    return collapsed, cmap


def _collapsible_controller(model, mec, objective):
    from .model import Player

    controller = controlled_ec(model, mec)
    if controller is None:
        return None
    if objective.is_mean_payoff:
        member_rewards = {model.rewards[s] for s in mec.states}
        if len(member_rewards) != 1:
            return None
        return controller
    if controller is Player.MAXIMIZER:
        return controller
    return None


def solve_ce(
    model: GameModel,
    objective: Objective,
    epsilon: float = 1e-6,
    *,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
    enable_deflation: bool = True,
    enable_collapse: bool = True,
    qualitative: bool = True,
    initial_bounds: Optional[BoundsVector] = None,
    instrument: Optional[Instrument] = None,
) -> SolveResult:
    """Solve the whole game to an epsilon-precise value at the initial
    state.  Returns certified bounds even when the sweep budget runs out
    (``converged`` is False then).

    ``initial_bounds`` overrides the default initialization (given in the
    original state numbering and required to be sound); ``enable_deflation``
    and ``enable_collapse`` exist to study the untreated fixpoint behaviour
    and disable end-component handling."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if objective.kind is ObjectiveKind.SAFETY:
        inner = solve_ce(
            _swap_owners(model),
            Objective.reachability(objective.avoid),
            epsilon,
            max_sweeps=max_sweeps,
            enable_deflation=enable_deflation,
            enable_collapse=enable_collapse,
            qualitative=qualitative,
            initial_bounds=initial_bounds,
            instrument=instrument,
        )
        flipped = None
        if inner.bounds is not None:
            flipped = BoundsVector(
                [1.0 - u for u in inner.bounds.ub],
                [1.0 - l for l in inner.bounds.lb],
            )
        return SolveResult(
            value=1.0 - inner.value,
            lower=1.0 - inner.upper,
            upper=1.0 - inner.lower,
            precision=epsilon,
            mode="ce",
            objective="safety",
            iterations=inner.iterations,
            states_explored=inner.states_explored,
            converged=inner.converged,
            bounds=flipped,
            state_map=inner.state_map,
            stats=dict(inner.stats, dualized=True),
        )

    work = model
    mapping = list(range(model.num_states))
    is_reach = objective.kind is ObjectiveKind.REACHABILITY
    pinned_one: frozenset[int] = frozenset()
    pinned_zero: frozenset[int] = frozenset()

    if is_reach:
        if not objective.goal:
            raise LabelMismatch("reachability goal must be non-empty")
        work = _make_absorbing(work, objective.goal | objective.avoid)
        if qualitative:
            pinned_one, pinned_zero = qualitative_reach(
                work, objective.goal, objective.avoid
            )
        else:
            pinned_one = objective.goal
            pinned_zero = objective.avoid

    if initial_bounds is not None:
        bounds = initial_bounds.copy()
    elif is_reach:
        bounds = BoundsVector([0.0] * work.num_states, [1.0] * work.num_states)
        for s in pinned_one:
            bounds.lb[s] = 1.0
        for s in pinned_zero:
            bounds.ub[s] = 0.0
    else:
        bounds = BoundsVector(
            [objective.rmin] * work.num_states,
            [objective.rmax] * work.num_states,
        )

    if enable_collapse and is_reach:
        sets, exits = [], []
        if len(pinned_one) > 1:
            sets.append(pinned_one)
            exits.append([])
        if len(pinned_zero) > 1:
            sets.append(pinned_zero)
            exits.append([])
        if sets:
            work, cmap = collapse(work, sets, exits)
            mapping = [cmap(m) for m in mapping]
            pinned_one = frozenset(cmap(s) for s in pinned_one)
            pinned_zero = frozenset(cmap(s) for s in pinned_zero)
            bounds = _merge_bounds(bounds, cmap, work.num_states)

    if enable_collapse:
        protected = pinned_one | pinned_zero
        work2, cmap = _collapse_controlled(work, objective, protected)
        if cmap is not None:
            work = work2
            mapping = [cmap(m) for m in mapping]
            pinned_one = frozenset(cmap(s) for s in pinned_one)
            pinned_zero = frozenset(cmap(s) for s in pinned_zero)
            bounds = _merge_bounds(bounds, cmap, work.num_states)

    if is_reach:
        working_objective = Objective(
            ObjectiveKind.REACHABILITY, goal=pinned_one, avoid=pinned_zero
        )
    else:
        working_objective = objective

    trackers: list[MecTracker] = []
    if enable_deflation:
        decomposition = mec_decompose(work)
        trackers = [MecTracker(mec, working_objective) for mec in decomposition.mecs]

    start = mapping[model.initial]
    done = False
    sweeps = 0
    while sweeps < max_sweeps and not done:
        sweeps += 1
        for s in work.states():
            if bounds.ub[s] - bounds.lb[s] <= epsilon:
                continue
            up = state_update(work, bounds.ub, s)
            if up < bounds.ub[s]:
                bounds.ub[s] = max(up, bounds.lb[s])
            lo = state_update(work, bounds.lb, s)
            if lo > bounds.lb[s]:
                bounds.lb[s] = min(lo, bounds.ub[s])
        if enable_deflation:
            for tracker in trackers:
                if all(
                    bounds.ub[s] - bounds.lb[s] <= epsilon
                    for s in tracker.mec.states
                ):
                    continue
                tracker.process(work, bounds)
        if instrument is not None:
            instrument(sweeps, work, bounds)
        done = converged(bounds, start, epsilon)

    return SolveResult(
        value=midpoint(bounds, start),
        lower=bounds.lb[start],
        upper=bounds.ub[start],
        precision=epsilon,
        mode="ce",
        objective=objective.kind.value,
        iterations=sweeps,
        states_explored=model.num_states,
        converged=done,
        bounds=bounds,
        state_map=tuple(mapping),
        stats={"working_states": work.num_states},
    )
