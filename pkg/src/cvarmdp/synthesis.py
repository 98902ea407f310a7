"""Witness strategy construction from LP flows, and exact strategy evaluation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Set, Tuple

from . import lp as lpmod
from .chain import PayoffLaw, check_constraints, payoff_law_mean, payoff_law_reach
from .graphs import QuotientMap
from .model import (
    Constraint,
    Mdp,
    ModelError,
    Query,
    State,
    StrategySpec,
    UnsupportedQueryError,
    induced_chain,
    memoryless,
    normalized,
)

ZERO = Fraction(0)
ONE = Fraction(1)

SEARCH = "search"
REMAIN = "remain"


@dataclass
class FlowSolution:
    """LP flow values: transient action masses, recurrent/switch state masses,
    and (for mean payoff) recurrent action frequencies."""

    y: Dict[str, Fraction] = field(default_factory=dict)
    x: Dict[State, Fraction] = field(default_factory=dict)
    x_a: Dict[str, Fraction] = field(default_factory=dict)


def _least_action(mdp: Mdp, s: State) -> str:
    return sorted(mdp.available[s])[0]


def _proportional(masses: Mapping[str, Fraction]) -> Optional[Dict[str, Fraction]]:
    total = sum(masses.values(), ZERO)
    if total == 0:
        return None
    return {a: m / total for a, m in masses.items() if m != 0}


def strategy_from_reach_flow(mdp_clean: Mdp, flow: FlowSolution) -> StrategySpec:
    """Memoryless strategy playing each action proportionally to its flow.

    States with zero total flow are unreachable under the strategy and get a
    fixed deterministic choice for reproducibility.
    """
    choices: Dict[State, Dict[str, Fraction]] = {}
    for s in mdp_clean.states:
        masses = {a: flow.y.get(a, ZERO) for a in mdp_clean.available[s]}
        dist = _proportional(masses)
        choices[s] = dist if dist is not None else {_least_action(mdp_clean, s): ONE}
    return memoryless(choices)


def _mec_graph(mdp: Mdp, members: frozenset, actions: frozenset) -> Dict[State, List[Tuple[str, State]]]:
    out: Dict[State, List[Tuple[str, State]]] = {s: [] for s in members}
    for s in members:
        for a in mdp.available[s]:
            if a in actions:
                for t, p in mdp.delta[a].items():
                    if p != 0:
                        out[s].append((a, t))
    return out


def _routing(mdp: Mdp, members: frozenset, actions: frozenset, goal: Set[State]) -> Dict[State, str]:
    """For each member outside ``goal``, an action moving strictly closer to
    the goal set (distances via backward BFS over the component's actions)."""
    graph = _mec_graph(mdp, members, actions)
    dist = {s: 0 for s in goal}
    frontier = list(goal)
    preds: Dict[State, List[Tuple[State, str]]] = {s: [] for s in members}
    for s in members:
        for a, t in graph[s]:
            if t in preds:
                preds[t].append((s, a))
    route: Dict[State, str] = {}
    while frontier:
        nxt: List[State] = []
        for t in frontier:
            for s, a in preds[t]:
                if s not in dist:
                    dist[s] = dist[t] + 1
                    route[s] = a
                    nxt.append(s)
        frontier = nxt
    missing = members - set(dist)
    if missing:
        raise ModelError(f"states {sorted(map(repr, missing))} cannot reach the routing goal")
    return route


def mec_constant_strategy(mdp: Mdp, mec, frequencies: Mapping[str, Fraction]) -> StrategySpec:
    """A strategy inside a MEC realizing the given recurrent action
    frequencies: positive-frequency states randomize proportionally, the
    rest route deterministically toward the support."""
    members, actions = mec
    choices: Dict[State, Dict[str, Fraction]] = {}
    support: Set[State] = set()
    for s in members:
        masses = {a: frequencies.get(a, ZERO) for a in mdp.available[s] if a in actions}
        dist = _proportional(masses)
        if dist is not None:
            choices[s] = dist
            support.add(s)
    if not support:
        raise ModelError("MEC frequencies are identically zero")
    route = _routing(mdp, members, actions, support)
    for s in members - support:
        choices[s] = {route[s]: ONE}
    return memoryless(choices)


def evaluate(mdp: Mdp, strategy: StrategySpec, objective: str) -> PayoffLaw:
    """Exact per-dimension payoff law of a finite-memory strategy."""
    mc = induced_chain(mdp, strategy)
    if objective == "reach":
        return payoff_law_reach(mc)
    if objective == "mean":
        return payoff_law_mean(mc)
    raise UnsupportedQueryError(f"unknown objective {objective!r}")


def check_strategy(mdp: Mdp, strategy: StrategySpec, query: Query):
    """Evaluate and check every constraint; returns (ok, law, details)."""
    law = evaluate(mdp, strategy, query.objective)
    ok, details = check_constraints(law, query)
    return ok, law, details


def two_memory_strategy(mdp: Mdp, flow: FlowSolution, inner: Mapping[State, Mapping[str, Fraction]]) -> StrategySpec:
    """Search/remain strategy: in ``search`` play the transient flow and on
    arrival at s switch to ``remain`` with probability x_s / inflow(s); in
    ``remain`` play the per-state inner (recurrent) moves."""
    inflow: Dict[State, Fraction] = {s: ZERO for s in mdp.states}
    inflow[mdp.initial] += ONE
    for a, mass in flow.y.items():
        if mass != 0:
            for t, p in mdp.delta[a].items():
                inflow[t] += mass * p
    beta: Dict[State, Fraction] = {}
    for s, mass in flow.x.items():
        if mass == 0:
            continue
        if inflow[s] < mass:
            raise ModelError(f"switch mass {mass} exceeds inflow {inflow[s]} at {s!r}")
        beta[s] = mass / inflow[s]

    next_move: Dict[Tuple[State, str], Dict[str, Fraction]] = {}
    for s in mdp.states:
        masses = {a: flow.y.get(a, ZERO) for a in mdp.available[s]}
        dist = _proportional(masses)
        next_move[(s, SEARCH)] = dist if dist is not None else {_least_action(mdp, s): ONE}
        move = inner.get(s)
        next_move[(s, REMAIN)] = dict(move) if move else {_least_action(mdp, s): ONE}

    update: Dict[Tuple[str, State, str], Dict[str, Fraction]] = {}
    for a in mdp.delta:
        for t, p in mdp.delta[a].items():
            if p != 0 and t in beta:
                update[(a, t, SEARCH)] = {REMAIN: beta[t], SEARCH: ONE - beta[t]}
    b0 = beta.get(mdp.initial, ZERO)
    initial_memory = normalized({REMAIN: b0, SEARCH: ONE - b0}) or {SEARCH: ONE}
    return StrategySpec(
        memory=(SEARCH, REMAIN),
        initial_memory=initial_memory,
        next_move=next_move,
        memory_update=update,
    )


def merge_inner(strategies: Iterable[StrategySpec]) -> Dict[State, Dict[str, Fraction]]:
    """Flatten memoryless per-MEC strategies into one state → move table."""
    merged: Dict[State, Dict[str, Fraction]] = {}
    for strat in strategies:
        if not strat.is_memoryless:
            raise ModelError("inner strategies must be memoryless")
        m = strat.memory[0]
        for (s, _), dist in strat.next_move.items():
            merged[s] = dict(dist)
    return merged


def realize_quotient_flow(
    mdp: Mdp,
    qm: QuotientMap,
    y: Mapping[str, Fraction],
    switch: Mapping[State, Fraction],
    inner: Mapping[State, Mapping[str, Fraction]],
    mec_lp_limit: int = 64,
) -> StrategySpec:
    """Turn a quotient-level flow into a strategy on the un-quotiented MDP.

    ``y`` gives masses for the quotient's actions (each owned by an original
    state); ``switch`` gives per-MEC-representative masses that stop searching
    and stay in the MEC forever, where ``inner`` then prescribes the moves.
    Small MECs are realized memorylessly by completing the flow with an exact
    transshipment LP over their internal actions; large MECs fall back to a
    finite-memory construction that samples the pending exit on entry and
    routes to it deterministically.
    """
    dec = qm.decomposition
    used = {a: m for a, m in y.items() if m != 0 and a in mdp.delta}

    entry: Dict[State, Fraction] = {s: ZERO for s in mdp.states}
    entry[mdp.initial] += ONE

    # arrival memory distribution per state, filled in per MEC below
    arrival: Dict[State, Dict] = {}
    next_move: Dict[Tuple[State, object], Dict[str, Fraction]] = {}
    tokens: List[object] = []
    full_y: Dict[str, Fraction] = dict(used)  # completed with internal flows

    for s in mdp.states:
        for a2, m in used.items():
            p = mdp.delta[a2].get(s, ZERO)
            if p != 0:
                entry[s] += m * p

    for members, actions in dec.mecs:
        if members <= mdp.targets:
            continue
        rep = qm.lift[next(iter(members))]
        exits = {
            a: used[a]
            for s in members
            for a in mdp.available[s]
            if a not in actions and a in used
        }
        commit = switch.get(rep, ZERO)
        total_in = sum((entry[s] for s in members), ZERO)
        if total_in == 0:
            continue  # never entered; default moves suffice
        if len(members) <= mec_lp_limit:
            g, w = _transship(mdp, members, actions, entry, exits, commit)
            for a, m in g.items():
                if m != 0:
                    full_y[a] = full_y.get(a, ZERO) + m
            for s in members:
                inflow = entry[s] + sum(
                    (g.get(a, ZERO) * mdp.delta[a].get(s, ZERO) for a in actions), ZERO
                )
                b = w.get(s, ZERO) / inflow if inflow != 0 else ZERO
                if b != 0:
                    arrival[s] = normalized({REMAIN: b, SEARCH: ONE - b})
        else:
            token_dist = {("exit", a): m / total_in for a, m in exits.items() if m != 0}
            if commit != 0:
                token_dist[REMAIN] = commit / total_in
            if not token_dist:
                raise ModelError("MEC absorbs flow without exits or switch mass")
            owner = mdp.action_state()
            for tok in token_dist:
                if tok == REMAIN:
                    continue
                _, a = tok
                tokens.append(tok)
                route = _routing(mdp, members, actions, {owner[a]})
                for s in members:
                    act = a if s == owner[a] else route[s]
                    next_move[(s, tok)] = {act: ONE}
            for s in members:
                arrival[s] = dict(token_dist)

    # search-mode moves: proportional to the completed flow
    for s in mdp.states:
        masses = {a: full_y.get(a, ZERO) for a in mdp.available[s]}
        dist = _proportional(masses)
        next_move[(s, SEARCH)] = dist if dist is not None else {_least_action(mdp, s): ONE}
        move = inner.get(s)
        next_move[(s, REMAIN)] = dict(move) if move else {_least_action(mdp, s): ONE}

    update: Dict[Tuple[str, State, object], Dict] = {}
    for a in mdp.delta:
        for t, p in mdp.delta[a].items():
            if p == 0:
                continue
            arr = arrival.get(t)
            if arr is not None:
                update[(a, t, SEARCH)] = arr
            # taking a pending exit re-triggers arrival sampling; internal
            # routing actions keep their token (identity default)
            for tok in tokens:
                if tok[1] == a:
                    update[(a, t, tok)] = arr if arr is not None else {SEARCH: ONE}

    memory = tuple([SEARCH, REMAIN] + tokens)
    init = arrival.get(mdp.initial, {SEARCH: ONE})
    return StrategySpec(
        memory=memory,
        initial_memory=init,
        next_move=next_move,
        memory_update=update,
    )


def _transship(
    mdp: Mdp,
    members: frozenset,
    actions: frozenset,
    entry: Mapping[State, Fraction],
    exits: Mapping[str, Fraction],
    commit: Fraction,
):
    """Complete a quotient flow inside one MEC: find internal action masses g
    and per-state switch masses w balancing entries against exits."""
    gvars = sorted(actions)
    wvars = sorted(members, key=repr) if commit != 0 else []
    prog = lpmod.LinearProgram(
        variables=[f"g::{a}" for a in gvars] + [f"w::{s!r}" for s in wvars]
    )
    for s in sorted(members, key=repr):
        coeffs: Dict[str, Fraction] = {}
        for a in gvars:
            c = ZERO
            if a in mdp.available[s]:
                c += ONE
            c -= mdp.delta[a].get(s, ZERO)
            if c != 0:
                coeffs[f"g::{a}"] = c
        if commit != 0:
            coeffs[f"w::{s!r}"] = ONE
        rhs = entry[s] - sum(
            (exits[a] for a in mdp.available[s] if a in exits), ZERO
        )
        prog.add(coeffs, "==", rhs)
    if commit != 0:
        prog.add({f"w::{s!r}": ONE for s in wvars}, "==", commit)
    res = lpmod.solve_feasibility(prog)
    if not res.ok:
        raise ModelError("internal flow completion infeasible")
    g = {a: res.assignment[f"g::{a}"] for a in gvars}
    w = {s: res.assignment[f"w::{s!r}"] for s in wvars}
    return g, w


def _measure_value(dist, constraint: Constraint):
    from . import risk

    if constraint.expectation is not None:
        return risk.expectation(dist)
    if constraint.cvar is not None:
        return risk.cvar(dist, constraint.cvar[0])
    if constraint.var is not None:
        return risk.var(dist, constraint.var[0])
    raise UnsupportedQueryError("constraint carries no measure")


def determinize_single_constraint(
    mdp: Mdp,
    strategy: StrategySpec,
    constraint: Constraint,
    objective: str = "reach",
    limit: int = 1 << 14,
) -> StrategySpec:
    """Round a memoryless randomizing strategy to the best deterministic one
    over its support; with a single constraint the value cannot decrease,
    because the randomized law is a convex mixture of the deterministic laws."""
    if not strategy.is_memoryless:
        raise UnsupportedQueryError("determinization requires a memoryless strategy")
    measures = sum(
        x is not None for x in (constraint.expectation, constraint.cvar, constraint.var)
    )
    if measures != 1:
        raise UnsupportedQueryError("exactly one constraint measure expected")
    m0 = strategy.memory[0]
    supports: List[Tuple[State, List[str]]] = []
    for s in mdp.states:
        dist = strategy.next_move.get((s, m0))
        acts = sorted(normalized(dist)) if dist else [_least_action(mdp, s)]
        supports.append((s, acts))
    count = 1
    for _, acts in supports:
        count *= len(acts)
        if count > limit:
            raise UnsupportedQueryError("deterministic support enumeration too large")
    best = None
    for combo in itertools.product(*(acts for _, acts in supports)):
        candidate = memoryless(
            {s: {a: ONE} for (s, _), a in zip(supports, combo)}
        )
        law = evaluate(mdp, candidate, objective)
        value = _measure_value(law[constraint.dim], constraint)
        if best is None or value > best[0]:
            best = (value, candidate)
    return best[1]
