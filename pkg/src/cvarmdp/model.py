"""Core data model: MDPs, Markov chains, queries, strategies, verdicts.

All probabilities and rewards are exact ``fractions.Fraction`` values.
Floating point is confined to the simulation module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

Rational = Fraction

State = Hashable
ActionName = str

ZERO = Fraction(0)
ONE = Fraction(1)


class ModelError(ValueError):
    """Raised for structurally broken models or strategies."""


class UnsupportedQueryError(ValueError):
    """Raised when a query falls outside the implemented decision procedures."""


def rat(value) -> Fraction:
    """Coerce ints, strings like ``"9/10"``, and Fractions to Fraction.

    Floats are rejected on purpose: model data must be exact.
    """
    if isinstance(value, bool):
        raise ModelError(f"boolean is not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise ModelError(f"not an exact rational: {value!r}")


Distribution = Dict  # value -> Fraction, positive, summing to 1


def check_distribution(dist: Mapping, what: str, problems: List[str]) -> None:
    total = ZERO
    for key, prob in dist.items():
        if not isinstance(prob, Fraction):
            problems.append(f"{what}: probability of {key!r} is not a Fraction")
            return
        if prob < 0:
            problems.append(f"{what}: negative probability {prob} at {key!r}")
        total += prob
    if total != 1:
        problems.append(f"{what}: probabilities sum to {total}, not 1")


def normalized(dist: Mapping) -> Dict:
    """Drop zero-probability entries; keep exact values."""
    return {k: v for k, v in dist.items() if v != 0}


@dataclass(frozen=True)
class Mdp:
    """Finite MDP with d-dimensional rational state rewards.

    ``available`` partitions the action set: every action belongs to exactly
    one state.  ``targets`` (for reachability objectives) must be absorbing.
    """

    states: Tuple[State, ...]
    available: Mapping[State, Tuple[ActionName, ...]]
    delta: Mapping[ActionName, Mapping[State, Fraction]]
    initial: State
    rewards: Mapping[State, Tuple[Fraction, ...]]
    targets: frozenset = frozenset()

    @property
    def dim(self) -> int:
        return len(self.rewards[self.initial])

    @property
    def actions(self) -> List[ActionName]:
        return [a for s in self.states for a in self.available.get(s, ())]

    def action_state(self) -> Dict[ActionName, State]:
        return {a: s for s in self.states for a in self.available.get(s, ())}

    def successors(self, state: State) -> set:
        out = set()
        for a in self.available.get(state, ()):
            out.update(self.delta[a].keys())
        return out

    def reward(self, state: State, j: int) -> Fraction:
        return self.rewards[state][j]


@dataclass(frozen=True)
class MarkovChain:
    """Finite Markov chain with an initial distribution."""

    states: Tuple[State, ...]
    delta: Mapping[State, Mapping[State, Fraction]]
    initial_distribution: Mapping[State, Fraction]
    rewards: Mapping[State, Tuple[Fraction, ...]]
    targets: frozenset = frozenset()

    @property
    def dim(self) -> int:
        return len(self.rewards[self.states[0]])


@dataclass(frozen=True)
class Constraint:
    """Lower-bound constraints for one reward dimension; each is optional."""

    dim: int
    expectation: Optional[Fraction] = None
    cvar: Optional[Tuple[Fraction, Fraction]] = None  # (p, c)
    var: Optional[Tuple[Fraction, Fraction]] = None  # (q, v)

    def is_trivial(self) -> bool:
        return self.expectation is None and self.cvar is None and self.var is None


@dataclass(frozen=True)
class Query:
    objective: str  # "reach" | "mean"
    constraints: Tuple[Constraint, ...]

    @property
    def dim(self) -> int:
        return 1 + max((c.dim for c in self.constraints), default=0)

    def constraint_for(self, j: int) -> Constraint:
        for c in self.constraints:
            if c.dim == j:
                return c
        return Constraint(dim=j)


@dataclass(frozen=True)
class StrategySpec:
    """Finite-memory stochastic-update strategy (next-move + memory-update).

    ``memory_update`` is sparse: a missing ``(action, state, memory)`` key
    means the memory is kept unchanged (Dirac identity update).
    """

    memory: Tuple[Hashable, ...]
    initial_memory: Mapping[Hashable, Fraction]
    next_move: Mapping[Tuple[State, Hashable], Mapping[ActionName, Fraction]]
    memory_update: Mapping[Tuple[ActionName, State, Hashable], Mapping[Hashable, Fraction]] = field(
        default_factory=dict
    )

    def update_dist(self, action: ActionName, state: State, mem: Hashable) -> Mapping:
        return self.memory_update.get((action, state, mem), {mem: ONE})

    @property
    def is_memoryless(self) -> bool:
        return len(self.memory) == 1

    @property
    def is_deterministic(self) -> bool:
        dists: List[Mapping] = [self.initial_memory]
        dists.extend(self.next_move.values())
        dists.extend(self.memory_update.values())
        return all(len(normalized(d)) == 1 for d in dists)


def memoryless(choices: Mapping[State, Mapping[ActionName, Fraction]]) -> StrategySpec:
    """Build a memoryless strategy from per-state action distributions."""
    mem = "m"
    return StrategySpec(
        memory=(mem,),
        initial_memory={mem: ONE},
        next_move={(s, mem): dict(d) for s, d in choices.items()},
    )


@dataclass
class ValidationReport:
    problems: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def __bool__(self) -> bool:
        return self.ok


def validate(model) -> ValidationReport:
    """Check structural invariants; returns a report instead of raising."""
    report = ValidationReport()
    problems = report.problems
    if isinstance(model, Mdp):
        _validate_mdp(model, problems)
    elif isinstance(model, MarkovChain):
        _validate_chain(model, problems)
    else:
        problems.append(f"not a model: {type(model).__name__}")
    return report


def _validate_mdp(mdp: Mdp, problems: List[str]) -> None:
    states = set(mdp.states)
    if mdp.initial not in states:
        problems.append(f"initial state {mdp.initial!r} not a state")
    owner: Dict[ActionName, State] = {}
    for s in mdp.states:
        acts = mdp.available.get(s, ())
        if not acts:
            problems.append(f"state {s!r} has no available action")
        for a in acts:
            if a in owner:
                problems.append(f"action {a!r} shared between states {owner[a]!r} and {s!r}")
            owner[a] = s
            row = mdp.delta.get(a)
            if row is None:
                problems.append(f"action {a!r} has no transition row")
                continue
            check_distribution(row, f"delta({a!r})", problems)
            for t in row:
                if t not in states:
                    problems.append(f"delta({a!r}) targets unknown state {t!r}")
    for a in mdp.delta:
        if a not in owner:
            problems.append(f"transition row for unavailable action {a!r}")
    dims = {len(v) for v in mdp.rewards.values()}
    if len(dims) > 1:
        problems.append(f"inconsistent reward dimensions: {sorted(dims)}")
    for s in mdp.states:
        if s not in mdp.rewards:
            problems.append(f"state {s!r} has no reward vector")
    for t in mdp.targets:
        if t not in states:
            problems.append(f"target {t!r} not a state")
            continue
        for a in mdp.available.get(t, ()):
            row = mdp.delta.get(a, {})
            if normalized(row) != {t: ONE}:
                problems.append(f"target {t!r} not absorbing via action {a!r}")


def _validate_chain(mc: MarkovChain, problems: List[str]) -> None:
    states = set(mc.states)
    check_distribution(mc.initial_distribution, "initial distribution", problems)
    for s in mc.initial_distribution:
        if s not in states:
            problems.append(f"initial distribution over unknown state {s!r}")
    for s in mc.states:
        row = mc.delta.get(s)
        if row is None:
            problems.append(f"state {s!r} has no transition row")
            continue
        check_distribution(row, f"delta({s!r})", problems)
        for t in row:
            if t not in states:
                problems.append(f"delta({s!r}) targets unknown state {t!r}")
        if s not in mc.rewards:
            problems.append(f"state {s!r} has no reward vector")
    for t in mc.targets:
        if t in states and normalized(mc.delta.get(t, {})) != {t: ONE}:
            problems.append(f"target {t!r} not absorbing")


def validate_query(query: Query, dim: int) -> ValidationReport:
    report = ValidationReport()
    problems = report.problems
    if query.objective not in ("reach", "mean"):
        problems.append(f"unknown objective {query.objective!r}")
    seen = set()
    for c in query.constraints:
        if c.dim in seen:
            problems.append(f"duplicate constraint block for dimension {c.dim}")
        seen.add(c.dim)
        if not 0 <= c.dim < dim:
            problems.append(f"constraint dimension {c.dim} outside 0..{dim - 1}")
        for level_pair, name in ((c.cvar, "cvar"), (c.var, "var")):
            if level_pair is not None:
                level, _ = level_pair
                if not ZERO < level < ONE:
                    problems.append(f"{name} level {level} not strictly inside (0,1)")
    return report


def strategy_problems(mdp: Mdp, strategy: StrategySpec) -> List[str]:
    problems: List[str] = []
    mem = set(strategy.memory)
    check_distribution(strategy.initial_memory, "initial memory", problems)
    if set(strategy.initial_memory) - mem:
        problems.append("initial memory distribution uses unknown memory elements")
    for (s, m), dist in strategy.next_move.items():
        if m not in mem:
            problems.append(f"next_move uses unknown memory {m!r}")
        check_distribution(dist, f"next_move({s!r},{m!r})", problems)
        allowed = set(mdp.available.get(s, ()))
        for a, prob in dist.items():
            if prob != 0 and a not in allowed:
                problems.append(f"next_move({s!r},{m!r}) uses unavailable action {a!r}")
    for key, dist in strategy.memory_update.items():
        check_distribution(dist, f"memory_update{key!r}", problems)
        if set(normalized(dist)) - mem:
            problems.append(f"memory_update{key!r} targets unknown memory")
    return problems


@dataclass
class Verdict:
    status: str  # "SAT" | "UNSAT" | "UNKNOWN"
    witness: Optional[StrategySpec] = None
    certificate: Optional[dict] = None

    @property
    def sat(self) -> bool:
        return self.status == "SAT"


def mix_strategies(s1: StrategySpec, s2: StrategySpec, lam: Fraction) -> StrategySpec:
    """Convex combination: play s1 with probability lam, else s2.

    Memory sets are tagged to stay disjoint; the induced run measure is the
    lam-mixture of the component measures.
    """
    lam = rat(lam)
    if not ZERO <= lam <= ONE:
        raise ModelError(f"mixture weight {lam} outside [0,1]")

    def tag(which, m):
        return (which, m)

    memory = tuple(tag(0, m) for m in s1.memory) + tuple(tag(1, m) for m in s2.memory)
    initial: Dict = {}
    for m, p in s1.initial_memory.items():
        if lam * p != 0:
            initial[tag(0, m)] = lam * p
    for m, p in s2.initial_memory.items():
        if (1 - lam) * p != 0:
            initial[tag(1, m)] = (1 - lam) * p
    if not initial:  # degenerate lam with a Dirac component; keep a valid distribution
        initial = {memory[0]: ONE}
    next_move: Dict = {}
    update: Dict = {}
    for which, strat in ((0, s1), (1, s2)):
        for (s, m), dist in strat.next_move.items():
            next_move[(s, tag(which, m))] = dict(dist)
        for (a, s, m), dist in strat.memory_update.items():
            update[(a, s, tag(which, m))] = {tag(which, m2): p for m2, p in dist.items()}
    return StrategySpec(memory=memory, initial_memory=initial, next_move=next_move, memory_update=update)


def induced_chain(mdp: Mdp, strategy: StrategySpec) -> MarkovChain:
    """Product of an MDP with a finite-memory strategy.

    States are ``(state, memory, action)`` triples, restricted to the
    reachable part.  Rewards and target flags are lifted from the state
    component.
    """
    def move_at(s2, m2):
        move = strategy.next_move.get((s2, m2))
        if move is None and s2 in mdp.targets:
            # payoff is fixed on arrival, so the action choice at a target is
            # irrelevant; default deterministically for convenience
            acts = mdp.available.get(s2, ())
            if acts:
                return {min(acts): ONE}
        return move

    initial: Dict = {}
    for m, pm in normalized(strategy.initial_memory).items():
        move = move_at(mdp.initial, m)
        if move is None:
            raise ModelError(f"strategy undefined at initial state, memory {m!r}")
        for a, pa in normalized(move).items():
            key = (mdp.initial, m, a)
            initial[key] = initial.get(key, ZERO) + pm * pa

    delta: Dict = {}
    frontier = list(initial)
    seen = set(frontier)
    while frontier:
        s, m, a = frontier.pop()
        if s in mdp.targets:
            # payoff is decided on arrival; freeze the triple so targets stay absorbing
            delta[(s, m, a)] = {(s, m, a): ONE}
            continue
        row: Dict = {}
        for s2, pt in mdp.delta[a].items():
            for m2, pu in normalized(strategy.update_dist(a, s2, m)).items():
                move = move_at(s2, m2)
                if move is None:
                    raise ModelError(f"strategy undefined at state {s2!r}, memory {m2!r}")
                for a2, pa in normalized(move).items():
                    key = (s2, m2, a2)
                    row[key] = row.get(key, ZERO) + pt * pu * pa
                    if key not in seen:
                        seen.add(key)
                        frontier.append(key)
        delta[(s, m, a)] = row

    states = tuple(sorted(seen, key=repr))
    rewards = {st: mdp.rewards[st[0]] for st in states}
    targets = frozenset(st for st in states if st[0] in mdp.targets)
    return MarkovChain(
        states=states,
        delta=delta,
        initial_distribution=initial,
        rewards=rewards,
        targets=targets,
    )
