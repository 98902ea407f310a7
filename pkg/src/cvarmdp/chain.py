"""Exact payoff laws and query decision for finite Markov chains."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Mapping, Sequence, Set, Tuple

from . import risk
from .graphs import bsccs, states_reaching
from .model import MarkovChain, Mdp, Query, State, Verdict

ZERO = Fraction(0)
ONE = Fraction(1)


def solve_linear(a: List[List[Fraction]], b: List[List[Fraction]]) -> List[List[Fraction]]:
    """Solve A X = B exactly by Gaussian elimination (B holds columns as a
    row-major right-hand-side matrix)."""
    n = len(a)
    m = len(b[0]) if n else 0
    aug = [list(a[i]) + list(b[i]) for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ValueError("singular linear system")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                row, prow = aug[r], aug[col]
                aug[r] = [row[k] - factor * prow[k] for k in range(n + m)]
    return [aug[i][n:] for i in range(n)]


@dataclass
class PayoffLaw:
    """Per-dimension distribution of the payoff under a fixed strategy/chain."""

    marginals: List[risk.FiniteDistribution]

    @property
    def dim(self) -> int:
        return len(self.marginals)

    def __getitem__(self, j: int) -> risk.FiniteDistribution:
        return self.marginals[j]


def reach_probabilities(mc: MarkovChain) -> Dict[State, Fraction]:
    """Exact absorption probability for each target, from the initial
    distribution.  States that cannot reach any target contribute nothing."""
    targets = list(mc.targets)
    target_set = set(targets)
    mdp_like_can_reach = _states_reaching_chain(mc, target_set)
    transient = [s for s in mc.states if s not in target_set and s in mdp_like_can_reach]
    index = {s: i for i, s in enumerate(transient)}
    tindex = {t: j for j, t in enumerate(targets)}
    n, m = len(transient), len(targets)
    if n:
        a = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
        b = [[ZERO] * m for _ in range(n)]
        for s in transient:
            i = index[s]
            for t, p in mc.delta[s].items():
                if p == 0:
                    continue
                if t in index:
                    a[i][index[t]] -= p
                elif t in tindex:
                    b[i][tindex[t]] += p
        x = solve_linear(a, b)
    else:
        x = []
    result = {t: ZERO for t in targets}
    for s, mu in mc.initial_distribution.items():
        if mu == 0:
            continue
        if s in tindex:
            result[s] += mu
        elif s in index:
            for t in targets:
                result[t] += mu * x[index[s]][tindex[t]]
    return result


def _states_reaching_chain(mc: MarkovChain, goal: Set[State]) -> Set[State]:
    preds: Dict[State, List[State]] = {s: [] for s in mc.states}
    for s in mc.states:
        for t, p in mc.delta[s].items():
            if p != 0:
                preds[t].append(s)
    seen = set(goal)
    frontier = list(goal)
    while frontier:
        s = frontier.pop()
        for q in preds[s]:
            if q not in seen:
                seen.add(q)
                frontier.append(q)
    return seen


def payoff_law_reach(mc: MarkovChain) -> PayoffLaw:
    """Distribution of the reward of the first target visited; mass that never
    reaches a target counts as value 0."""
    probs = reach_probabilities(mc)
    d = mc.dim
    marginals = []
    for j in range(d):
        atoms: Dict[Fraction, Fraction] = {}
        total = ZERO
        for t, p in probs.items():
            if p == 0:
                continue
            v = mc.rewards[t][j]
            atoms[v] = atoms.get(v, ZERO) + p
            total += p
        residual = 1 - total
        if residual != 0:
            atoms[ZERO] = atoms.get(ZERO, ZERO) + residual
        marginals.append(risk.FiniteDistribution(atoms))
    return PayoffLaw(marginals)


def bscc_mean_payoff(mc: MarkovChain) -> List[Tuple[FrozenSet, Tuple[Fraction, ...]]]:
    """Expected mean payoff of each BSCC via its exact stationary distribution."""
    out = []
    for comp in bsccs(mc):
        members = sorted(comp, key=repr)
        idx = {s: i for i, s in enumerate(members)}
        n = len(members)
        # rows 0..n-2: stationarity at members[0..n-2]; last row: total mass 1
        a = [[ZERO] * n for _ in range(n)]
        b = [[ZERO] for _ in range(n)]
        for u in members[:-1]:
            i = idx[u]
            a[i][i] -= 1
            for s in members:
                p = mc.delta[s].get(u, ZERO)
                if p != 0:
                    a[i][idx[s]] += p
        for j in range(n):
            a[n - 1][j] = ONE
        b[n - 1][0] = ONE
        pi = [row[0] for row in solve_linear(a, b)]
        gain = tuple(
            sum((pi[idx[s]] * mc.rewards[s][j] for s in members), ZERO) for j in range(mc.dim)
        )
        out.append((frozenset(comp), gain))
    return out


def payoff_law_mean(mc: MarkovChain) -> PayoffLaw:
    """Mean-payoff law: almost every run settles in a BSCC and attains that
    BSCC's expected gain, so the law reduces to reachability over BSCCs."""
    gains = bscc_mean_payoff(mc)
    bscc_states: Set[State] = set()
    for comp, _ in gains:
        bscc_states.update(comp)
    frozen_delta = {
        s: ({s: ONE} if s in bscc_states else mc.delta[s]) for s in mc.states
    }
    aux = MarkovChain(
        states=mc.states,
        delta=frozen_delta,
        initial_distribution=mc.initial_distribution,
        rewards=mc.rewards,
        targets=frozenset(bscc_states),
    )
    probs = reach_probabilities(aux)
    marginals = []
    for j in range(mc.dim):
        atoms: Dict[Fraction, Fraction] = {}
        for comp, gain in gains:
            mass = sum((probs[s] for s in comp), ZERO)
            if mass != 0:
                atoms[gain[j]] = atoms.get(gain[j], ZERO) + mass
        marginals.append(risk.FiniteDistribution(atoms))
    return PayoffLaw(marginals)


def check_constraints(law: PayoffLaw, query: Query) -> Tuple[bool, List[dict]]:
    """Evaluate every constraint of the query against an exact payoff law."""
    details = []
    ok = True
    for c in query.constraints:
        d = law[c.dim]
        entry: dict = {"dim": c.dim}
        if c.expectation is not None:
            val = risk.expectation(d)
            entry["expectation"] = (val, c.expectation, val >= c.expectation)
        if c.cvar is not None:
            p, bound = c.cvar
            val = risk.cvar(d, p)
            entry["cvar"] = (val, bound, val >= bound)
        if c.var is not None:
            q, bound = c.var
            val = risk.var(d, q)
            entry["var"] = (val, bound, val >= bound)
        for key in ("expectation", "cvar", "var"):
            if key in entry and not entry[key][2]:
                ok = False
        details.append(entry)
    return ok, details


def decide_mc(mc: MarkovChain, query: Query) -> Verdict:
    """Decide a query on a Markov chain by computing the exact law and
    checking each dimension's measures directly."""
    law = payoff_law_reach(mc) if query.objective == "reach" else payoff_law_mean(mc)
    ok, details = check_constraints(law, query)
    certificate = {
        "law": [dist.atoms for dist in law.marginals],
        "constraints": details,
    }
    return Verdict(status="SAT" if ok else "UNSAT", certificate=certificate)
