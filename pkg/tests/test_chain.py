"""Markov chain solver tests: exact reachability laws, mean payoff, verdicts."""
import random
from fractions import Fraction as F

import pytest

from cvarmdp.chain import (
    bscc_mean_payoff,
    decide_mc,
    payoff_law_mean,
    payoff_law_reach,
    reach_probabilities,
    solve_linear,
)
from cvarmdp.model import Constraint, MarkovChain, Query
from cvarmdp.risk import cvar, expectation, var


def chain(delta, init, rewards, targets=()):
    states = tuple(sorted({s for s in delta} | {t for row in delta.values() for t in row}))
    return MarkovChain(
        states=states,
        delta={s: {t: F(p) for t, p in row.items()} for s, row in delta.items()},
        initial_distribution={init: F(1)},
        rewards={s: (F(rewards.get(s, 0)),) for s in states},
        targets=frozenset(targets),
    )


class TestLinearSolver:
    def test_exact_solution(self):
        a = [[F(2), F(1)], [F(1), F(3)]]
        b = [[F(5)], [F(10)]]
        x = solve_linear(a, b)
        assert x == [[F(1)], [F(3)]]

    def test_random_systems_roundtrip(self):
        rng = random.Random(7)
        for _ in range(25):
            n = rng.randint(1, 4)
            a = [[F(rng.randint(-4, 4)) for _ in range(n)] for _ in range(n)]
            x_true = [[F(rng.randint(-3, 3))] for _ in range(n)]
            b = [[sum(a[i][j] * x_true[j][0] for j in range(n))] for i in range(n)]
            try:
                x = solve_linear(a, b)
            except Exception:
                continue  # singular draw
            assert all(
                sum(a[i][j] * x[j][0] for j in range(n)) == b[i][0] for i in range(n)
            )


class TestReachLaw:
    def test_gambler_walk(self):
        # fair coin from 1 on {0..3}: absorb at 0 or 3
        mc = chain(
            {
                "1": {"0": "1/2", "2": "1/2"},
                "2": {"1": "1/2", "3": "1/2"},
                "0": {"0": 1},
                "3": {"3": 1},
            },
            "1",
            {"3": 9},
            targets={"0", "3"},
        )
        probs = reach_probabilities(mc)
        assert probs["3"] == F(1, 3)
        assert probs["0"] == F(2, 3)
        law = payoff_law_reach(mc)[0]
        assert law.atoms == {F(0): F(2, 3), F(9): F(1, 3)}

    def test_never_reaching_counts_as_zero(self):
        mc = chain(
            {"a": {"a": "1/2", "t": "1/4", "b": "1/4"}, "b": {"b": 1}, "t": {"t": 1}},
            "a",
            {"t": 4},
            targets={"t"},
        )
        law = payoff_law_reach(mc)[0]
        assert law.atoms[F(4)] == F(1, 2)
        assert law.atoms[F(0)] == F(1, 2)


class TestMeanLaw:
    def test_single_bscc_stationary_average(self):
        # two-state rotation with rewards 2 and 6 -> mean 4
        mc = chain({"a": {"b": 1}, "b": {"a": 1}}, "a", {"a": 2, "b": 6})
        gains = bscc_mean_payoff(mc)
        assert [g for _, g in gains] == [(F(4),)]
        law = payoff_law_mean(mc)[0]
        assert law.atoms == {F(4): F(1)}

    def test_branching_into_two_bsccs(self):
        mc = chain(
            {"s": {"a": "1/3", "b": "2/3"}, "a": {"a": 1}, "b": {"b": 1}},
            "s",
            {"a": 10, "b": 1},
        )
        law = payoff_law_mean(mc)[0]
        assert law.atoms == {F(10): F(1, 3), F(1): F(2, 3)}

    def test_biased_loop(self):
        # stay at h (reward 3) w.p. 3/4 else go to l (reward 0) and back
        mc = chain({"h": {"h": "3/4", "l": "1/4"}, "l": {"h": 1}}, "h", {"h": 3})
        gains = bscc_mean_payoff(mc)
        # stationary distribution (4/5, 1/5)
        assert [g for _, g in gains] == [(F(12, 5),)]


class TestDecideMc:
    def test_reach_verdict_with_details(self):
        mc = chain(
            {"s": {"hi": "9/10", "lo": "1/10"}, "hi": {"hi": 1}, "lo": {"lo": 1}},
            "s",
            {"hi": 10},
            targets={"hi", "lo"},
        )
        q = Query(
            objective="reach",
            constraints=(
                Constraint(dim=0, expectation=F(9), cvar=(F(1, 5), F(1)), var=(F(1, 2), F(10))),
            ),
        )
        verdict = decide_mc(mc, q)
        assert verdict.status == "SAT"
        q_bad = Query(
            objective="reach", constraints=(Constraint(dim=0, expectation=F(19, 2)),)
        )
        assert decide_mc(mc, q_bad).status == "UNSAT"

    def test_law_certificate_matches_measures(self):
        mc = chain(
            {"s": {"hi": "1/2", "lo": "1/2"}, "hi": {"hi": 1}, "lo": {"lo": 1}},
            "s",
            {"hi": 8, "lo": 2},
            targets={"hi", "lo"},
        )
        q = Query(objective="reach", constraints=(Constraint(dim=0, expectation=F(5)),))
        from cvarmdp.risk import FiniteDistribution

        verdict = decide_mc(mc, q)
        law = FiniteDistribution(verdict.certificate["law"][0])
        assert expectation(law) == 5
        assert cvar(law, F(1, 2)) == 2
        assert var(law, F(1, 2)) == 8
