"""Graph-analysis tests: SCCs, MEC decomposition (vs. brute force), quotients."""
import itertools
import random
from fractions import Fraction as F

from cvarmdp.gadgets import random_mdp
from cvarmdp.graphs import (
    bsccs,
    check_attraction,
    cleanup,
    mec_decomposition,
    mec_quotient,
    reachable_states,
    strongly_connected_components,
)
from cvarmdp.model import Mdp, validate


def brute_force_mecs(mdp):
    """Oracle: maximal end components by exhaustive sub-MDP enumeration.

    An end component is a set of state/action pairs that is closed (all
    successors stay inside) and whose underlying graph is strongly connected.
    Feasible only for tiny models.
    """
    owner = mdp.action_state()
    all_actions = list(mdp.delta)
    ecs = []
    for r in range(1, len(all_actions) + 1):
        for acts in itertools.combinations(all_actions, r):
            states = {owner[a] for a in acts}
            if any(set(mdp.delta[a]) - states for a in acts):
                continue
            # strong connectivity of the induced graph
            graph = {s: set() for s in states}
            for a in acts:
                graph[owner[a]] |= set(mdp.delta[a])
            comp = _scc_closed(graph, states)
            if comp:
                ecs.append((frozenset(states), frozenset(acts)))
    # keep the maximal ones
    maximal = []
    for st, ac in ecs:
        if not any((st <= st2 and ac < ac2) or (st < st2 and ac <= ac2) for st2, ac2 in ecs):
            maximal.append((st, ac))
    return sorted(set(maximal), key=_mec_key)


def _mec_key(mec):
    # frozensets compare by subset relation, so sort by sorted member lists
    states, actions = mec
    return (sorted(states), sorted(actions))


def _scc_closed(graph, states):
    if not states:
        return False
    start = next(iter(states))
    for source in states:
        seen = {source}
        stack = [source]
        while stack:
            u = stack.pop()
            for v in graph[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if seen != states:
            return False
    return True


class TestScc:
    def test_two_cycles(self):
        graph = {1: [2], 2: [1, 3], 3: [4], 4: [3]}
        comps = strongly_connected_components(graph)
        assert sorted(map(sorted, comps)) == [[1, 2], [3, 4]]

    def test_deep_chain_no_recursion_limit(self):
        n = 50_000
        graph = {i: [i + 1] for i in range(n)}
        graph[n] = []
        comps = strongly_connected_components(graph)
        assert len(comps) == n + 1


class TestMecDecomposition:
    def test_matches_brute_force_on_random_models(self):
        for seed in range(40):
            rng = random.Random(seed)
            mdp = random_mdp(
                rng.randint(2, 5), rng.randint(1, 2), F(1, 2), (0, 3), 1, seed=seed
            )
            got = sorted(mec_decomposition(mdp).mecs, key=_mec_key)
            assert got == brute_force_mecs(mdp), f"seed {seed}"

    def test_self_loop_is_a_mec(self):
        mdp = random_mdp(1, 1, F(1), (0, 0), 1, seed=0)
        dec = mec_decomposition(mdp)
        assert len(dec.mecs) == 1

    def test_state_to_mec_is_consistent(self):
        mdp = random_mdp(6, 2, F(1, 3), (0, 5), 1, seed=11)
        dec = mec_decomposition(mdp)
        for i, (states, _) in enumerate(dec.mecs):
            for s in states:
                assert dec.state_to_mec[s] == i


class TestCleanupAndQuotient:
    def test_cleanup_makes_every_mec_hit_targets_or_stay(self):
        for seed in range(20):
            mdp = random_mdp(6, 2, F(1, 3), (0, 5), 1, seed=seed, targets=2)
            clean = cleanup(mdp)
            assert validate(clean).ok
            # all original target states survive as targets
            assert mdp.targets <= clean.targets

    def test_quotient_collapses_mecs_to_representatives(self):
        mdp = random_mdp(8, 2, F(1, 3), (0, 5), 1, seed=5, targets=2)
        clean = cleanup(mdp)
        qm = mec_quotient(clean)
        dec = mec_decomposition(qm.quotient)
        # every MEC in the quotient is a singleton
        assert all(len(states) == 1 for states, _ in dec.mecs)
        assert validate(qm.quotient).ok
        # lift maps every clean state to its representative
        for s in clean.states:
            assert qm.lift[s] in qm.quotient.states

    def test_bsccs_of_chain(self):
        from cvarmdp.model import MarkovChain

        mc = MarkovChain(
            states=("a", "b", "c"),
            delta={"a": {"b": F(1, 2), "c": F(1, 2)}, "b": {"b": F(1)}, "c": {"c": F(1)}},
            initial_distribution={"a": F(1)},
            rewards={s: (F(0),) for s in "abc"},
        )
        comps = bsccs(mc)
        assert sorted(map(sorted, comps)) == [["b"], ["c"]]


class TestAttraction:
    def _mdp(self, targets, neg_reward):
        return Mdp(
            states=("s", "t", "u"),
            available={"s": ("a", "b"), "t": ("lt",), "u": ("lu",)},
            delta={
                "a": {"t": F(1)},
                "b": {"u": F(1)},
                "lt": {"t": F(1)},
                "lu": {"u": F(1)},
            },
            initial="s",
            rewards={
                "s": (F(0),),
                "t": (F(-1) if neg_reward else F(1),),
                "u": (F(2),),
            },
            targets=frozenset(targets),
        )

    def test_all_mecs_hit_targets(self):
        assert check_attraction(self._mdp({"t", "u"}, False)) in ("A1", "both")

    def test_nonnegative_rewards(self):
        assert check_attraction(self._mdp({"t"}, False)) in ("A2", "both")

    def test_neither(self):
        assert check_attraction(self._mdp({"t"}, True)) == "neither"


class TestReachability:
    def test_reachable_states(self):
        mdp = random_mdp(6, 2, F(1, 3), (0, 5), 1, seed=3)
        reach = reachable_states(mdp, mdp.initial)
        assert mdp.initial in reach
        assert reach <= set(mdp.states)
