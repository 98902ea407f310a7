#!/usr/bin/env python3
"""Timing benchmark: single-dimension reachability checks at growing state counts.

Builds ring-shaped instances whose end component collapses in the quotient,
so runtime tracks the graph analysis rather than the LP size.
"""
import argparse
import random
import time
from fractions import Fraction as F

from cvarmdp.model import Constraint, Mdp, Query
from cvarmdp.solver import decide


def big_ring(n: int, seed: int) -> Mdp:
    rng = random.Random(seed)
    ring = [f"c{i}" for i in range(n - 2)]
    available, delta, rewards = {}, {}, {}
    k = len(ring)
    for i, s in enumerate(ring):
        acts = [f"fwd{i}"]
        delta[f"fwd{i}"] = {ring[(i + 1) % k]: F(1)}
        if i % 97 == 0:
            acts.append(f"exit{i}")
            ph = F(rng.randint(6, 9), 10)
            delta[f"exit{i}"] = {"hi": ph, "lo": 1 - ph}
        available[s] = tuple(acts)
        rewards[s] = (F(0),)
    for t in ("hi", "lo"):
        available[t] = (f"stay_{t}",)
        delta[f"stay_{t}"] = {t: F(1)}
    rewards["hi"], rewards["lo"] = (F(10),), (F(0),)
    return Mdp(
        states=tuple(ring + ["hi", "lo"]),
        available=available,
        delta=delta,
        initial=ring[0],
        rewards=rewards,
        targets=frozenset({"hi", "lo"}),
    )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="*", default=[100, 500, 1000, 2000, 5000])
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    query = Query(
        objective="reach",
        constraints=(Constraint(dim=0, expectation=F(5), cvar=(F(1, 20), F(0))),),
    )
    print(f"{'states':>8}  {'build (s)':>10}  {'decide (s)':>10}  verdict")
    for n in args.sizes:
        t0 = time.monotonic()
        mdp = big_ring(n, args.seed)
        t1 = time.monotonic()
        verdict = decide(mdp, query)
        t2 = time.monotonic()
        print(f"{n:>8}  {t1 - t0:>10.3f}  {t2 - t1:>10.3f}  {verdict.status}")


if __name__ == "__main__":
    main()
