"""Command-line front end.

Subcommands: check, evaluate, simulate, mec, generate, gadget-sat.
Exit codes: 0 SAT, 1 UNSAT, 2 UNKNOWN, 64 usage error, 65 invalid input.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

from . import serialize
from .graphs import mec_decomposition
from .model import ModelError, Query, Rational, UnsupportedQueryError, rat
from .risk import cvar, expectation, var
from .simulate import SimConfig, empirical_measures, sample_payoffs, write_samples_csv
from .solver import SolverConfig, decide
from .synthesis import check_strategy, evaluate

EXIT_SAT = 0
EXIT_UNSAT = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 64
EXIT_INVALID = 65


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 64 on usage errors
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad rational {text!r}: {exc}")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ModelError(f"cannot read {path}: {exc}") from exc


def _build_parser() -> _Parser:
    parser = _Parser(prog="cvarmdp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide a query; write witness + certificate")
    p.add_argument("model")
    p.add_argument("query")
    p.add_argument("--objective", choices=["reach", "mean"], help="override query objective")
    p.add_argument("--grid", type=int, default=16, help="guess-grid refinement")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", help="prefix for witness/certificate JSON (default: query path stem)")

    p = sub.add_parser("evaluate", help="exact E/VaR/CVaR of a strategy")
    p.add_argument("model")
    p.add_argument("strategy")
    p.add_argument("--objective", choices=["reach", "mean"], default="reach")
    p.add_argument("--p", type=_rational, default=Fraction(1, 20))
    p.add_argument("--q", type=_rational, default=Fraction(1, 20))

    p = sub.add_parser("simulate", help="exact values plus Monte Carlo estimates")
    p.add_argument("model")
    p.add_argument("strategy")
    p.add_argument("--objective", choices=["reach", "mean"], default="reach")
    p.add_argument("--p", type=_rational, default=Fraction(1, 20))
    p.add_argument("--q", type=_rational, default=Fraction(1, 20))
    p.add_argument("--runs", type=int, default=10_000)
    p.add_argument("--horizon", type=int, default=10_000)
    p.add_argument("--burn-in", type=int, default=1_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", help="write per-run samples to this CSV file")

    p = sub.add_parser("mec", help="print the maximal end component decomposition")
    p.add_argument("model")

    p = sub.add_parser("generate", help="write a benchmark or random instance")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--example", help="named instance, e.g. choice, loop, slow(1/8), negative")
    group.add_argument("--random", action="store_true")
    p.add_argument("--states", type=int, default=10)
    p.add_argument("--actions", type=int, default=2)
    p.add_argument("--density", type=_rational, default=Fraction(1, 3))
    p.add_argument("--reward-lo", type=int, default=0)
    p.add_argument("--reward-hi", type=int, default=10)
    p.add_argument("--dims", type=int, default=1)
    p.add_argument("--targets", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("model_out")
    p.add_argument("query_out", nargs="?")

    p = sub.add_parser("gadget-sat", help="encode a DIMACS CNF as a model + query")
    p.add_argument("cnf")
    p.add_argument("model_out")
    p.add_argument("query_out")
    return parser


def _print_table(rows: List[List[str]]) -> None:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    for row in rows:
        print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))


def _fmt(x) -> str:
    if x == float("inf"):
        return "inf"
    f = Fraction(x)
    return f"{f} ({float(f):.6g})" if f.denominator != 1 else str(f.numerator)


def _cmd_check(args) -> int:
    mdp = serialize.model_from_json(_read(args.model))
    query = serialize.query_from_json(_read(args.query))
    if args.objective:
        query = Query(objective=args.objective, constraints=query.constraints)
    config = SolverConfig(grid=args.grid, threads=args.threads)
    verdict = decide(mdp, query, config)
    if verdict.sat:
        # independent re-verification before reporting SAT
        ok, law, details = check_strategy(mdp, verdict.witness, query)
        if not ok:
            raise ModelError(f"witness failed re-verification: {details}")
    print(verdict.status)
    prefix = args.out or str(Path(args.query).with_suffix(""))
    Path(prefix + ".certificate.json").write_text(serialize.verdict_to_json(verdict))
    if verdict.witness is not None:
        Path(prefix + ".witness.json").write_text(serialize.strategy_to_json(verdict.witness))
        print(f"witness: {prefix}.witness.json")
    print(f"certificate: {prefix}.certificate.json")
    return {"SAT": EXIT_SAT, "UNSAT": EXIT_UNSAT}.get(verdict.status, EXIT_UNKNOWN)


def _measure_rows(law, p: Rational, q: Rational) -> List[List[str]]:
    rows = [["dim", "E", f"VaR@{q}", f"CVaR@{p}"]]
    for j in range(law.dim):
        dist = law[j]
        rows.append(
            [str(j), _fmt(expectation(dist)), _fmt(var(dist, q)), _fmt(cvar(dist, p))]
        )
    return rows


def _cmd_evaluate(args) -> int:
    mdp = serialize.model_from_json(_read(args.model))
    strategy = serialize.strategy_from_json(_read(args.strategy))
    law = evaluate(mdp, strategy, args.objective)
    _print_table(_measure_rows(law, args.p, args.q))
    return EXIT_SAT


def _cmd_simulate(args) -> int:
    mdp = serialize.model_from_json(_read(args.model))
    strategy = serialize.strategy_from_json(_read(args.strategy))
    law = evaluate(mdp, strategy, args.objective)
    cfg = SimConfig(runs=args.runs, horizon=args.horizon, seed=args.seed, burn_in=args.burn_in)
    rows = [["dim", "E", f"VaR@{args.q}", f"CVaR@{args.p}", "E~", "VaR~", "CVaR~"]]
    for j in range(law.dim):
        dist = law[j]
        samples = sample_payoffs(mdp, strategy, args.objective, cfg, dim_index=j)
        e, v, c = empirical_measures(samples, args.p, args.q)
        rows.append(
            [
                str(j),
                _fmt(expectation(dist)),
                _fmt(var(dist, args.q)),
                _fmt(cvar(dist, args.p)),
                f"{float(e):.6g}",
                "inf" if v == float("inf") else f"{float(v):.6g}",
                f"{float(c):.6g}",
            ]
        )
        if args.csv and j == 0:
            write_samples_csv(args.csv, samples)
    _print_table(rows)
    return EXIT_SAT


def _cmd_mec(args) -> int:
    mdp = serialize.model_from_json(_read(args.model))
    dec = mec_decomposition(mdp)
    print(f"{len(dec.mecs)} maximal end component(s)")
    for i, (states, actions) in enumerate(dec.mecs):
        names = ", ".join(sorted(map(str, states)))
        print(f"  MEC {i}: states [{names}] actions {len(actions)}")
    return EXIT_SAT


def _cmd_generate(args) -> int:
    from . import gadgets

    if args.example:
        mdp, query = gadgets.example(args.example)
        Path(args.model_out).write_text(serialize.model_to_json(mdp))
        print(f"model: {args.model_out}")
        if args.query_out:
            Path(args.query_out).write_text(serialize.query_to_json(query))
            print(f"query: {args.query_out}")
    else:
        mdp = gadgets.random_mdp(
            args.states,
            args.actions,
            args.density,
            (args.reward_lo, args.reward_hi),
            args.dims,
            args.seed,
            targets=args.targets,
        )
        Path(args.model_out).write_text(serialize.model_to_json(mdp))
        print(f"model: {args.model_out}")
    return EXIT_SAT


def _cmd_gadget_sat(args) -> int:
    from .gadgets import Cnf3, sat_reduction

    num_vars, clauses = serialize.parse_dimacs(_read(args.cnf))
    mdp, _, query = sat_reduction(Cnf3(num_vars, clauses))
    Path(args.model_out).write_text(serialize.model_to_json(mdp))
    Path(args.query_out).write_text(serialize.query_to_json(query))
    print(f"model: {args.model_out}")
    print(f"query: {args.query_out}")
    return EXIT_SAT


_COMMANDS = {
    "check": _cmd_check,
    "evaluate": _cmd_evaluate,
    "simulate": _cmd_simulate,
    "mec": _cmd_mec,
    "generate": _cmd_generate,
    "gadget-sat": _cmd_gadget_sat,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except (ModelError, UnsupportedQueryError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
