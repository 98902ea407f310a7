"""Canonical JSON (de)serialization for models, queries, strategies, verdicts.

Rationals travel as strings ``"a/b"``; floats in input files are rejected to
preserve exactness.  Serialization is canonical (sorted keys, fixed layout),
so generate -> parse -> serialize round-trips byte-identically.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from .model import (
    Constraint,
    MarkovChain,
    Mdp,
    ModelError,
    Query,
    Rational,
    StrategySpec,
    Verdict,
    rat,
    validate,
    validate_query,
)
from .risk import FiniteDistribution

__all__ = [
    "model_to_json",
    "model_from_json",
    "query_to_json",
    "query_from_json",
    "strategy_to_json",
    "strategy_from_json",
    "verdict_to_json",
    "parse_dimacs",
    "write_dimacs",
]


def _rat_str(x: Rational) -> str:
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)


def _parse_rat(obj: Any, where: str) -> Fraction:
    if isinstance(obj, bool):
        raise ModelError(f"{where}: booleans are not numbers")
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, float):
        raise ModelError(
            f"{where}: floats are rejected; write the rational as a string 'a/b'"
        )
    if isinstance(obj, str):
        try:
            return Fraction(obj)
        except (ValueError, ZeroDivisionError) as exc:
            raise ModelError(f"{where}: bad rational {obj!r}: {exc}") from exc
    raise ModelError(f"{where}: expected rational, got {type(obj).__name__}")


def _dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# models


def model_to_json(mdp: Mdp) -> str:
    doc = {
        "initial": mdp.initial,
        "states": [
            {
                "name": s,
                "rewards": [_rat_str(r) for r in mdp.rewards[s]],
                "target": s in mdp.targets,
            }
            for s in sorted(mdp.states)
        ],
        "actions": [
            {
                "name": a,
                "from": s,
                "transitions": {t: _rat_str(p) for t, p in mdp.delta[a].items()},
            }
            for s in sorted(mdp.states)
            for a in sorted(mdp.available.get(s, ()))
        ],
    }
    return _dumps(doc)


def model_from_json(text: str) -> Mdp:
    try:
        doc = json.loads(text, parse_float=_reject_float)
    except json.JSONDecodeError as exc:
        raise ModelError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelError("model document must be a JSON object")
    try:
        state_docs = doc["states"]
        action_docs = doc["actions"]
        initial = doc["initial"]
    except KeyError as exc:
        raise ModelError(f"model document missing key {exc}") from exc

    states: List[str] = []
    rewards: Dict[str, Tuple[Fraction, ...]] = {}
    targets: List[str] = []
    for sd in state_docs:
        name = sd["name"]
        states.append(name)
        rewards[name] = tuple(
            _parse_rat(r, f"reward of {name!r}") for r in sd.get("rewards", ["0"])
        )
        if sd.get("target", False):
            targets.append(name)

    available: Dict[str, List[str]] = {s: [] for s in states}
    delta: Dict[str, Dict[str, Fraction]] = {}
    for ad in action_docs:
        name, src = ad["name"], ad["from"]
        if src not in available:
            raise ModelError(f"action {name!r} from unknown state {src!r}")
        available[src].append(name)
        delta[name] = {
            t: _parse_rat(p, f"transition {name!r}->{t!r}")
            for t, p in ad["transitions"].items()
        }
    # targets are absorbing by definition; give action-less ones a self-loop
    for t in targets:
        if not available[t]:
            loop = f"stay::{t}"
            available[t].append(loop)
            delta[loop] = {t: Fraction(1)}

    mdp = Mdp(
        states=tuple(states),
        available={s: tuple(a) for s, a in available.items()},
        delta=delta,
        initial=initial,
        rewards=rewards,
        targets=frozenset(targets),
    )
    report = validate(mdp)
    if not report.ok:
        raise ModelError("; ".join(report.problems))
    return mdp


def _reject_float(text: str) -> None:
    raise ModelError(f"floats are rejected; write {text!r} as a rational string 'a/b'")


# ---------------------------------------------------------------------------
# queries


def query_to_json(query: Query) -> str:
    constraints = []
    for c in query.constraints:
        cd: Dict[str, Any] = {"dim": c.dim}
        if c.expectation is not None:
            cd["e"] = _rat_str(c.expectation)
        if c.cvar is not None:
            cd["cvar"] = {"p": _rat_str(c.cvar[0]), "c": _rat_str(c.cvar[1])}
        if c.var is not None:
            cd["var"] = {"q": _rat_str(c.var[0]), "v": _rat_str(c.var[1])}
        constraints.append(cd)
    return _dumps({"objective": query.objective, "constraints": constraints})


def query_from_json(text: str) -> Query:
    try:
        doc = json.loads(text, parse_float=_reject_float)
    except json.JSONDecodeError as exc:
        raise ModelError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict) or "objective" not in doc:
        raise ModelError("query document must be an object with 'objective'")
    constraints = []
    for cd in doc.get("constraints", ()):
        kwargs: Dict[str, Any] = {"dim": int(cd.get("dim", 0))}
        if "e" in cd:
            kwargs["expectation"] = _parse_rat(cd["e"], "e")
        if "cvar" in cd:
            kwargs["cvar"] = (
                _parse_rat(cd["cvar"]["p"], "cvar.p"),
                _parse_rat(cd["cvar"]["c"], "cvar.c"),
            )
        if "var" in cd:
            kwargs["var"] = (
                _parse_rat(cd["var"]["q"], "var.q"),
                _parse_rat(cd["var"]["v"], "var.v"),
            )
        constraints.append(Constraint(**kwargs))
    query = Query(objective=doc["objective"], constraints=tuple(constraints))
    report = validate_query(query, query.dim)
    if not report.ok:
        raise ModelError("; ".join(report.problems))
    return query


# ---------------------------------------------------------------------------
# strategies

# Memory elements and model states may be nested tuples (product
# constructions); encode them structurally so they survive JSON.


def _enc_term(x: Any) -> Any:
    if isinstance(x, tuple):
        return {"t": [_enc_term(e) for e in x]}
    if isinstance(x, (str, int)):
        return x
    raise ModelError(f"cannot serialize term {x!r}")


def _dec_term(obj: Any) -> Any:
    if isinstance(obj, dict):
        return tuple(_dec_term(e) for e in obj["t"])
    return obj


def _term_key(x: Any) -> str:
    return json.dumps(_enc_term(x), sort_keys=True)


def strategy_to_json(strategy: StrategySpec) -> str:
    doc = {
        "memory": [_enc_term(m) for m in strategy.memory],
        "initial_memory": [
            [_enc_term(m), _rat_str(p)]
            for m, p in sorted(strategy.initial_memory.items(), key=lambda kv: _term_key(kv[0]))
        ],
        "next_move": [
            {
                "state": _enc_term(s),
                "memory": _enc_term(m),
                "move": {a: _rat_str(p) for a, p in sorted(move.items())},
            }
            for (s, m), move in sorted(
                strategy.next_move.items(), key=lambda kv: (_term_key(kv[0][0]), _term_key(kv[0][1]))
            )
        ],
        "memory_update": [
            {
                "action": a,
                "state": _enc_term(s),
                "memory": _enc_term(m),
                "dist": [
                    [_enc_term(m2), _rat_str(p)]
                    for m2, p in sorted(dist.items(), key=lambda kv: _term_key(kv[0]))
                ],
            }
            for (a, s, m), dist in sorted(
                strategy.memory_update.items(),
                key=lambda kv: (kv[0][0], _term_key(kv[0][1]), _term_key(kv[0][2])),
            )
        ],
    }
    return _dumps(doc)


def strategy_from_json(text: str) -> StrategySpec:
    try:
        doc = json.loads(text, parse_float=_reject_float)
    except json.JSONDecodeError as exc:
        raise ModelError(f"malformed JSON: {exc}") from exc
    try:
        memory = tuple(_dec_term(m) for m in doc["memory"])
        initial_memory = {
            _dec_term(m): _parse_rat(p, "initial_memory") for m, p in doc["initial_memory"]
        }
        next_move = {
            (_dec_term(nd["state"]), _dec_term(nd["memory"])): {
                a: _parse_rat(p, "next_move") for a, p in nd["move"].items()
            }
            for nd in doc["next_move"]
        }
        memory_update = {
            (ud["action"], _dec_term(ud["state"]), _dec_term(ud["memory"])): {
                _dec_term(m2): _parse_rat(p, "memory_update") for m2, p in ud["dist"]
            }
            for ud in doc.get("memory_update", ())
        }
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"malformed strategy document: {exc}") from exc
    return StrategySpec(
        memory=memory,
        initial_memory=initial_memory,
        next_move=next_move,
        memory_update=memory_update,
    )


# ---------------------------------------------------------------------------
# verdicts / certificates (audit output; one-way)


def _audit(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return _rat_str(obj)
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, FiniteDistribution):
        return {
            "atoms": [[_rat_str(x), _rat_str(p)] for x, p in sorted(obj.atoms.items())]
        }
    if isinstance(obj, StrategySpec):
        return json.loads(strategy_to_json(obj))
    if isinstance(obj, tuple) and hasattr(obj, "_fields"):  # namedtuple
        return {f: _audit(getattr(obj, f)) for f in obj._fields}
    if hasattr(obj, "marginals"):  # PayoffLaw
        return [_audit(m) for m in obj.marginals]
    if isinstance(obj, Mapping):
        return [[_audit(k), _audit(v)] for k, v in sorted(obj.items(), key=lambda kv: repr(kv[0]))]
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj, key=repr) if isinstance(obj, (set, frozenset)) else obj
        return [_audit(x) for x in items]
    if hasattr(obj, "__dataclass_fields__"):
        return {f: _audit(getattr(obj, f)) for f in obj.__dataclass_fields__}
    return repr(obj)


def verdict_to_json(verdict: Verdict) -> str:
    doc = {
        "status": verdict.status,
        "witness": json.loads(strategy_to_json(verdict.witness)) if verdict.witness else None,
        "certificate": _audit(verdict.certificate),
    }
    return _dumps(doc)


# ---------------------------------------------------------------------------
# DIMACS CNF


def parse_dimacs(text: str):
    """Parse DIMACS CNF into (num_vars, clauses)."""
    num_vars: Optional[int] = None
    clauses: List[Tuple[int, ...]] = []
    current: List[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith(("c", "%")):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ModelError(f"bad problem line: {line!r}")
            num_vars = int(parts[2])
            continue
        for token in line.split():
            lit = int(token)
            if lit == 0:
                if current:
                    clauses.append(tuple(current))
                    current = []
            else:
                current.append(lit)
    if current:
        clauses.append(tuple(current))
    if num_vars is None:
        num_vars = max((abs(l) for cl in clauses for l in cl), default=1)
    return num_vars, tuple(clauses)


def write_dimacs(num_vars: int, clauses: Sequence[Sequence[int]]) -> str:
    lines = [f"p cnf {num_vars} {len(clauses)}"]
    for clause in clauses:
        lines.append(" ".join(str(l) for l in clause) + " 0")
    return "\n".join(lines) + "\n"
