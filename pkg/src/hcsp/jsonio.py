"""JSON encoding of bases, signatures, instances, witnesses and verdicts.

Shapes::

    base      {"kind": "henson", "n": 3} | {"kind": "equiv", "n": "omega", "s": 2} | {"kind": "equality"}
    signature {"base": base, "relations": [relation, ...]}
    relation  {"name": "R", "arity": 4, "formula": "!E(1,2)|E(3,4)"}
              or {"name": "R", "arity": 2, "types": ["E", "N"]}
    instance  {"variables": ["x", "y"], "constraints": [{"rel": "R", "vars": ["x", "y"]}]}
    witness   {"variables": [...], "entries": "EN="}  entries row-major over i<j
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .core import (OMEGA, BaseStructure, Constraint, Instance, OrbitRelation, ParseError, Signature,
                   SolveResult, TypeMatrix)
from .formula import compile_formula
from .gadgets import OneInThreeFormula

__all__ = [
    "base_from_json", "base_to_json", "relation_from_json", "relation_to_json",
    "signature_from_json", "signature_to_json", "instance_from_json", "instance_to_json",
    "witness_to_json", "witness_from_json", "result_to_json", "formula_from_json", "load_json", "dumps",
]


def _param(x: Any) -> float:
    if x in ("omega", "w", "inf"):
        return OMEGA
    if isinstance(x, bool) or not isinstance(x, int):
        raise ParseError(f"base parameter must be an integer or 'omega', got {x!r}")
    return x


def _param_out(x: float) -> int | str:
    return "omega" if x == OMEGA else int(x)


def _need(obj: Any, key: str, kind: type | tuple[type, ...], where: str) -> Any:
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"{where}: missing {key!r}")
    value = obj[key]
    if not isinstance(value, kind):
        raise ParseError(f"{where}: {key!r} has the wrong type")
    return value


def base_from_json(obj: Any) -> BaseStructure:
    kind = _need(obj, "kind", str, "base")
    if kind == "henson":
        return BaseStructure.henson(_param(_need(obj, "n", (int, str), "base")))
    if kind == "equiv":
        return BaseStructure.equiv(_param(_need(obj, "n", (int, str), "base")),
                                   _param(_need(obj, "s", (int, str), "base")))
    if kind == "equality":
        return BaseStructure.equality()
    raise ParseError(f"unknown base kind {kind!r}")


def base_to_json(base: BaseStructure) -> dict:
    if base.kind == "henson":
        return {"kind": "henson", "n": int(base.n)}
    if base.kind == "equiv":
        return {"kind": "equiv", "n": _param_out(base.n), "s": _param_out(base.s)}
    return {"kind": "equality"}


def relation_from_json(obj: Any, base: BaseStructure) -> OrbitRelation:
    name = _need(obj, "name", str, "relation")
    arity = _need(obj, "arity", int, f"relation {name}")
    if "formula" in obj:
        return compile_formula(_need(obj, "formula", str, f"relation {name}"), arity, base, name,
                               cap=max(arity, 6))
    rows = _need(obj, "types", list, f"relation {name}")
    types = frozenset(TypeMatrix.from_string(arity, row) for row in rows)
    return OrbitRelation(name, arity, types, base)


def relation_to_json(rel: OrbitRelation) -> dict:
    return {"name": rel.name, "arity": rel.arity, "types": [t.to_string() for t in rel.sorted_types]}


def signature_from_json(obj: Any) -> Signature:
    base = base_from_json(_need(obj, "base", dict, "signature"))
    rels = tuple(relation_from_json(r, base) for r in _need(obj, "relations", list, "signature"))
    return Signature(base, rels)


def signature_to_json(sig: Signature) -> dict:
    return {"base": base_to_json(sig.base), "relations": [relation_to_json(r) for r in sig.relations]}


def instance_from_json(obj: Any) -> Instance:
    variables = _need(obj, "variables", list, "instance")
    constraints = []
    for c in _need(obj, "constraints", list, "instance"):
        rel = _need(c, "rel", str, "constraint")
        constraints.append(Constraint(rel, tuple(_need(c, "vars", list, f"constraint {rel}"))))
    return Instance(tuple(variables), tuple(constraints))


def instance_to_json(inst: Instance) -> dict:
    return {"variables": list(inst.variables),
            "constraints": [{"rel": c.rel, "vars": list(c.vars)} for c in inst.constraints]}


def witness_to_json(inst: Instance, witness: TypeMatrix) -> dict:
    return {"variables": list(inst.variables), "entries": witness.to_string()}


def witness_from_json(obj: Any) -> tuple[tuple[str, ...], TypeMatrix]:
    variables = tuple(_need(obj, "variables", list, "witness"))
    return variables, TypeMatrix.from_string(len(variables), _need(obj, "entries", str, "witness"))


def result_to_json(inst: Instance, result: SolveResult) -> dict:
    out: dict[str, Any] = {"status": result.status, "solver": result.solver}
    if result.reason:
        out["reason"] = result.reason
    if result.witness is not None:
        out["witness"] = witness_to_json(inst, result.witness)
    return out


def formula_from_json(obj: Any) -> OneInThreeFormula:
    variables = tuple(_need(obj, "variables", list, "formula"))
    clauses = tuple(tuple(c) for c in _need(obj, "clauses", list, "formula"))
    return OneInThreeFormula(variables, clauses)


def load_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)
