"""Brute-force satisfiability over small models, and seeded generators.

A primitive positive sentence holds in a universal homogeneous base iff some
valid type on the sentence's variables satisfies every constraint, so the
search ranges over types of the instance's variable tuple.
"""

from __future__ import annotations

import os
import random
from typing import Sequence

from .behaviours import Behaviour
from .behaviours import close_under as _closure
from .core import (DEFAULT_TYPE_CAP, EQ, E, N, BaseStructure, CapExceeded, Constraint, Instance,
                   OrbitRelation, Signature, SolveResult, TypeMatrix, enumerate_types, pair_index)
from .search import PairSearch, PrefixCheck

__all__ = ["DEFAULT_ORACLE_CAP", "oracle_cap", "oracle_solve", "random_instance", "random_relation"]

DEFAULT_ORACLE_CAP = 10


def oracle_cap() -> int:
    """Variable bound for the oracle; the HCSP_CAP environment variable overrides it."""
    raw = os.environ.get("HCSP_CAP")
    return int(raw) if raw else DEFAULT_ORACLE_CAP


def _constraint_rows(rel: OrbitRelation, pos: Sequence[int], k: int) -> tuple[list[int], set[tuple[int, ...]]]:
    """Variable-pair positions touched by a constraint and the value rows it allows."""
    idx = pair_index(k)
    targets: list[int] = []
    where: list[int | None] = []
    for a in range(len(pos)):
        for b in range(a + 1, len(pos)):
            u, w = pos[a], pos[b]
            if u == w:
                where.append(None)
                continue
            q = idx[u][w]
            if q not in targets:
                targets.append(q)
            where.append(targets.index(q))
    rows = set()
    for t in rel.types:
        row: list[int] = [-1] * len(targets)
        ok = True
        for value, slot in zip(t.entries, where):
            if slot is None:
                if value != EQ:
                    ok = False
                    break
            elif row[slot] < 0:
                row[slot] = value
            elif row[slot] != value:
                ok = False
                break
        if ok:
            rows.add(tuple(row))
    return targets, rows


def oracle_solve(sig: Signature, inst: Instance, cap: int | None = None) -> SolveResult:
    """Exhaustive search for a valid type of the variables meeting all constraints."""
    cap = oracle_cap() if cap is None else cap
    k = len(inst.variables)
    if k > cap:
        raise CapExceeded(f"{k} variables exceed oracle cap {cap}")
    inst.check(sig)
    prepared = []
    for c in inst.constraints:
        targets, rows = _constraint_rows(sig[c.rel], inst.positions(c), k)
        if not rows:
            return SolveResult("UNSAT", solver="oracle", reason=f"constraint {c.rel}{c.vars} is empty")
        prepared.append((len(rows), targets, rows))

    # constrained pairs first, tightest constraints first, then the rest
    order: list[int] = []
    placed = set()
    for _, targets, _ in sorted(prepared, key=lambda x: x[0]):
        for q in targets:
            if q not in placed:
                placed.add(q)
                order.append(q)
    order.extend(q for q in range(k * (k - 1) // 2) if q not in placed)
    step = {q: s for s, q in enumerate(order)}

    checks = []
    for _, targets, rows in prepared:
        if not targets:
            continue
        perm = sorted(range(len(targets)), key=lambda i: step[targets[i]])
        pairs = [targets[i] for i in perm]
        checks.append(PrefixCheck.from_rows(pairs, (tuple(r[i] for i in perm) for r in rows)))
    search = PairSearch(k, sig.base, order=order, checks=checks, values=_value_order(sig.base))
    found = search.first()
    if found is None:
        return SolveResult("UNSAT", solver="oracle", reason=f"exhausted {search.nodes} nodes")
    return SolveResult("SAT", TypeMatrix(k, found), solver="oracle")


def _value_order(base: BaseStructure) -> tuple[int, ...]:
    # N rarely closes a forbidden configuration, so try it first
    return (N, EQ) if base.kind == "equality" else (N, E, EQ)


def random_instance(sig: Signature, vars: int, cons: int, seed: int) -> Instance:
    """Seeded instance: relation names and variable tuples chosen uniformly."""
    if vars < 0 or cons < 0:
        raise ValueError("counts must be non-negative")
    rng = random.Random(seed)
    names = [f"x{i}" for i in range(vars)]
    rels = sorted(sig.relations, key=lambda r: r.name)
    constraints = []
    if names and rels:
        for _ in range(cons):
            rel = rng.choice(rels)
            constraints.append(Constraint(rel.name, tuple(rng.choice(names) for _ in range(rel.arity))))
    return Instance(tuple(names), tuple(constraints))


def random_relation(base: BaseStructure, k: int, seed: int, close_under: Behaviour | None = None,
                    name: str = "R", cap: int = DEFAULT_TYPE_CAP) -> OrbitRelation:
    """Seeded nonempty set of types, optionally closed under a behaviour."""
    universe = enumerate_types(k, base, cap)
    rng = random.Random(seed)
    size = rng.randint(1, max(1, min(len(universe), 1 + len(universe) // 4)))
    chosen = set(rng.sample(universe, size))
    if close_under is not None:
        chosen = _closure(close_under, chosen, base)
    return OrbitRelation(name, k, frozenset(chosen), base)
