"""The exactly-one-edge relation H and the positive 1-in-3-SAT reduction to it."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import E, N, BaseStructure, Constraint, Instance, OrbitRelation, Signature, TypeMatrix, pair_list

__all__ = ["BLOCKS", "relation_H", "h_formula", "h_signature", "OneInThreeFormula", "reduce_1in3",
           "one_in_three_satisfiable"]

# 0-based position pairs of the three blocks
BLOCKS = ((0, 1), (2, 3), (4, 5))


def relation_H(n: int = 3) -> OrbitRelation:
    """Arity 6 over henson(n): exactly one block is an edge, every other pair is N."""
    base = BaseStructure.henson(n)
    types = []
    for chosen in BLOCKS:
        types.append(TypeMatrix(6, tuple(E if p == chosen else N for p in pair_list(6))))
    return OrbitRelation("H", 6, frozenset(types), base)


def h_formula() -> str:
    """Formula text defining H, for cross-checking the direct construction."""
    cross = [f"N({i + 1},{j + 1})" for i, j in pair_list(6) if (i, j) not in BLOCKS]
    cases = []
    for chosen in BLOCKS:
        block = [f"{'E' if b == chosen else 'N'}({b[0] + 1},{b[1] + 1})" for b in BLOCKS]
        cases.append("(" + "&".join(block) + ")")
    return "(" + " | ".join(cases) + ")&" + "&".join(cross)


def h_signature(n: int = 3) -> Signature:
    rel = relation_H(n)
    return Signature(rel.base, (rel,))


@dataclass(frozen=True)
class OneInThreeFormula:
    variables: tuple[str, ...]
    clauses: tuple[tuple[str, str, str], ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        known = set(self.variables)
        if len(known) != len(self.variables):
            raise ValueError("formula variables must be distinct")
        for c in self.clauses:
            if len(c) != 3 or len(set(c)) != 3:
                raise ValueError(f"clause {c} must list three distinct variables")
            if not set(c) <= known:
                raise ValueError(f"clause {c} uses an undeclared variable")


def reduce_1in3(f: OneInThreeFormula) -> Instance:
    """Variable v becomes the pair (v, v'); v is true iff that pair is an edge."""
    names = []
    for v in f.variables:
        names.extend((v, v + "'"))
    constraints = tuple(Constraint("H", tuple(x for v in c for x in (v, v + "'"))) for c in f.clauses)
    return Instance(tuple(names), constraints)


def one_in_three_satisfiable(f: OneInThreeFormula) -> bool:
    for values in itertools.product((False, True), repeat=len(f.variables)):
        truth = dict(zip(f.variables, values))
        if all(sum(truth[v] for v in c) == 1 for c in f.clauses):
            return True
    return False
