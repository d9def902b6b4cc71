"""Bundled relations and signatures used by the self-test and the examples."""

from __future__ import annotations

from functools import lru_cache

from .core import OMEGA, BaseStructure, OrbitRelation, Signature
from .formula import compile_formula
from .gadgets import h_formula, relation_H

__all__ = ["A_FORMULA", "XOR_PATTERN", "corpus_relations", "catalog_cases", "horn_signature",
           "parity_signature", "minority_signature"]

# guard on three same-class pairs, then an odd number of them are distinct
A_FORMULA = ("!(Eq(1,2)&Eq(3,4)&Eq(5,6)) | (neq(1,2)&eq(3,4)&eq(5,6)) | (eq(1,2)&neq(3,4)&eq(5,6))"
             " | (eq(1,2)&eq(3,4)&neq(5,6)) | (neq(1,2)&neq(3,4)&neq(5,6))")
XOR_PATTERN = "(eq(1,2)&neq(3,4))|(neq(1,2)&eq(3,4))"

_COMMON = [
    ("eq", 2, "eq(1,2)"),
    ("neq", 2, "neq(1,2)"),
    ("full2", 2, "true"),
    ("empty2", 2, "false"),
    ("xor", 4, XOR_PATTERN),
    ("eq_or_neq", 4, "eq(1,2)|neq(3,4)"),
    ("neq3", 3, "neq(1,2)&neq(2,3)&neq(1,3)"),
]

_GRAPH = [
    ("E", 2, "E(1,2)"),
    ("N", 2, "N(1,2)"),
    ("Ehat", 2, "!E(1,2)"),
    ("impl", 4, "!E(1,2)|E(3,4)"),
    ("or", 4, "E(1,2)|E(3,4)"),
    ("nand", 4, "!E(1,2)|!E(3,4)"),
    ("path", 3, "E(1,2)&E(2,3)"),
    ("impl_eq", 4, "!E(1,2)|eq(3,4)"),
    ("e_or_eq", 2, "E(1,2)|eq(1,2)"),
    ("n_or_eq", 2, "N(1,2)|eq(1,2)"),
    ("two_e", 3, "!E(1,2)|!E(1,3)|E(2,3)|eq(2,3)"),
]

_CLASSES = [
    ("Eq", 2, "Eq(1,2)"),
    ("Eq_or", 4, "Eq(1,2)|Eq(3,4)"),
    ("Eq_impl", 4, "N(1,2)|Eq(3,4)"),
    ("same_pattern", 4, "(E(1,2)&E(3,4))|(N(1,2)&N(3,4))"),
    ("split", 3, "E(1,2)&N(2,3)"),
]


@lru_cache(maxsize=None)
def _corpus(base: BaseStructure) -> tuple[OrbitRelation, ...]:
    specs = list(_COMMON)
    if base.kind == "henson":
        specs += _GRAPH
    elif base.kind == "equiv":
        specs += _GRAPH + _CLASSES
        if base.n == OMEGA and base.s == 2:
            specs.append(("A", 6, A_FORMULA))
    rels = [compile_formula(f, k, base, name) for name, k, f in specs]
    if base.kind == "henson":
        rels.append(relation_H(base.n))
        rels.append(compile_formula(h_formula(), 6, base, "H_formula"))
    return tuple(r for r in rels if r.types or r.name == "empty2")


def corpus_relations(base: BaseStructure) -> tuple[OrbitRelation, ...]:
    """Named relations over ``base``; relations that come out empty are skipped except ``empty2``."""
    return _corpus(base)


def _sig(base: BaseStructure, *named: tuple[str, int, str]) -> Signature:
    return Signature(base, tuple(compile_formula(f, k, base, name) for name, k, f in named))


def horn_signature(base: BaseStructure) -> Signature:
    """A min-preserved language used for scale tests."""
    return _sig(base, ("E", 2, "E(1,2)"), ("impl", 4, "!E(1,2)|E(3,4)"), ("neq", 2, "neq(1,2)"),
                ("eq", 2, "eq(1,2)"))


def parity_signature() -> Signature:
    base = BaseStructure.equiv(OMEGA, 2)
    return _sig(base, ("Eq", 2, "Eq(1,2)"), ("neq", 2, "neq(1,2)"), ("A", 6, A_FORMULA))


def minority_signature() -> Signature:
    base = BaseStructure.equiv(2, OMEGA)
    return _sig(base, ("E", 2, "E(1,2)"), ("N", 2, "N(1,2)"), ("neq", 2, "neq(1,2)"),
                ("same_pattern", 4, "(E(1,2)&E(3,4))|(N(1,2)&N(3,4))"))


def catalog_cases() -> list[tuple[str, Signature, str]]:
    """Languages with known verdicts: (label, signature, expected outcome)."""
    cases = []
    for n in (3, 4):
        h = BaseStructure.henson(n)
        cases.append((f"henson({n}); E, N, H", Signature(h, (
            compile_formula("E(1,2)", 2, h, "E"), compile_formula("N(1,2)", 2, h, "N"), relation_H(n))), "NPC"))
    for n in (3, 4):
        h = BaseStructure.henson(n)
        cases.append((f"henson({n}); E, !E|E", _sig(h, ("E", 2, "E(1,2)"), ("R", 4, "!E(1,2)|E(3,4)")), "P"))
    for n in (3, 4):
        h = BaseStructure.henson(n)
        cases.append((f"henson({n}); E|E", _sig(h, ("R", 4, "E(1,2)|E(3,4)")), "NPC"))
    cases.append(("equiv(omega,2); Eq, A", Signature(parity_signature().base, tuple(
        r for r in parity_signature().relations if r.name in ("Eq", "A"))), "P"))
    cases.append(("henson(3); x=y", _sig(BaseStructure.henson(3), ("eq", 2, "eq(1,2)")), "P"))
    cases.append(("equality; xor pattern", _sig(BaseStructure.equality(), ("X", 4, XOR_PATTERN)), "NPC"))
    return cases
