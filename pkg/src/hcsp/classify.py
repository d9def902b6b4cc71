"""Complexity classification of constraint languages over the supported bases.

Each base has a fixed decision tree. Tractability tests try the behaviours
that come with a solver first, then unary behaviours that collapse the
structure onto its equality pattern, and the remaining case is NP-complete.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .behaviours import (B_CLIQUECOL, B_CONST, B_EDGEDEL, B_EQMEET, B_H3, B_MIN, B_QUOTIENT, B_XNOR3,
                         Behaviour, preservation_counterexample, realizability_counterexample,
                         unary_behaviours)
from .core import (OMEGA, E, N, BaseStructure, HcspError, OrbitRelation, Signature, all_eq_type,
                   skeleton)

__all__ = ["Verdict", "classify", "classify_equality", "collapse_equality", "NotPreserved",
           "COLLAPSES", "collapse_image_infinite", "lift_value"]


class NotPreserved(HcspError, ValueError):
    pass


@dataclass
class Verdict:
    """``outcome`` is P, NPC or DELEGATED.

    For P the witness names the solver and behaviour (plus the collapse
    behaviour when solving goes through the equality pattern); for NPC it
    carries a hardness label; for DELEGATED a reason and the residual
    structure.
    """

    outcome: str
    witness: dict[str, Any]
    trail: list[dict[str, str]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"outcome": self.outcome, "witness": self.witness, "trail": self.trail}


COLLAPSES = (B_EDGEDEL, B_CLIQUECOL, B_QUOTIENT, B_CONST)

# what a "distinct" pair of the equality pattern becomes when lifted back
_LIFT = {"B_edgedel": N, "B_cliquecol": E, "B_quotient": N, "B_const": N}


def lift_value(collapse: str) -> int:
    return _LIFT[collapse]


def collapse_image_infinite(b: Behaviour, base: BaseStructure) -> bool:
    if b is B_CONST:
        return False
    if b is B_QUOTIENT:
        return base.kind == "henson" or base.n == OMEGA
    return True


class _Trail:
    def __init__(self):
        self.entries: list[dict[str, str]] = []

    def add(self, test: str, result: str, detail: str = "") -> None:
        entry = {"test": test, "result": result}
        if detail:
            entry["detail"] = detail
        self.entries.append(entry)


def _fmt_counterexample(found) -> str:
    inputs, output = found
    return ", ".join(t.to_string() or "()" for t in inputs) + " -> " + (output.to_string() or "()")


def _holds_everywhere(b: Behaviour, sig: Signature, trail: _Trail, nonempty_only: bool = False) -> bool:
    """Realizability over the base, then preservation of every relation."""
    bad = realizability_counterexample(b, sig.base)
    if bad is not None:
        trail.add(f"{b.name} realizable over {sig.base}", "no", _fmt_counterexample(bad))
        return False
    for rel in sorted(sig.relations, key=lambda r: r.name):
        if nonempty_only and not rel.types:
            continue
        found = preservation_counterexample(b, rel)
        if found is not None:
            trail.add(f"{b.name} preserves all relations", "no", f"{rel.name}: {_fmt_counterexample(found)}")
            return False
    trail.add(f"{b.name} preserves all relations", "yes")
    return True


def collapse_equality(sig: Signature, b: Behaviour) -> Signature:
    """Replace each relation by the equality patterns of its images under ``b``."""
    if realizability_counterexample(b, sig.base) is not None:
        raise NotPreserved(f"{b.name} is not realizable over {sig.base}")
    target = BaseStructure.equality()
    rels = []
    for rel in sig.relations:
        found = preservation_counterexample(b, rel)
        if found is not None:
            raise NotPreserved(f"{b.name} does not preserve {rel.name}: {_fmt_counterexample(found)}")
        images = frozenset(skeleton(t.map_entries(b)) for t in rel.types)
        rels.append(OrbitRelation(rel.name, rel.arity, images, target))
    return Signature(target, tuple(rels))


def classify_equality(sig: Signature, trail: _Trail | None = None) -> Verdict:
    """Classification of a language over the pure equality base."""
    if sig.base.kind != "equality":
        raise ValueError("classify_equality needs the equality base")
    trail = trail or _Trail()
    missing = [r.name for r in sig.relations if r.types and all_eq_type(r.arity) not in r.types]
    if not missing:
        trail.add("every nonempty relation contains the all-equal type", "yes")
        return Verdict("P", {"solver": "trivial", "behaviour": B_CONST.name}, trail.entries)
    trail.add("every nonempty relation contains the all-equal type", "no", f"missing in {missing[0]}")
    if _holds_everywhere(B_EQMEET, sig, trail):
        return Verdict("P", {"solver": "horn", "behaviour": B_EQMEET.name}, trail.entries)
    return Verdict("NPC", {"label": "equality-hard"}, trail.entries)


def _try_collapses(sig: Signature, trail: _Trail) -> Verdict | None:
    trail.add("collapse detection", "best-effort", "only order-free unary behaviours are tried")
    delegated: Behaviour | None = None
    for b in COLLAPSES:
        if not _holds_everywhere(b, sig, trail, nonempty_only=b is B_CONST):
            continue
        if b is B_CONST:
            return Verdict("P", {"solver": "trivial", "behaviour": B_CONST.name}, trail.entries)
        if not collapse_image_infinite(b, sig.base):
            trail.add(f"{b.name} image", "finite", f"{sig.base.n} points")
            delegated = delegated or b
            continue
        collapsed = collapse_equality(sig, b)
        trail.add(f"collapse via {b.name}", "done", "classifying the equality pattern")
        inner = classify_equality(collapsed, trail)
        if inner.outcome == "P":
            inner.witness = {**inner.witness, "collapse": b.name}
        return inner
    if delegated is not None:
        residual = {rel.name: sorted(skeleton(t.map_entries(delegated)).to_string() for t in rel.types)
                    for rel in sig.relations}
        return Verdict("DELEGATED", {
            "reason": f"{delegated.name} collapses onto a finite structure with {sig.base.n} elements",
            "collapse": delegated.name, "residual": residual}, trail.entries)
    return None


def _deep_report(sig: Signature, trail: _Trail) -> None:
    for b in unary_behaviours():
        quiet = _Trail()
        ok = _holds_everywhere(b, sig, quiet)
        trail.add(f"deep: {b.name}", "preserves" if ok else "fails")


def classify(sig: Signature, deep: bool = False) -> Verdict:
    """Decide P or NP-complete for CSP(sig), or DELEGATED when the answer is out of scope."""
    base = sig.base
    trail = _Trail()
    trail.add("base", str(base))
    if deep:
        _deep_report(sig, trail)
    if base.kind == "equality":
        return classify_equality(sig, trail)
    if base.kind == "henson":
        if _holds_everywhere(B_MIN, sig, trail):
            return Verdict("P", {"solver": "horn", "behaviour": B_MIN.name}, trail.entries)
        verdict = _try_collapses(sig, trail)
        return verdict or Verdict("NPC", {"label": "henson-hard"}, trail.entries)
    if base.n == 2 and base.s == OMEGA:
        if _holds_everywhere(B_XNOR3, sig, trail):
            return Verdict("P", {"solver": "c2w_minority", "behaviour": B_XNOR3.name}, trail.entries)
        verdict = _try_collapses(sig, trail)
        return verdict or Verdict("NPC", {"label": "c2w-hard"}, trail.entries)
    if base.n == OMEGA and base.s == 2:
        if _holds_everywhere(B_MIN, sig, trail):
            return Verdict("P", {"solver": "horn", "behaviour": B_MIN.name}, trail.entries)
        if _holds_everywhere(B_H3, sig, trail):
            return Verdict("P", {"solver": "cw2_parity", "behaviour": B_H3.name}, trail.entries)
        verdict = _try_collapses(sig, trail)
        return verdict or Verdict("NPC", {"label": "cw2-hard"}, trail.entries)
    verdict = _try_collapses(sig, trail)
    return verdict or Verdict("NPC", {"label": "finite-class-hard"}, trail.entries)
