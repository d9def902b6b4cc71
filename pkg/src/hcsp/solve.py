"""Solver dispatch: classify, run the matching polynomial solver, verify the witness."""

from __future__ import annotations

import dataclasses

from .affine import solve_c2w_minority, solve_cw2_parity
from .behaviours import behaviour_catalog
from .classify import Verdict, classify, collapse_equality, lift_value
from .core import (EQ, Instance, InvariantBreach, Signature, SolveResult, TypeMatrix, all_eq_type,
                   check_witness)
from .horn import horn_solve
from .oracle import oracle_solve

__all__ = ["SOLVERS", "solve", "solve_trivial", "run_solver"]


def solve_trivial(sig: Signature, inst: Instance) -> SolveResult:
    """For languages where every nonempty relation contains the all-equal type."""
    inst.check(sig)
    for c in inst.constraints:
        rel = sig[c.rel]
        if not rel.types:
            return SolveResult("UNSAT", solver="trivial", reason=f"relation {c.rel} is empty")
        if all_eq_type(rel.arity) not in rel.types:
            raise InvariantBreach(f"trivial solver used on {c.rel}, which lacks the all-equal type")
    return SolveResult("SAT", all_eq_type(len(inst.variables)), solver="trivial")


SOLVERS = {
    "horn": horn_solve,
    "c2w_minority": solve_c2w_minority,
    "cw2_parity": solve_cw2_parity,
    "trivial": solve_trivial,
    "oracle": oracle_solve,
}


def run_solver(name: str, sig: Signature, inst: Instance, cap: int | None = None) -> SolveResult:
    try:
        fn = SOLVERS[name]
    except KeyError:
        raise ValueError(f"unknown solver {name!r}; choose from {sorted(SOLVERS)}") from None
    if fn is oracle_solve:
        return oracle_solve(sig, inst, cap)
    return fn(sig, inst)


def _verified(sig: Signature, inst: Instance, result: SolveResult) -> SolveResult:
    if result.sat:
        problems = check_witness(sig, inst, result.witness)
        if problems:
            raise InvariantBreach(f"{result.solver} returned a bad witness: {problems[0]}")
    return result


def _solve_collapsed(sig: Signature, inst: Instance, verdict: Verdict) -> SolveResult:
    collapse = behaviour_catalog()[verdict.witness["collapse"]]
    inner = run_solver(verdict.witness["solver"], collapse_equality(sig, collapse), inst)
    if not inner.sat:
        return SolveResult("UNSAT", solver=f"{inner.solver}+{collapse.name}", reason=inner.reason)
    distinct = lift_value(collapse.name)
    lifted = TypeMatrix(inner.witness.arity, tuple(EQ if v == EQ else distinct for v in inner.witness.entries))
    return SolveResult("SAT", lifted, solver=f"{inner.solver}+{collapse.name}")


def solve(sig: Signature, inst: Instance, solver: str = "auto", verdict: Verdict | None = None,
          cap: int | None = None) -> SolveResult:
    """Decide ``inst``.

    ``auto`` classifies first and uses the verdict's solver; languages
    without one (NP-complete or delegated) fall back to the oracle, whose
    variable cap then applies. Any SAT witness is re-checked before returning.
    """
    inst.check(sig)
    if solver != "auto":
        return _verified(sig, inst, run_solver(solver, sig, inst, cap))
    verdict = verdict or classify(sig)
    if verdict.outcome != "P":
        result = oracle_solve(sig, inst, cap)
        note = f"language is {verdict.outcome}; answered by the oracle"
        return _verified(sig, inst, dataclasses.replace(result, reason=f"{note}; {result.reason}" if result.reason else note))
    if "collapse" in verdict.witness:
        return _verified(sig, inst, _solve_collapsed(sig, inst, verdict))
    return _verified(sig, inst, run_solver(verdict.witness["solver"], sig, inst))
