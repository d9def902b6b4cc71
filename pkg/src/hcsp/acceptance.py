"""Acceptance suite: each check prints one PASS/FAIL line and returns its result."""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Callable

from .affine import compile_parity, solve_c2w_minority, solve_cw2_parity
from .behaviours import (B_CLIQUECOL, B_EQMEET, B_H3, B_MAJ, B_MIN, B_MINORITY_FRAGMENT, B_XNOR3,
                         Behaviour, preserves, realizable)
from .classify import classify
from .core import OMEGA, BaseStructure, Instance, Signature, SolveResult, check_witness
from .corpus import catalog_cases, corpus_relations, horn_signature, parity_signature
from .gadgets import OneInThreeFormula, h_signature, one_in_three_satisfiable, reduce_1in3
from .gf2 import Gf2System, Inconsistent, affine_hull, gf2_solve
from .horn import Inexact, compile_horn, horn_solve
from .oracle import oracle_solve, random_instance, random_relation
from .solve import solve

__all__ = ["CheckResult", "run_all", "CHECKS"]


@dataclass
class CheckResult:
    key: str
    title: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} [{self.key}] {self.title}: {self.detail} ({self.seconds:.2f}s)"


@dataclass
class _Witnesses:
    checked: int = 0
    bad: list[str] = field(default_factory=list)

    def verify(self, sig: Signature, inst: Instance, result: SolveResult, label: str) -> None:
        if not result.sat:
            return
        self.checked += 1
        problems = check_witness(sig, inst, result.witness)
        if problems:
            self.bad.append(f"{label}: {problems[0]}")


def _random_signature(base: BaseStructure, behaviour: Behaviour, rng: random.Random,
                      extra=(), max_arity: int = 4) -> Signature:
    rels = list(extra)
    for j in range(rng.randint(1, 3)):
        k = rng.randint(2, max_arity)
        rels.append(random_relation(base, k, rng.randrange(2 ** 32), close_under=behaviour, name=f"R{j}"))
    return Signature(base, tuple(rels))


def _equivalence(solver: Callable, base: BaseStructure, behaviour: Behaviour, count: int, seed: int,
                 witnesses: _Witnesses, label: str, extra=(), max_vars: int = 6) -> tuple[int, int, list[str]]:
    sat = 0
    mismatches = []
    for i in range(count):
        rng = random.Random(seed * 100_003 + i)
        sig = _random_signature(base, behaviour, rng, extra)
        inst = random_instance(sig, rng.randint(1, max_vars), rng.randint(1, 5), rng.randrange(2 ** 32))
        got = solver(sig, inst)
        want = oracle_solve(sig, inst)
        witnesses.verify(sig, inst, got, f"{label} #{i}")
        witnesses.verify(sig, inst, want, f"oracle {label} #{i}")
        sat += want.sat
        if got.status != want.status:
            mismatches.append(f"{label} #{i}")
    return sat, count, mismatches


def check_catalog(w: _Witnesses) -> tuple[bool, str]:
    cases = catalog_cases()
    wrong = []
    for label, sig, expected in cases:
        got = classify(sig).outcome
        if got != expected:
            wrong.append(f"{label} gave {got}, expected {expected}")
    return not wrong, f"{len(cases) - len(wrong)}/{len(cases)} verdicts match" + (f"; {wrong[0]}" if wrong else "")


def check_horn(w: _Witnesses) -> tuple[bool, str]:
    bases = [BaseStructure.henson(3), BaseStructure.henson(4), BaseStructure.equiv(OMEGA, 2)]
    total = sat = 0
    bad: list[str] = []
    for b, base in enumerate(bases):
        s, n, mm = _equivalence(horn_solve, base, B_MIN, 200, 20 + b, w, f"horn {base}")
        total, sat, bad = total + n, sat + s, bad + mm
    return not bad, f"{total - len(bad)}/{total} agree with the oracle ({sat} SAT)" + (f"; first miss {bad[0]}" if bad else "")


def check_affine(w: _Witnesses) -> tuple[bool, str]:
    c2w = BaseStructure.equiv(2, OMEGA)
    s1, n1, bad1 = _equivalence(solve_c2w_minority, c2w, B_XNOR3, 500, 30, w, "c2w")
    fixed = parity_signature().relations
    s2, n2, bad2 = _equivalence(solve_cw2_parity, BaseStructure.equiv(OMEGA, 2), B_H3, 500, 31, w, "cw2",
                                extra=fixed, max_vars=7)
    bad = bad1 + bad2
    detail = (f"minority {n1 - len(bad1)}/{n1} ({s1} SAT), parity {n2 - len(bad2)}/{n2} ({s2} SAT)"
              + (f"; first miss {bad[0]}" if bad else ""))
    return not bad, detail


def _formulas(max_vars: int, max_clauses: int):
    for nv in range(max_vars + 1):
        names = tuple("uvwx"[:nv]) if nv <= 4 else tuple(f"v{i}" for i in range(nv))
        triples = list(itertools.permutations(names, 3))
        for m in range(max_clauses + 1):
            for clauses in itertools.combinations_with_replacement(triples, m):
                yield OneInThreeFormula(names, clauses)


def check_gadget(w: _Witnesses) -> tuple[bool, str]:
    sig = h_signature(3)
    total = sat = 0
    bad = []
    for f in _formulas(4, 3):
        inst = reduce_1in3(f)
        got = oracle_solve(sig, inst)
        w.verify(sig, inst, got, f"gadget {f.clauses}")
        want = one_in_three_satisfiable(f)
        total += 1
        sat += want
        if got.sat != want:
            bad.append(str(f.clauses))
    # every three-clause formula on four variables is satisfiable, so add the smallest unsatisfiable one
    k4 = OneInThreeFormula(tuple("uvwx"), tuple(itertools.combinations("uvwx", 3)))
    extra_ok = oracle_solve(sig, reduce_1in3(k4)).sat == one_in_three_satisfiable(k4) == False  # noqa: E712
    detail = f"{total - len(bad)}/{total} formulas agree ({sat} satisfiable); four-clause unsatisfiable check {'ok' if extra_ok else 'failed'}"
    return not bad and extra_ok, detail


def check_compilers(w: _Witnesses) -> tuple[bool, str]:
    horn_bases = [BaseStructure.henson(3), BaseStructure.henson(4), BaseStructure.equiv(OMEGA, 2),
                  BaseStructure.equality()]
    compiled = 0
    bad = []
    for base in horn_bases:
        meet = B_EQMEET if base.kind == "equality" else B_MIN
        for rel in corpus_relations(base):
            if preserves(meet, rel):
                try:
                    compile_horn(rel)
                    compiled += 1
                except Inexact as exc:
                    bad.append(f"horn {base} {rel.name}: {exc}")
    for rel in corpus_relations(BaseStructure.equiv(OMEGA, 2)):
        if preserves(B_H3, rel):
            try:
                compile_parity(rel)
                compiled += 1
            except Inexact as exc:
                bad.append(f"parity {rel.name}: {exc}")
    return not bad, f"{compiled} preserved corpus relations compiled exactly" + (f"; {bad[0]}" if bad else "")


def check_realizability(w: _Witnesses) -> tuple[bool, str]:
    checks = []
    for n in (3, 4):
        h = BaseStructure.henson(n)
        checks.append((f"majority rejected over henson({n})", not realizable(B_MAJ, h)))
        checks.append((f"minority fragment rejected over henson({n})", not realizable(B_MINORITY_FRAGMENT, h)))
        checks.append((f"min accepted over henson({n})", realizable(B_MIN, h)))
    checks.append(("clique colouring rejected over equiv(omega,2)",
                   not realizable(B_CLIQUECOL, BaseStructure.equiv(OMEGA, 2))))
    failed = [name for name, ok in checks if not ok]
    return not failed, f"{len(checks) - len(failed)}/{len(checks)} checks" + (f"; failed: {failed[0]}" if failed else "")


def _closure_by_sums(vecs: set[tuple[int, ...]]) -> set[tuple[int, ...]]:
    current = set(vecs)
    while True:
        grown = current | {tuple(x ^ y ^ z for x, y, z in zip(a, b, c))
                           for a in current for b in current for c in current}
        if grown == current:
            return current
        current = grown


def check_gf2(w: _Witnesses) -> tuple[bool, str]:
    rng = random.Random(7)
    solved = inconsistent = 0
    bad = []
    for trial in range(1000):
        n = rng.randint(1, 30)
        system = Gf2System(n)
        for _ in range(rng.randint(0, 40)):
            system.add(rng.getrandbits(n), rng.getrandbits(1))
        result = gf2_solve(system)
        if isinstance(result, Inconsistent):
            inconsistent += 1
            mask = rhs = 0
            for i in result.rows:
                mask ^= system.rows[i][0]
                rhs ^= system.rows[i][1]
            if mask or not rhs:
                bad.append(f"system {trial}: certificate does not sum to 0=1")
        else:
            solved += 1
            if not system.satisfied_by(result.bits):
                bad.append(f"system {trial}: solution fails a row")
    hulls = 0
    for trial in range(300):
        width = rng.randint(1, 6)
        vecs = {tuple(rng.getrandbits(1) for _ in range(width)) for _ in range(rng.randint(1, 8))}
        hull, exact = affine_hull(vecs, width)
        closed = _closure_by_sums(vecs)
        inside = {v for v in itertools.product((0, 1), repeat=width) if hull.satisfied_by(v)}
        hulls += 1
        if not vecs <= inside or inside != closed or exact != (len(closed) == len(vecs)):
            bad.append(f"hull {trial} width {width}")
    detail = f"{solved} solved, {inconsistent} inconsistent, {hulls} hulls" + (f"; {bad[0]}" if bad else "")
    return not bad, detail


def check_witnesses(w: _Witnesses) -> tuple[bool, str]:
    if w.checked == 0:
        return False, "no SAT answers were recorded; run the equivalence checks first"
    return not w.bad, f"{w.checked - len(w.bad)}/{w.checked} SAT witnesses re-verified" + (f"; {w.bad[0]}" if w.bad else "")


def check_scale(w: _Witnesses) -> tuple[bool, str]:
    parts = []
    ok = True
    for label, sig, solver in [("horn", horn_signature(BaseStructure.henson(3)), horn_solve),
                               ("parity", parity_signature(), solve_cw2_parity)]:
        worst = 0.0
        for seed in range(3):
            inst = random_instance(sig, 200, 300, seed)
            start = time.perf_counter()
            result = solver(sig, inst)
            worst = max(worst, time.perf_counter() - start)
            if result.sat and check_witness(sig, inst, result.witness):
                ok = False
        ok = ok and worst < 5.0
        parts.append(f"{label} worst {worst:.3f}s")
    return ok, "200 variables, 300 constraints: " + ", ".join(parts)


def check_dispatch(w: _Witnesses) -> tuple[bool, str]:
    """solve with auto and with the oracle agree on capped instances."""
    rng = random.Random(11)
    total = 0
    bad = []
    for base, beh in [(BaseStructure.henson(3), B_MIN), (BaseStructure.equiv(2, OMEGA), B_XNOR3),
                      (BaseStructure.equiv(OMEGA, 2), B_H3), (BaseStructure.equality(), B_EQMEET)]:
        for i in range(15):
            sig = _random_signature(base, beh, rng)
            inst = random_instance(sig, rng.randint(1, 6), rng.randint(1, 5), rng.randrange(2 ** 32))
            auto = solve(sig, inst)
            total += 1
            if auto.status != solve(sig, inst, solver="oracle").status:
                bad.append(f"{base} #{i}")
    return not bad, f"{total - len(bad)}/{total} auto answers match the oracle" + (f"; {bad[0]}" if bad else "")


# key, title, function, time limit in seconds
CHECKS: list[tuple[str, str, Callable[[_Witnesses], tuple[bool, str]], float]] = [
    ("1", "classifier catalog", check_catalog, 10),
    ("2", "horn solver vs oracle", check_horn, 60),
    ("3", "affine solvers vs oracle", check_affine, 120),
    ("4", "1-in-3 gadget equisatisfiability", check_gadget, 120),
    ("5", "compiler exactness on corpus", check_compilers, float("inf")),
    ("6", "realizability obstructions", check_realizability, float("inf")),
    ("7", "GF(2) core", check_gf2, float("inf")),
    ("8", "witness soundness", check_witnesses, float("inf")),
    ("9", "performance at 200 variables", check_scale, float("inf")),
    ("dispatch", "auto solve vs oracle spot check", check_dispatch, float("inf")),
]


def run_all(only: set[str] | None = None, echo: Callable[[str], None] = print) -> list[CheckResult]:
    """Run the checks in order. Check 8 reads the witnesses recorded by checks 2 to 4."""
    witnesses = _Witnesses()
    results = []
    for key, title, fn, limit in CHECKS:
        if only is not None and key not in only:
            continue
        start = time.perf_counter()
        try:
            passed, detail = fn(witnesses)
        except Exception as exc:  # a crash is a failed check, not a crashed suite
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        seconds = time.perf_counter() - start
        if seconds >= limit:
            passed = False
            detail += f"; over the {limit:.0f}s limit"
        result = CheckResult(key, title, passed, detail, seconds)
        echo(result.line())
        results.append(result)
    return results
