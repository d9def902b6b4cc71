"""Horn clauses over pair values, unit propagation and final checks.

Pair values form the meet-semilattice N < E, N < EQ. A relation closed under
that meet (the min behaviour) is an intersection of clauses

    lit_1 | ... | lit_m | head

where each literal says "pair p is not in an up-set" (IS_N: p is N, IS_NEQ:
p is not EQ, NOT_E: p is not E) and the head is E(p), EQ(p) or false.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from .core import (EQ, OMEGA, ArityMismatch, E, N, BaseStructure, HcspError, Instance,
                   OrbitRelation, Signature, SolveResult, TypeMatrix, enumerate_types, has_clique,
                   pair_list, witness_from_classes)

__all__ = [
    "IS_N", "IS_NEQ", "NOT_E", "Literal", "HornClause", "Inexact", "NotCompiled",
    "compile_horn", "horn_solve", "HornEngine", "final_check", "solve_hat", "hat_signature",
    "WrongSignature",
]

IS_N, IS_NEQ, NOT_E = "IS_N", "IS_NEQ", "NOT_E"

# values that falsify each literal form, as bit masks over (E, N, EQ)
_FALSIFIED_BY = {IS_N: (1 << E) | (1 << EQ), IS_NEQ: 1 << EQ, NOT_E: 1 << E}


class Inexact(HcspError):
    """The permitted clause shape cannot define the relation exactly."""

    def __init__(self, message: str, separating: TypeMatrix):
        super().__init__(message)
        self.separating = separating


class NotCompiled(HcspError):
    pass


class WrongSignature(HcspError, ValueError):
    pass


@dataclass(frozen=True, order=True)
class Literal:
    pair: tuple[int, int]
    form: str

    def holds(self, value: int) -> bool:
        return not (_FALSIFIED_BY[self.form] >> value) & 1

    def __str__(self) -> str:
        i, j = self.pair
        return f"{self.form}({i + 1},{j + 1})"


@dataclass(frozen=True)
class HornClause:
    body: frozenset[Literal]
    head: tuple[str, tuple[int, int]] | None  # ("E" | "EQ", pair) or None for false

    def satisfied_by(self, t: TypeMatrix) -> bool:
        if any(lit.holds(t[lit.pair]) for lit in self.body):
            return True
        if self.head is None:
            return False
        kind, pair = self.head
        return t[pair] == (E if kind == "E" else EQ)

    def __str__(self) -> str:
        parts = [str(lit) for lit in sorted(self.body)]
        if self.head is not None:
            kind, (i, j) = self.head
            parts.append(f"{kind}({i + 1},{j + 1})")
        return " | ".join(parts) or "false"

    def to_json(self) -> dict:
        return {
            "body": [{"pair": [i + 1, j + 1], "form": lit.form} for lit in sorted(self.body)
                     for i, j in [lit.pair]],
            "head": None if self.head is None else {"kind": self.head[0],
                                                    "pair": [self.head[1][0] + 1, self.head[1][1] + 1]},
        }


def _violations(arr: np.ndarray, body: dict[int, int], head: tuple[int, int] | None) -> np.ndarray:
    """Rows of ``arr`` violating the clause; body maps position -> required value."""
    mask = np.ones(len(arr), dtype=bool)
    for p, v in body.items():
        mask &= arr[:, p] == v
    if head is not None:
        q, hv = head
        mask &= arr[:, q] != hv
    return mask


@lru_cache(maxsize=1024)
def compile_horn(rel: OrbitRelation) -> tuple[HornClause, ...]:
    """Horn clauses defining ``rel`` exactly among the valid types of its arity.

    Every valid non-member x is separated by the clause whose body pins the
    non-N entries of x and whose head is an entry where the meet of all
    members above x exceeds x. If that meet equals x no clause of the shape
    separates x, and Inexact is raised. Bodies are then shrunk while the
    clause stays valid on the relation, and clauses implied by the rest are
    dropped. Raises Inexact when the relation is not meet-closed.
    """
    k = rel.arity
    pairs = pair_list(k)
    P = len(pairs)
    universe = enumerate_types(k, rel.base, cap=max(k, 6))
    members = np.array([t.entries for t in rel.sorted_types], dtype=np.uint8).reshape(-1, P)
    outside_types = [t for t in universe if t not in rel.types]
    outside = np.array([t.entries for t in outside_types], dtype=np.uint8).reshape(-1, P)

    raw: list[tuple[dict[int, int], tuple[int, int] | None]] = []
    covered = np.zeros(len(outside), dtype=bool)
    for xi, x in enumerate(outside):
        if covered[xi]:
            continue
        above = np.all((x == N) | (members == x), axis=1)
        body = {p: int(x[p]) for p in range(P) if x[p] != N}
        if not above.any():
            head = None
        else:
            sub = members[above]
            meet = np.where(np.all(sub == sub[0], axis=0), sub[0], N)
            diff = np.flatnonzero(meet != x)
            if len(diff) == 0:
                raise Inexact(f"{rel.name}: {outside_types[xi]} is the meet of members above it",
                              outside_types[xi])
            q = int(diff[0])
            head = (q, int(meet[q]))
        for p in sorted(body):
            trial = {a: v for a, v in body.items() if a != p}
            if not _violations(members, trial, head).any():
                body = trial
        raw.append((body, head))
        covered |= _violations(outside, body, head)

    # drop clauses implied by the others on the valid types
    viol = np.array([_violations(outside, b, h) for b, h in raw]).reshape(len(raw), len(outside))
    counts = viol.sum(axis=0)
    keep = [True] * len(raw)
    for c in sorted(range(len(raw)), key=lambda c: (-len(raw[c][0]), -c)):
        if viol[c].any() and counts[viol[c]].min() >= 2:
            keep[c] = False
            counts -= viol[c]
    clauses = []
    for (body, head), kept in zip(raw, keep):
        if not kept:
            continue
        lits = frozenset(Literal(pairs[p], NOT_E if v == E else IS_NEQ) for p, v in body.items())
        hd = None if head is None else ("E" if head[1] == E else "EQ", pairs[head[0]])
        clauses.append(HornClause(lits, hd))
    # exactness over all valid types of the arity
    every = np.array([t.entries for t in universe], dtype=np.uint8).reshape(-1, P)
    rejected = np.zeros(len(universe), dtype=bool)
    for (body, head), kept in zip(raw, keep):
        if kept:
            rejected |= _violations(every, body, head)
    for t, rej in zip(universe, rejected):
        if rej == (t in rel.types):
            raise Inexact(f"{rel.name}: compiled clauses disagree on {t}", t)
    return tuple(clauses)


class HornEngine:
    """Unit propagation over EQ facts (union-find) and forced-E facts.

    ``matching`` enables the class-size-2 rule: a class with two distinct
    E-neighbours forces those neighbours to be equal.
    """

    def __init__(self, n_vars: int, matching: bool = False):
        self.parent = list(range(n_vars))
        self.members: dict[int, list[int]] = {v: [v] for v in range(n_vars)}
        self.eadj: list[set[int]] = [set() for _ in range(n_vars)]
        self.matching = matching
        self.conflict = ""
        self.clauses: list[tuple[list[tuple[int, int, int]], tuple[str, int, int] | None]] = []
        self.var_clauses: list[list[int]] = [[] for _ in range(n_vars)]
        self.fired: list[bool] = []
        self.queue: deque[int] = deque()
        self.queued: list[bool] = []
        self.pending: list[int] = []

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def value(self, u: int, w: int) -> int | None:
        ru, rw = self.find(u), self.find(w)
        if ru == rw:
            return EQ
        if rw in self.eadj[ru]:
            return E
        return None

    def add_clause(self, lits: list[tuple[int, int, int]], head: tuple[str, int, int] | None) -> None:
        cid = len(self.clauses)
        self.clauses.append((lits, head))
        self.fired.append(False)
        self.queued.append(True)
        self.queue.append(cid)
        touched = {u for u, w, _ in lits} | {w for u, w, _ in lits}
        for v in touched:
            self.var_clauses[v].append(cid)

    def _wake(self, rep: int) -> None:
        for v in self.members[rep]:
            for cid in self.var_clauses[v]:
                if not self.queued[cid] and not self.fired[cid]:
                    self.queued[cid] = True
                    self.queue.append(cid)

    def merge(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb or self.conflict:
            return
        if rb in self.eadj[ra]:
            self.conflict = f"variables {a} and {b} must be both equal and adjacent"
            return
        if len(self.members[ra]) < len(self.members[rb]):
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.members[ra].extend(self.members.pop(rb))
        for nb in self.eadj[rb]:
            self.eadj[nb].discard(rb)
            self.eadj[nb].add(ra)
            self.eadj[ra].add(nb)
        self.eadj[rb] = set()
        self._wake(ra)
        if self.matching:
            self.pending.append(ra)
            self.pending.extend(self.eadj[ra])

    def add_edge(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if self.conflict or rb in self.eadj[ra]:
            return
        if ra == rb:
            self.conflict = f"forced E on equal variables {a}, {b}"
            return
        self.eadj[ra].add(rb)
        self.eadj[rb].add(ra)
        self._wake(ra)
        self._wake(rb)
        if self.matching:
            self.pending.extend((ra, rb))

    def _saturate_matching(self) -> None:
        while self.pending and not self.conflict:
            r = self.find(self.pending.pop())
            nbs = sorted(self.eadj[r])
            for other in nbs[1:]:
                self.merge(nbs[0], other)

    def propagate(self) -> bool:
        """Run to fixpoint; False on conflict."""
        queue, clauses = self.queue, self.clauses
        self._saturate_matching()
        while queue and not self.conflict:
            cid = queue.popleft()
            self.queued[cid] = False
            if self.fired[cid]:
                continue
            lits, head = clauses[cid]
            for u, w, mask in lits:
                v = self.value(u, w)
                if v is None or not (mask >> v) & 1:
                    break
            else:
                self.fired[cid] = True
                if head is None:
                    self.conflict = f"clause {cid} derives false"
                elif head[0] == "EQ":
                    self.merge(head[1], head[2])
                else:
                    self.add_edge(head[1], head[2])
                self._saturate_matching()
        return not self.conflict

    def reps(self) -> list[int]:
        return [self.find(v) for v in range(len(self.parent))]

    def witness(self) -> TypeMatrix:
        eadj = self.eadj
        return witness_from_classes(len(self.parent), self.reps(),
                                    lambda a, b: E if b in eadj[a] else N)


def final_check(engine: HornEngine, base: BaseStructure) -> str:
    """Empty string if the fact state extends to a solution, else the reason."""
    if engine.conflict:
        return engine.conflict
    if base.kind == "henson":
        adj = {r: engine.eadj[r] for r in set(engine.reps())}
        for r, nbs in adj.items():
            if r in nbs:
                return f"reflexive E at {r}"
        clique = has_clique(adj, base.n)
        if clique:
            return f"forced E-clique of size {base.n} on {clique}"
    elif base.kind == "equiv":
        for r in set(engine.reps()):
            if len(engine.eadj[r]) > 1 and base.s == 2:
                return f"class of {r} exceeds size 2"
    return ""


def _instantiate(engine: HornEngine, clauses: Iterable[HornClause], pos: tuple[int, ...]) -> None:
    for cl in clauses:
        lits = []
        satisfied = False
        for lit in cl.body:
            u, w = pos[lit.pair[0]], pos[lit.pair[1]]
            if u == w:
                if lit.holds(EQ):
                    satisfied = True
                    break
                continue
            lits.append((u, w, _FALSIFIED_BY[lit.form]))
        if satisfied:
            continue
        head = None
        if cl.head is not None:
            kind, (a, b) = cl.head
            u, w = pos[a], pos[b]
            if u == w:
                if kind == "EQ":
                    continue
            else:
                head = (kind, u, w)
        engine.add_clause(lits, head)


def _check_base(base: BaseStructure) -> None:
    ok = base.kind in ("henson", "equality") or (base.kind == "equiv" and base.n == OMEGA and base.s == 2)
    if not ok:
        raise ValueError(f"Horn solving is not available over {base}")


def horn_solve(sig: Signature, inst: Instance,
               compiled: dict[str, tuple[HornClause, ...]] | None = None) -> SolveResult:
    """Decide ``inst`` by propagation over compiled Horn clauses.

    Clause sets are compiled on demand when ``compiled`` is not given.
    """
    base = sig.base
    _check_base(base)
    inst.check(sig)
    engine = HornEngine(len(inst.variables), matching=base.kind == "equiv")
    for c in inst.constraints:
        if compiled is not None:
            if c.rel not in compiled:
                raise NotCompiled(c.rel)
            clauses = compiled[c.rel]
        else:
            clauses = compile_horn(sig[c.rel])
        _instantiate(engine, clauses, inst.positions(c))
    engine.propagate()
    reason = final_check(engine, base)
    if reason:
        return SolveResult("UNSAT", solver="horn", reason=reason)
    return SolveResult("SAT", engine.witness(), solver="horn")


_HAT = {"E": "E(1,2)", "Ehat": "!E(1,2)", "NEQ": "neq(1,2)"}


def hat_signature(base: BaseStructure) -> Signature:
    """The signature {E, Ehat, NEQ}: edge, non-edge-or-equal, distinct."""
    from .formula import compile_formula
    return Signature(base, tuple(compile_formula(f, 2, base, name) for name, f in _HAT.items()))


def solve_hat(base: BaseStructure, inst: Instance) -> SolveResult:
    """Direct decision procedure for instances over {E, Ehat, NEQ}.

    Henson: unsatisfiable iff some E(x,x) or NEQ(x,x), an E and an Ehat
    constraint on the same pair, or an E-clique of the forbidden size.
    equiv(omega,2): E-neighbours of one variable are merged first, then the
    same conditions are checked on classes.
    """
    if base.kind == "equiv" and not (base.n == OMEGA and base.s == 2):
        raise ValueError(f"hat solving is not available over {base}")
    if base.kind not in ("henson", "equiv"):
        raise ValueError(f"hat solving is not available over {base}")
    for c in inst.constraints:
        if c.rel not in _HAT:
            raise WrongSignature(f"relation {c.rel} is not one of E, Ehat, NEQ")
        if len(c.vars) != 2:
            raise ArityMismatch(f"{c.rel} is binary")
    n = len(inst.variables)
    engine = HornEngine(n, matching=base.kind == "equiv")
    edges = [inst.positions(c) for c in inst.constraints if c.rel == "E"]
    for u, w in edges:
        engine.add_edge(u, w)
    engine._saturate_matching()

    def unsat(reason: str) -> SolveResult:
        return SolveResult("UNSAT", solver="hat", reason=reason)

    if engine.conflict:
        return unsat(engine.conflict)
    find = engine.find
    for c in inst.constraints:
        u, w = inst.positions(c)
        ru, rw = find(u), find(w)
        if c.rel == "NEQ" and ru == rw:
            return unsat(f"NEQ on equal variables {c.vars}")
        if c.rel == "Ehat" and rw in engine.eadj[ru]:
            return unsat(f"E and Ehat on {c.vars}")
    if base.kind == "henson":
        adj = {r: engine.eadj[r] for r in set(engine.reps())}
        clique = has_clique(adj, base.n)
        if clique:
            return unsat(f"E-clique of size {base.n}")
    return SolveResult("SAT", engine.witness(), solver="hat")
