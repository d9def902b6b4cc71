"""Affine solving over the two equivalence bases with one infinite parameter.

equiv(2,omega): two infinite classes. After contracting forced equalities the
only question is which of the two classes each variable lands in, and for
relations preserved by the balanced xnor behaviour those class patterns form
affine Boolean relations.

equiv(omega,2): infinitely many classes of size two. Relations preserved by
the H3 behaviour are conjunctions of clauses

    N(p_1) | ... | N(p_m) | Eq(q)                     (EQ head)
    N(p_1) | ... | N(p_m) | #{i in S : E(i)} = b mod 2  (PARITY head)

where Eq means "same class" (E or equal). Solving grows the same-class
graph by unit propagation, then decides the parity equations.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Literal as TypingLiteral

import numpy as np

from .core import (EQ, OMEGA, E, N, Constraint, HcspError, Instance, InvariantBreach,
                   OrbitRelation, Signature, SolveResult, TypeMatrix, enumerate_types,
                   pair_index, pair_list, witness_from_classes)
from .gf2 import Gf2System, Inconsistent, affine_hull, gf2_solve, parity
from .horn import Inexact, NotCompiled

__all__ = [
    "Rejected", "NotAffine", "Injectivized", "injectivize", "class_patterns", "solve_c2w_minority",
    "ParityClause", "compile_parity", "solve_cw2_parity",
]


class Rejected(HcspError):
    """Contraction produced a constraint with no remaining types."""


class NotAffine(InvariantBreach):
    def __init__(self, relation: str):
        super().__init__(f"class patterns of {relation} are not affine")
        self.relation = relation


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def _require(sig: Signature, n: float, s: float, what: str) -> None:
    base = sig.base
    if base.kind != "equiv" or base.n != n or base.s != s:
        raise ValueError(f"{what} needs base {'omega' if n == OMEGA else n},"
                         f"{'omega' if s == OMEGA else s}; got {base}")


# ---------------------------------------------------------------- equiv(2,omega)

@dataclass(frozen=True)
class Injectivized:
    """A contracted instance over representative variables with injective relations.

    ``rep[i]`` is the index, in ``instance.variables``, of original variable i.
    ``merges`` lists forced identifications in the order they were found.
    """

    instance: Instance
    signature: Signature
    rep: tuple[int, ...]
    merges: tuple[tuple[str, str], ...]


def _consistent(t: TypeMatrix, reps: tuple[int, ...]) -> bool:
    k = len(reps)
    return all(t[a, b] == EQ for a in range(k) for b in range(a + 1, k) if reps[a] == reps[b])


def injectivize(sig: Signature, inst: Instance) -> Injectivized:
    """Contract variables forced equal until every relation can be read injectively.

    Raises Rejected when some constraint has no type compatible with the
    identifications made so far.
    """
    inst.check(sig)
    nv = len(inst.variables)
    uf = _UnionFind(nv)
    cons = [(c, inst.positions(c), list(sig[c.rel].sorted_types)) for c in inst.constraints]
    merges: list[tuple[str, str]] = []
    changed = True
    while changed:
        changed = False
        for c, pos, live in cons:
            reps = tuple(uf.find(p) for p in pos)
            live[:] = [t for t in live if _consistent(t, reps)]
            if not live:
                raise Rejected(f"constraint {c.rel}{c.vars} has no type after contraction")
            k = len(pos)
            for a in range(k):
                for b in range(a + 1, k):
                    if reps[a] != reps[b] and all(t[a, b] == EQ for t in live):
                        if uf.union(reps[a], reps[b]):
                            merges.append((inst.variables[pos[a]], inst.variables[pos[b]]))
                            changed = True
                        reps = tuple(uf.find(p) for p in pos)

    roots = sorted({uf.find(v) for v in range(nv)})
    new_index = {r: i for i, r in enumerate(roots)}
    rep = tuple(new_index[uf.find(v)] for v in range(nv))
    names = tuple(inst.variables[r] for r in roots)
    relations: dict[tuple[str, tuple[int, ...]], OrbitRelation] = {}
    constraints = []
    for c, pos, live in cons:
        reps = [rep[p] for p in pos]
        first: list[int] = []
        seen: set[int] = set()
        for a, r in enumerate(reps):
            if r not in seen:
                seen.add(r)
                first.append(a)
        if len(first) < 2:
            continue
        key = (c.rel, tuple(reps.index(r) for r in reps))
        if key not in relations:
            projected = {t.induced(first) for t in live}
            injective = frozenset(t for t in projected if EQ not in t.entries)
            if not injective:
                raise InvariantBreach(f"{c.rel}{c.vars} has no injective type after contraction")
            relations[key] = OrbitRelation(f"{c.rel}#{len(relations)}", len(first), injective, sig.base)
        constraints.append(Constraint(relations[key].name, tuple(names[reps[a]] for a in first)))
    return Injectivized(Instance(names, tuple(constraints)), Signature(sig.base, tuple(relations.values())),
                        rep, tuple(merges))


def class_patterns(rel: OrbitRelation) -> set[tuple[int, ...]]:
    """Class-indicator vectors of the injective types of ``rel``, closed under complement."""
    out = set()
    k = rel.arity
    for t in rel.types:
        if EQ in t.entries:
            continue
        bits = tuple(0 if a == 0 or t[0, a] == E else 1 for a in range(k))
        out.add(bits)
        out.add(tuple(1 - b for b in bits))
    return out


def solve_c2w_minority(sig: Signature, inst: Instance) -> SolveResult:
    """Decide an instance over equiv(2,omega) whose relations are xnor-preserved."""
    _require(sig, 2, OMEGA, "minority solving")
    try:
        red = injectivize(sig, inst)
    except Rejected as exc:
        return SolveResult("UNSAT", solver="c2w_minority", reason=str(exc))
    m = len(red.instance.variables)
    system = Gf2System(m, names=list(red.instance.variables))
    hulls: dict[str, Gf2System] = {}
    for c in red.instance.constraints:
        rel = red.signature[c.rel]
        if c.rel not in hulls:
            hull, exact = affine_hull(class_patterns(rel), rel.arity)
            if not exact:
                raise NotAffine(c.rel)
            hulls[c.rel] = hull
        pos = red.instance.positions(c)
        for mask, rhs in hulls[c.rel].rows:
            glob = 0
            for a, v in enumerate(pos):
                if (mask >> a) & 1:
                    glob ^= 1 << v
            system.add(glob, rhs)
    result = gf2_solve(system)
    details = {"system": system}
    if isinstance(result, Inconsistent):
        return SolveResult("UNSAT", solver="c2w_minority",
                           reason=f"class equations inconsistent ({len(result.rows)} rows)", details=details)
    bits = result.bits
    witness = witness_from_classes(len(inst.variables), red.rep,
                                   lambda a, b: E if bits[a] == bits[b] else N)
    return SolveResult("SAT", witness, solver="c2w_minority", details=details)


# ---------------------------------------------------------------- equiv(omega,2)

@dataclass(frozen=True)
class ParityClause:
    """``body`` pairs are N-disjuncts; the head is ("EQ", pair) or ("PARITY", S, bit)."""

    body: frozenset[tuple[int, int]]
    head: tuple

    def satisfied_by(self, t: TypeMatrix) -> bool:
        if any(t[p] == N for p in self.body):
            return True
        if self.head[0] == "EQ":
            return t[self.head[1]] != N
        _, pairs, bit = self.head
        return sum(t[p] == E for p in pairs) % 2 == bit

    def __str__(self) -> str:
        parts = [f"N({i + 1},{j + 1})" for i, j in sorted(self.body)]
        if self.head[0] == "EQ":
            i, j = self.head[1]
            parts.append(f"Eq({i + 1},{j + 1})")
        else:
            _, pairs, bit = self.head
            terms = "+".join(f"E({i + 1},{j + 1})" for i, j in sorted(pairs)) or "0"
            parts.append(f"{terms}={bit}")
        return " | ".join(parts)

    def to_json(self) -> dict:
        body = [[i + 1, j + 1] for i, j in sorted(self.body)]
        if self.head[0] == "EQ":
            i, j = self.head[1]
            return {"body": body, "head": {"kind": "EQ", "pair": [i + 1, j + 1]}}
        _, pairs, bit = self.head
        return {"body": body, "head": {"kind": "PARITY", "pairs": [[i + 1, j + 1] for i, j in sorted(pairs)],
                                       "rhs": bit}}


# raw clause: (body positions, ("EQ", q) | ("PARITY", positions, bit))
_Raw = tuple[tuple[int, ...], tuple]


def _parity_violations(arr: np.ndarray, body: tuple[int, ...], head: tuple) -> np.ndarray:
    mask = np.ones(len(arr), dtype=bool)
    for p in body:
        mask &= arr[:, p] != N
    if head[0] == "EQ":
        mask &= arr[:, head[1]] == N
    else:
        _, pos, bit = head
        count = np.zeros(len(arr), dtype=np.int64)
        for p in pos:
            count += arr[:, p] == E
        mask &= (count % 2) != bit
    return mask


@lru_cache(maxsize=1024)
def compile_parity(rel: OrbitRelation) -> tuple[ParityClause, ...]:
    """Parity clauses defining ``rel`` exactly among the valid types of its arity.

    Each non-member x is separated constructively. Let B be the pairs where x
    is not N and W the members that are not N anywhere on B. If some pair q
    is N in x but never N in W, the EQ clause over (B, q) separates x.
    Otherwise x's E-pattern on B lies outside the affine hull of W's
    patterns when ``rel`` is H3-preserved, and a violated hull equation
    gives the PARITY head. Raises Inexact when neither applies.
    """
    if rel.base.kind != "equiv" or rel.base.n != OMEGA or rel.base.s != 2:
        raise ValueError(f"parity compilation needs equiv(omega,2), got {rel.base}")
    k = rel.arity
    pairs = pair_list(k)
    P = len(pairs)
    universe = enumerate_types(k, rel.base, cap=max(k, 6))
    members = np.array([t.entries for t in rel.sorted_types], dtype=np.uint8).reshape(-1, P)
    outside_types = [t for t in universe if t not in rel.types]
    outside = np.array([t.entries for t in outside_types], dtype=np.uint8).reshape(-1, P)

    raw: list[_Raw] = []
    covered = np.zeros(len(outside), dtype=bool)
    for xi, x in enumerate(outside):
        if covered[xi]:
            continue
        body = tuple(p for p in range(P) if x[p] != N)
        inside = members[np.all(members[:, list(body)] != N, axis=1)] if body else members
        head: tuple | None = None
        for q in range(P):
            if x[q] == N and np.all(inside[:, q] != N):
                head = ("EQ", q)
                break
        if head is None:
            if len(inside) == 0:
                head = ("PARITY", (), 1)
            else:
                vecs = {tuple(int(v) for v in row) for row in (inside[:, list(body)] == E)}
                hull, _ = affine_hull(vecs, len(body))
                xv = sum(1 << i for i, p in enumerate(body) if x[p] == E)
                for mask, rhs in hull.rows:
                    if parity(mask & xv) != rhs:
                        head = ("PARITY", tuple(body[i] for i in range(len(body)) if (mask >> i) & 1), rhs)
                        break
        if head is None:
            raise Inexact(f"{rel.name}: no parity clause separates {outside_types[xi]}", outside_types[xi])
        fixed = set(head[1]) if head[0] == "PARITY" else set()
        for p in body:
            if p in fixed:
                continue
            trial = tuple(a for a in body if a != p)
            if not _parity_violations(members, trial, head).any():
                body = trial
        raw.append((body, head))
        covered |= _parity_violations(outside, body, head)

    viol = np.array([_parity_violations(outside, b, h) for b, h in raw]).reshape(len(raw), len(outside))
    counts = viol.sum(axis=0)
    keep = [True] * len(raw)
    for c in sorted(range(len(raw)), key=lambda c: (-len(raw[c][0]), -c)):
        if viol[c].any() and counts[viol[c]].min() >= 2:
            keep[c] = False
            counts -= viol[c]
    kept = [r for r, flag in zip(raw, keep) if flag]

    every = np.array([t.entries for t in universe], dtype=np.uint8).reshape(-1, P)
    rejected = np.zeros(len(universe), dtype=bool)
    for body, head in kept:
        rejected |= _parity_violations(every, body, head)
    for t, rej in zip(universe, rejected):
        if rej == (t in rel.types):
            raise Inexact(f"{rel.name}: compiled clauses disagree on {t}", t)

    clauses = []
    for body, head in kept:
        if head[0] == "EQ":
            hd: tuple = ("EQ", pairs[head[1]])
        else:
            hd = ("PARITY", frozenset(pairs[p] for p in head[1]), head[2])
        clauses.append(ParityClause(frozenset(pairs[p] for p in body), hd))
    return tuple(clauses)


def solve_cw2_parity(sig: Signature, inst: Instance,
                     compiled: dict[str, tuple[ParityClause, ...]] | None = None,
                     triangles: TypingLiteral["labels", "all"] = "labels") -> SolveResult:
    """Decide an instance over equiv(omega,2) whose relations are H3-preserved.

    Same-class facts are propagated with a union-find until no clause body
    shrinks further. Parity heads of emptied clauses become equations over
    pair variables. With ``triangles="all"`` every variable pair gets its own
    GF(2) variable and every triple contributes xy+yz+xz=0. The default
    ``"labels"`` encoding gives each variable one bit and reads pair xy as
    the sum of the two bits, which satisfies every triangle equation by
    construction and spans the same solutions.
    """
    _require(sig, OMEGA, 2, "parity solving")
    if triangles not in ("labels", "all"):
        raise ValueError("triangles must be 'labels' or 'all'")
    inst.check(sig)
    nv = len(inst.variables)
    uf = _UnionFind(nv)
    members: dict[int, list[int]] = {v: [v] for v in range(nv)}
    # clause state: remaining body pairs, head in variable terms
    bodies: list[list[tuple[int, int]]] = []
    heads: list[tuple] = []
    var_clauses: list[list[int]] = [[] for _ in range(nv)]
    for c in inst.constraints:
        clauses = compiled.get(c.rel) if compiled is not None else compile_parity(sig[c.rel])
        if clauses is None:
            raise NotCompiled(c.rel)
        pos = inst.positions(c)
        for cl in clauses:
            body = [(pos[i], pos[j]) for i, j in cl.body if pos[i] != pos[j]]
            if cl.head[0] == "EQ":
                u, w = pos[cl.head[1][0]], pos[cl.head[1][1]]
                if u == w:
                    continue
                head: tuple = ("EQ", u, w)
            else:
                terms = [(pos[i], pos[j]) for i, j in cl.head[1] if pos[i] != pos[j]]
                head = ("PARITY", terms, cl.head[2])
            cid = len(bodies)
            bodies.append(body)
            heads.append(head)
            for u, w in body:
                var_clauses[u].append(cid)
                var_clauses[w].append(cid)

    queue = list(range(len(bodies)))
    queued = [True] * len(bodies)
    done = [False] * len(bodies)
    equations: list[tuple[list[tuple[int, int]], int]] = []
    while queue:
        cid = queue.pop()
        queued[cid] = False
        if done[cid]:
            continue
        body = [(u, w) for u, w in bodies[cid] if uf.find(u) != uf.find(w)]
        bodies[cid] = body
        if body:
            continue
        done[cid] = True
        head = heads[cid]
        if head[0] == "PARITY":
            equations.append((head[1], head[2]))
            continue
        ra, rb = uf.find(head[1]), uf.find(head[2])
        if ra == rb:
            continue
        if len(members[ra]) < len(members[rb]):
            ra, rb = rb, ra
        uf.parent[rb] = ra
        members[ra].extend(members.pop(rb))
        for v in members[ra]:
            for other in var_clauses[v]:
                if not queued[other] and not done[other]:
                    queued[other] = True
                    queue.append(other)

    root = [uf.find(v) for v in range(nv)]
    if triangles == "labels":
        system = Gf2System(nv, names=list(inst.variables))
        for terms, bit in equations:
            mask = 0
            for u, w in terms:
                mask ^= (1 << u) ^ (1 << w)
            system.add(mask, bit)
    else:
        idx = pair_index(nv)
        names = [f"{inst.variables[i]}~{inst.variables[j]}" for i, j in pair_list(nv)]
        system = Gf2System(len(names), names=names)
        for terms, bit in equations:
            mask = 0
            for u, w in terms:
                mask ^= 1 << idx[min(u, w)][max(u, w)]
            system.add(mask, bit)
        for x in range(nv):
            for y in range(x + 1, nv):
                for z in range(y + 1, nv):
                    system.add((1 << idx[x][y]) | (1 << idx[y][z]) | (1 << idx[x][z]), 0)

    result = gf2_solve(system)
    details = {"system": system}
    if isinstance(result, Inconsistent):
        return SolveResult("UNSAT", solver="cw2_parity",
                           reason=f"parity equations inconsistent ({len(result.rows)} rows)", details=details)
    bits = result.bits
    if triangles == "labels":
        def split(v: int) -> int:
            return bits[v] ^ bits[root[v]]
    else:
        def split(v: int) -> int:
            r = root[v]
            return 0 if v == r else bits[idx[min(v, r)][max(v, r)]]
    # same component: EQ when on the same side of the split, E otherwise
    sub = [(root[v], split(v)) for v in range(nv)]
    labels = {key: i for i, key in enumerate(dict.fromkeys(sub))}
    rep = [labels[key] for key in sub]
    by_label = {labels[key]: key for key in labels}
    witness = witness_from_classes(nv, rep, lambda a, b: E if by_label[a][0] == by_label[b][0] else N)
    return SolveResult("SAT", witness, solver="cw2_parity", details=details)
