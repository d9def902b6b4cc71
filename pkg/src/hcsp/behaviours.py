"""Behaviour tables and their pointwise action on types.

A behaviour of arity r maps r-tuples of pair values to a pair value. It acts
on r types of equal arity entry by entry. Preservation and realizability are
decided by exhaustive sweeps; the sweeps are vectorised with numpy and
reduced by index permutations that fix the relation, which is sound because
a pointwise action commutes with simultaneous index permutation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Sequence

import numpy as np

from .core import (EQ, E, N, BaseStructure, HcspError, OrbitRelation, Pair, TypeMatrix,
                   enumerate_types, pair_index, pair_list, validate_type)

__all__ = [
    "Behaviour", "InvalidApplication", "behaviour_catalog", "apply_behaviour", "preserves",
    "preservation_counterexample", "realizable", "realizability_counterexample", "close_under",
    "B_MIN", "B_P1", "B_P2", "B_EDGEDEL", "B_CLIQUECOL", "B_QUOTIENT", "B_CONST", "B_EQMEET",
    "B_XNOR3", "B_H3", "B_MAJ", "B_MINORITY_FRAGMENT", "unary_behaviours",
]

_SYM = {E: "E", N: "N", EQ: "EQUAL"}


class InvalidApplication(HcspError):
    """Pointwise application produced a matrix that is not a valid type."""


@dataclass(frozen=True)
class Behaviour:
    name: str
    arity: int
    table: tuple[int, ...]

    def __post_init__(self):
        if self.arity not in (1, 2, 3):
            raise ValueError("behaviour arity must be 1, 2 or 3")
        table = tuple(int(v) for v in self.table)
        if len(table) != 3 ** self.arity or any(v not in (0, 1, 2) for v in table):
            raise ValueError("behaviour table must be total over {E,N,EQ}^r")
        if table[-1] != EQ:
            raise ValueError("behaviour must map all-EQ to EQ")
        object.__setattr__(self, "table", table)

    @classmethod
    def from_function(cls, name: str, arity: int, f: Callable[..., int]) -> "Behaviour":
        return cls(name, arity, tuple(f(*args) for args in itertools.product((E, N, EQ), repeat=arity)))

    def __call__(self, *args: int) -> Pair:
        if len(args) != self.arity:
            raise TypeError(f"{self.name} takes {self.arity} arguments")
        code = 0
        for a in args:
            code = code * 3 + int(a)
        return Pair(self.table[code])

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.table, dtype=np.uint8).reshape((3,) * self.arity)

    def to_json(self) -> dict[str, str]:
        return {",".join(_SYM[Pair(a)] for a in args): _SYM[self(*args)]
                for args in itertools.product((E, N, EQ), repeat=self.arity)}

    def __str__(self) -> str:
        return self.name


def _min(a, b):
    if a == b:
        return a
    return N


def _p1(a, b):
    return b if a == EQ else a


def _xnor3(a, b, c):
    args = (a, b, c)
    eqs = args.count(EQ)
    rest = [x for x in args if x != EQ]
    if eqs == 0:
        return E if rest.count(E) % 2 == 1 else N
    if eqs == 1:
        return E if rest[0] == rest[1] else N
    if eqs == 2:
        return rest[0]
    return EQ


def _h3(a, b, c):
    args = (a, b, c)
    if N in args:
        return N
    return E if args.count(E) % 2 == 1 else EQ


def _maj(a, b, c):
    args = (a, b, c)
    rest = [x for x in args if x != EQ]
    if not rest:
        return EQ
    if len(rest) == 3:
        return E if rest.count(E) >= 2 else N
    if len(rest) == 2:
        return rest[0] if rest[0] == rest[1] else N
    return rest[0]


def _fragment(a, b, c):
    if (a, b, c) in ((N, N, E), (E, N, N)):
        return E
    return EQ if (a, b, c) == (EQ, EQ, EQ) else N


B_MIN = Behaviour.from_function("B_min", 2, _min)
B_P1 = Behaviour.from_function("B_p1", 2, _p1)
B_P2 = Behaviour.from_function("B_p2", 2, lambda a, b: _p1(b, a))
B_EDGEDEL = Behaviour.from_function("B_edgedel", 1, lambda a: EQ if a == EQ else N)
B_CLIQUECOL = Behaviour.from_function("B_cliquecol", 1, lambda a: EQ if a == EQ else E)
B_QUOTIENT = Behaviour.from_function("B_quotient", 1, lambda a: N if a == N else EQ)
B_CONST = Behaviour.from_function("B_const", 1, lambda a: EQ)
B_EQMEET = Behaviour.from_function("B_eqmeet", 2, lambda a, b: EQ if a == b == EQ else N)
B_XNOR3 = Behaviour.from_function("B_xnor3", 3, _xnor3)
B_H3 = Behaviour.from_function("B_H3", 3, _h3)
# not part of the catalog: classic non-realizable behaviours over Henson graphs
B_MAJ = Behaviour.from_function("B_maj", 3, _maj)
B_MINORITY_FRAGMENT = Behaviour.from_function("B_nne_enn", 3, _fragment)

_CATALOG = (B_MIN, B_P1, B_P2, B_EDGEDEL, B_CLIQUECOL, B_QUOTIENT, B_CONST, B_EQMEET, B_XNOR3, B_H3)


def behaviour_catalog(base: BaseStructure | None = None) -> dict[str, Behaviour]:
    """The named behaviours used by the classifier.

    The catalog is the same for every base; which entries apply is decided
    by :func:`realizable`.
    """
    return {b.name: b for b in _CATALOG}


def unary_behaviours() -> list[Behaviour]:
    """All nine unary tables fixing EQ."""
    out = []
    for e_img, n_img in itertools.product((E, N, EQ), repeat=2):
        name = f"B_unary_{Pair(e_img).symbol}{Pair(n_img).symbol}"
        out.append(Behaviour(name, 1, (e_img, n_img, EQ)))
    return out


def _apply_entries(b: Behaviour, ms: Sequence[TypeMatrix]) -> TypeMatrix:
    if len(ms) != b.arity:
        raise TypeError(f"{b.name} expects {b.arity} inputs, got {len(ms)}")
    k = ms[0].arity
    if any(m.arity != k for m in ms):
        from .core import ArityMismatch
        raise ArityMismatch("inputs must have equal arity")
    return TypeMatrix(k, tuple(b(*vals) for vals in zip(*(m.entries for m in ms))))


def apply_behaviour(b: Behaviour, ms: Sequence[TypeMatrix], base: BaseStructure) -> TypeMatrix:
    """Pointwise application; raises InvalidApplication if the result is not a valid type."""
    out = _apply_entries(b, ms)
    v = validate_type(out, base)
    if not v:
        raise InvalidApplication(f"{b.name} yields {out.to_string()}: {v.rule} {v.detail}")
    return out


class _TypeArray:
    """Numpy view of a set of types with fast membership on integer codes."""

    def __init__(self, types: Sequence[TypeMatrix], k: int):
        self.k = k
        self.P = k * (k - 1) // 2
        types = sorted(types)
        self.types = types
        self.T = np.array([t.entries for t in types], dtype=np.uint8).reshape(len(types), self.P)
        self.weights = (3 ** np.arange(self.P - 1, -1, -1, dtype=np.int64))
        self.codes = self.encode(self.T)
        if self.P <= 15:
            self.lookup = np.zeros(3 ** self.P, dtype=bool)
            self.lookup[self.codes] = True
        else:
            self.lookup = None

    def encode(self, rows: np.ndarray) -> np.ndarray:
        return rows.astype(np.int64) @ self.weights

    def member(self, codes: np.ndarray) -> np.ndarray:
        if self.lookup is not None:
            return self.lookup[codes]
        pos = np.searchsorted(self.codes, codes)
        pos = np.minimum(pos, len(self.codes) - 1)
        return self.codes[pos] == codes

    def index_of(self, codes: np.ndarray) -> np.ndarray:
        return np.searchsorted(self.codes, codes)

    def decode(self, code: int) -> TypeMatrix:
        digits = []
        for _ in range(self.P):
            digits.append(code % 3)
            code //= 3
        return TypeMatrix(self.k, tuple(reversed(digits)))


@lru_cache(maxsize=None)
def _position_maps(k: int) -> np.ndarray:
    """For every permutation of k indices, the induced map on pair positions."""
    idx = pair_index(k)
    pairs = pair_list(k)
    maps = [[idx[perm[a]][perm[b]] for a, b in pairs] for perm in itertools.permutations(range(k))]
    return np.array(maps, dtype=np.intp).reshape(-1, len(pairs))


def _stabilizer_maps(ta: _TypeArray, full: bool) -> np.ndarray:
    """Position maps of the index permutations mapping the type set onto itself."""
    if ta.k > 7 or ta.P == 0:
        return np.arange(ta.P, dtype=np.intp).reshape(1, ta.P)
    maps = _position_maps(ta.k)
    if full:
        return maps
    if len(ta.types) <= 48:
        return maps[:1]
    keep = [pm for pm in maps if ta.member(ta.encode(ta.T[:, pm])).all()]
    return np.array(keep, dtype=np.intp)


def _orbits(ta: _TypeArray, maps: np.ndarray) -> list[list[int]]:
    """Orbits of the type set under the given index permutations."""
    m = len(ta.types)
    if len(maps) == 1:
        return [[i] for i in range(m)]
    seen = np.zeros(m, dtype=bool)
    orbits = []
    for i in range(m):
        if seen[i]:
            continue
        members = np.unique(ta.index_of(ta.encode(ta.T[i][maps])))
        seen[members] = True
        orbits.append([i] + [int(j) for j in members if j != i])
    return orbits


def _is_symmetric(b: Behaviour) -> bool:
    return all(b(*args) == b(*perm)
               for args in itertools.product((E, N, EQ), repeat=b.arity)
               for perm in itertools.permutations(args))


_CHUNK = 5
_BLOCK = 1 << 21


def _find_violation(b: Behaviour, ta: _TypeArray, full: bool) -> tuple[tuple[int, ...], int] | None:
    """Return (input indices, output code) of an r-tuple whose image leaves the set.

    The first argument only ranges over orbit representatives. For a
    symmetric behaviour the inputs are also sorted by orbit, so the other
    arguments only range over the current orbit and later ones.
    """
    m, P, r = len(ta.types), ta.P, b.arity
    if m == 0 or P == 0:
        return None
    table = b.array
    if r == 1:
        codes = ta.encode(table[ta.T])
        bad = np.flatnonzero(~ta.member(codes))
        return ((int(bad[0]),), int(codes[bad[0]])) if len(bad) else None

    orbits = sorted(_orbits(ta, _stabilizer_maps(ta, full)), key=len, reverse=True)
    symmetric = _is_symmetric(b)
    order = np.array([i for orb in orbits for i in orb], dtype=np.intp)
    T = ta.T[order]
    chunks = [list(range(s, min(s + _CHUNK, P))) for s in range(0, P, _CHUNK)]
    pats, invs, wts = [], [], []
    for ch in chunks:
        u, inv = np.unique(T[:, ch], axis=0, return_inverse=True)
        pats.append(u)
        invs.append(inv.reshape(-1))
        wts.append(ta.weights[ch])

    start = 0
    for orb in orbits:
        rep = orb[0]
        lo = start if symmetric else 0
        start += len(orb)
        t1 = ta.T[rep]
        if r == 2:
            total = np.zeros(m - lo, dtype=np.int64)
            for ch, u, inv, w in zip(chunks, pats, invs, wts):
                out = table[t1[ch][None, :], u]
                total += (out.astype(np.int64) @ w)[inv[lo:]]
            bad = np.flatnonzero(~ta.member(total))
            if len(bad):
                j = int(bad[0])
                return (rep, int(order[lo + j])), int(total[j])
            continue
        contrib = []
        for ch, u, w in zip(chunks, pats, wts):
            out = table[t1[ch][None, None, :], u[:, None, :], u[None, :, :]]
            contrib.append(out.astype(np.int64) @ w)
        step = max(1, _BLOCK // max(1, m - lo))
        for a in range(lo, m, step):
            b_ = min(m, a + step)
            c0 = a if symmetric else 0
            total = np.zeros((b_ - a, m - c0), dtype=np.int64)
            for c, inv in zip(contrib, invs):
                total += c[inv[a:b_][:, None], inv[None, c0:]]
            bad = np.argwhere(~ta.member(total))
            if len(bad):
                j, l = int(bad[0][0]), int(bad[0][1])
                return (rep, int(order[a + j]), int(order[c0 + l])), int(total[j, l])
    return None


@lru_cache(maxsize=4096)
def _relation_array(rel: OrbitRelation) -> _TypeArray:
    return _TypeArray(rel.sorted_types, rel.arity)


def preservation_counterexample(b: Behaviour, rel: OrbitRelation) -> tuple[tuple[TypeMatrix, ...], TypeMatrix] | None:
    """Inputs from ``rel`` whose pointwise image is outside ``rel``, if any."""
    ta = _relation_array(rel)
    found = _find_violation(b, ta, full=False)
    if found is None:
        return None
    idx, code = found
    inputs = tuple(ta.types[i] for i in idx)
    return inputs, ta.decode(code)


def preserves(b: Behaviour, rel: OrbitRelation) -> bool:
    """True iff every r-tuple of types of ``rel`` is mapped into ``rel``.

    An image that is not a valid type is, in particular, not in ``rel``.
    """
    return preservation_counterexample(b, rel) is None


@lru_cache(maxsize=None)
def _full_array(k: int, base: BaseStructure) -> _TypeArray:
    return _TypeArray(enumerate_types(k, base, cap=max(k, 6)), k)


@lru_cache(maxsize=None)
def realizability_counterexample(b: Behaviour, base: BaseStructure) -> tuple[tuple[TypeMatrix, ...], TypeMatrix] | None:
    """Valid input types whose pointwise image is not a valid type, if any."""
    ta = _full_array(base.obstruction_size, base)
    found = _find_violation(b, ta, full=True)
    if found is None:
        return None
    idx, code = found
    return tuple(ta.types[i] for i in idx), ta.decode(code)


def realizable(b: Behaviour, base: BaseStructure) -> bool:
    """True iff pointwise application never leaves the valid types.

    Sweeps all r-tuples of valid types of the base's obstruction size, which
    is large enough to contain a witness of every validity violation.
    """
    return realizability_counterexample(b, base) is None


def close_under(b: Behaviour, types: set[TypeMatrix], base: BaseStructure) -> set[TypeMatrix]:
    """Smallest superset of ``types`` closed under ``b`` (invalid images are dropped).

    Semi-naive: each round only applies ``b`` to argument tuples that use at
    least one type found in the previous round.
    """
    current = set(types)
    if not current:
        return current
    k = next(iter(current)).arity
    if k == 1:
        return current
    valid = _full_array(k, base)
    table = np.asarray(b.table, dtype=np.int64)
    rows = np.array([t.entries for t in sorted(current)], dtype=np.int64).reshape(len(current), -1)
    known = set(valid.encode(rows).tolist())
    r = b.arity
    old = 0
    while old < len(rows):
        n = len(rows)
        fresh: set[int] = set()
        for first_new in range(r):
            # args before first_new are old, first_new is new, the rest are anything
            ranges = [np.arange(old)] * first_new + [np.arange(old, n)] + [np.arange(n)] * (r - first_new - 1)
            if any(len(x) == 0 for x in ranges):
                continue
            grids = np.meshgrid(*ranges, indexing="ij")
            flat = [g.ravel() for g in grids]
            idx = np.zeros((len(flat[0]), rows.shape[1]), dtype=np.int64)
            for a in flat:
                idx = idx * 3 + rows[a]
            codes = valid.encode(table[idx])
            codes = np.unique(codes[valid.member(codes)])
            fresh.update(c for c in codes.tolist() if c not in known)
        known |= fresh
        old = n
        if fresh:
            add = np.array([valid.decode(c).entries for c in sorted(fresh)], dtype=np.int64)
            rows = np.vstack([rows, add])
    return {valid.decode(c) for c in known}
