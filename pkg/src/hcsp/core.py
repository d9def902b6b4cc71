"""Base structures, atomic types, orbit relations and instances.

A type of a k-tuple is stored as the row-major list of its off-diagonal
pair values (0,1),(0,2),...,(k-2,k-1); the diagonal is implicitly EQ.
Pair values are ordered E < N < EQ, which also fixes the canonical order
of types.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

__all__ = [
    "OMEGA", "Pair", "E", "N", "EQ", "HcspError", "CapExceeded", "DelegatedBase",
    "ArityMismatch", "UnknownRelation", "ParseError", "InvariantBreach", "DEFAULT_TYPE_CAP",
    "BaseStructure", "TypeMatrix", "Validity", "validate_type", "enumerate_types",
    "OrbitRelation", "Signature", "Constraint", "Instance", "skeleton",
    "pair_list", "pair_index", "check_witness", "all_eq_type", "has_clique",
    "SolveResult", "witness_from_classes", "valid_type_set",
]

OMEGA = math.inf
DEFAULT_TYPE_CAP = 6


class Pair(enum.IntEnum):
    E = 0
    N = 1
    EQ = 2

    @property
    def symbol(self) -> str:
        return "E" if self is Pair.E else "N" if self is Pair.N else "="

    @classmethod
    def parse(cls, token: str) -> "Pair":
        try:
            return _TOKENS[token.strip()]
        except KeyError:
            raise ParseError(f"unknown pair value {token!r}") from None


E, N, EQ = Pair.E, Pair.N, Pair.EQ
_TOKENS = {"E": E, "N": N, "=": EQ, "EQ": EQ, "EQUAL": EQ}


class HcspError(Exception):
    """Base class for all library errors."""


class CapExceeded(HcspError):
    pass


class DelegatedBase(HcspError, ValueError):
    """Base structure whose classification is outside this library."""


class ArityMismatch(HcspError, ValueError):
    pass


class UnknownRelation(HcspError, KeyError):
    pass


class ParseError(HcspError, ValueError):
    pass


class InvariantBreach(HcspError):
    """An internal guarantee failed; indicates a bug or a misclassified input."""


def _fmt_param(x: float) -> str:
    return "omega" if x == OMEGA else str(int(x))


@dataclass(frozen=True)
class BaseStructure:
    """Parameters of a homogeneous graph.

    ``henson``: the K_n-free Henson graph, 3 <= n < omega.
    ``equiv``: E-or-equal is an equivalence relation with n classes of size s;
    exactly one of n, s is omega and the other is at least 2.
    ``equality``: the pure set, used after collapsing; only N (read as
    "distinct") and EQ occur.
    """

    kind: str
    n: float = OMEGA
    s: float = OMEGA

    def __post_init__(self):
        for attr in ("n", "s"):
            v = getattr(self, attr)
            if v != OMEGA:
                if int(v) != v:
                    raise ValueError(f"{attr} must be an integer or omega")
                object.__setattr__(self, attr, int(v))
        if self.kind == "henson":
            if self.n == OMEGA or self.n < 3:
                raise ValueError("henson requires 3 <= n < omega")
            object.__setattr__(self, "s", OMEGA)
        elif self.kind == "equiv":
            if self.n < 1 or self.s < 1:
                raise ValueError("equiv parameters must be positive")
            if self.n == OMEGA and self.s == OMEGA:
                raise DelegatedBase("equiv(omega,omega) is delegated")
            if self.n == 1 or self.s == 1:
                raise DelegatedBase(f"{self} is delegated")
            if self.n != OMEGA and self.s != OMEGA:
                raise ValueError("equiv requires one of n, s to be omega")
        elif self.kind == "equality":
            object.__setattr__(self, "n", OMEGA)
            object.__setattr__(self, "s", OMEGA)
        else:
            raise ValueError(f"unknown base kind {self.kind!r}")

    @classmethod
    def henson(cls, n: int) -> "BaseStructure":
        return cls("henson", n)

    @classmethod
    def equiv(cls, n: float, s: float) -> "BaseStructure":
        return cls("equiv", n, s)

    @classmethod
    def equality(cls) -> "BaseStructure":
        return cls("equality")

    def __str__(self) -> str:
        if self.kind == "henson":
            return f"henson({self.n})"
        if self.kind == "equiv":
            return f"equiv({_fmt_param(self.n)},{_fmt_param(self.s)})"
        return "equality"

    @property
    def values(self) -> tuple[Pair, ...]:
        return (N, EQ) if self.kind == "equality" else (E, N, EQ)

    @property
    def e_clique_bound(self) -> float:
        """Smallest forbidden size of a pairwise-E set."""
        if self.kind == "henson":
            return self.n
        if self.kind == "equiv" and self.s != OMEGA:
            return self.s + 1
        return OMEGA

    @property
    def n_clique_bound(self) -> float:
        """Smallest forbidden size of a pairwise-N set."""
        if self.kind == "equiv" and self.n != OMEGA:
            return self.n + 1
        return OMEGA

    @property
    def obstruction_size(self) -> int:
        """Arity that witnesses every possible validity violation."""
        if self.kind == "henson":
            return max(3, self.n)
        if self.kind == "equiv":
            if self.n != OMEGA:
                return min(max(3, self.n + 1), 7)
            return min(2 * self.s + 1, 7)
        return 3


@lru_cache(maxsize=None)
def pair_list(k: int) -> tuple[tuple[int, int], ...]:
    return tuple(itertools.combinations(range(k), 2))


@lru_cache(maxsize=None)
def pair_index(k: int) -> tuple[tuple[int, ...], ...]:
    """Square table mapping (i, j) to the entry position; -1 on the diagonal."""
    table = [[-1] * k for _ in range(k)]
    for p, (i, j) in enumerate(pair_list(k)):
        table[i][j] = table[j][i] = p
    return tuple(tuple(row) for row in table)


@dataclass(frozen=True, order=True)
class TypeMatrix:
    arity: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.arity < 0:
            raise ValueError("arity must be non-negative")
        entries = tuple(int(v) for v in self.entries)
        if len(entries) != self.arity * (self.arity - 1) // 2:
            raise ValueError("entry count does not match arity")
        if any(v not in (0, 1, 2) for v in entries):
            raise ValueError("entries must be E, N or EQ")
        object.__setattr__(self, "entries", entries)

    def __getitem__(self, ij: tuple[int, int]) -> Pair:
        i, j = ij
        if i == j:
            return EQ
        return Pair(self.entries[pair_index(self.arity)[i][j]])

    @classmethod
    def from_string(cls, k: int, text: str) -> "TypeMatrix":
        text = text.strip()
        return cls(k, tuple(Pair.parse(c) for c in text))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Pair]]) -> "TypeMatrix":
        k = len(rows)
        return cls(k, tuple(rows[i][j] for i, j in pair_list(k)))

    def to_string(self) -> str:
        return "".join(Pair(v).symbol for v in self.entries)

    def __str__(self) -> str:
        return f"<{self.arity}:{self.to_string()}>"

    def induced(self, positions: Sequence[int]) -> "TypeMatrix":
        """Type of the sub-tuple at ``positions`` (repeats give EQ)."""
        idx = pair_index(self.arity)
        out = []
        for a, b in pair_list(len(positions)):
            i, j = positions[a], positions[b]
            out.append(EQ if i == j else self.entries[idx[i][j]])
        return TypeMatrix(len(positions), tuple(out))

    def permuted(self, perm: Sequence[int]) -> "TypeMatrix":
        """Type of the tuple whose i-th entry is the perm[i]-th entry of this one."""
        return self.induced(perm)

    def map_entries(self, f) -> "TypeMatrix":
        return TypeMatrix(self.arity, tuple(f(Pair(v)) for v in self.entries))


def all_eq_type(k: int) -> TypeMatrix:
    return TypeMatrix(k, (EQ,) * (k * (k - 1) // 2))


def skeleton(m: TypeMatrix) -> TypeMatrix:
    """Equality pattern of a type: EQ stays, every other entry becomes N."""
    return TypeMatrix(m.arity, tuple(EQ if v == EQ else N for v in m.entries))


def has_clique(adj: dict[int, set[int]], size: float, within: Iterable[int] | None = None) -> list[int] | None:
    """Return a clique of the given size in ``adj`` or None."""
    if size == OMEGA:
        return None
    size = int(size)
    nodes = sorted(adj) if within is None else sorted(within)

    def extend(clique: list[int], cands: list[int]) -> list[int] | None:
        if len(clique) == size:
            return clique
        if len(clique) + len(cands) < size:
            return None
        for pos, v in enumerate(cands):
            nxt = [w for w in cands[pos + 1:] if w in adj.get(v, ())]
            found = extend(clique + [v], nxt)
            if found:
                return found
        return None

    if size <= 0:
        return []
    return extend([], nodes)


@dataclass(frozen=True)
class Validity:
    ok: bool
    rule: str = ""
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


VALID = Validity(True)


def validate_type(m: TypeMatrix, base: BaseStructure) -> Validity:
    """Check the validity rules of ``m`` over ``base``.

    Rules are checked in the order alphabet, congruence, clique, class-size,
    class-count, transitivity; the first failure is reported.
    """
    k = m.arity
    if base.kind == "equality" and E in m.entries:
        return Validity(False, "alphabet", "E does not occur over the equality base")
    for i, j in pair_list(k):
        if m[i, j] == EQ:
            for l in range(k):
                if m[i, l] != m[j, l]:
                    return Validity(False, "congruence",
                                    f"({i + 1},{j + 1}) is EQ but ({i + 1},{l + 1}) != ({j + 1},{l + 1})")
    reps = [i for i in range(k) if all(m[i, j] != EQ for j in range(i))]
    if base.kind == "henson":
        adj = {i: {j for j in reps if j != i and m[i, j] == E} for i in reps}
        found = has_clique(adj, base.n)
        if found:
            return Validity(False, "clique", f"K_{base.n} on {[i + 1 for i in found]}")
        return VALID
    if base.kind == "equality":
        return VALID
    # equiv: blocks are connected components of Eq among representatives
    block = {i: i for i in reps}

    def find(x):
        while block[x] != x:
            block[x] = block[block[x]]
            x = block[x]
        return x

    for a, b in itertools.combinations(reps, 2):
        if m[a, b] == E:
            block[find(a)] = find(b)
    members: dict[int, list[int]] = {}
    for i in reps:
        members.setdefault(find(i), []).append(i)
    for comp in members.values():
        if len(comp) > base.s:
            return Validity(False, "class-size",
                            f"Eq-block with {len(comp)} distinct members {[i + 1 for i in comp]}")
    if len(members) > base.n:
        return Validity(False, "class-count", f"{len(members)} Eq-blocks")
    for comp in members.values():
        for a, b in itertools.combinations(comp, 2):
            if m[a, b] != E:
                return Validity(False, "transitivity", f"({a + 1},{b + 1}) breaks Eq-transitivity")
    return VALID


def enumerate_types(k: int, base: BaseStructure, cap: int = DEFAULT_TYPE_CAP) -> list[TypeMatrix]:
    """All valid types of arity k over ``base`` in canonical order."""
    if k > cap:
        raise CapExceeded(f"arity {k} exceeds type cap {cap}")
    return list(_enumerate(k, base))


@lru_cache(maxsize=64)
def _enumerate(k: int, base: BaseStructure) -> tuple[TypeMatrix, ...]:
    from .search import PairSearch

    search = PairSearch(k, base, order=range(len(pair_list(k))), values=tuple(sorted(base.values)))
    return tuple(TypeMatrix(k, vals) for vals in search.solutions())


@lru_cache(maxsize=64)
def valid_type_set(k: int, base: BaseStructure) -> frozenset[TypeMatrix]:
    return frozenset(_enumerate(k, base))


@dataclass(frozen=True)
class OrbitRelation:
    """A relation given by the set of types of its tuples."""

    name: str
    arity: int
    types: frozenset[TypeMatrix]
    base: BaseStructure

    def __post_init__(self):
        object.__setattr__(self, "types", frozenset(self.types))
        if self.arity < 1:
            raise ValueError("arity must be at least 1")
        for t in self.types:
            if t.arity != self.arity:
                raise ArityMismatch(f"type {t} in relation {self.name} of arity {self.arity}")
        if self.arity <= DEFAULT_TYPE_CAP:
            bad = self.types - valid_type_set(self.arity, self.base)
        else:
            bad = {t for t in self.types if not validate_type(t, self.base)}
        if bad:
            raise ValueError(f"relation {self.name} has invalid types over {self.base}: {sorted(bad)[0]}")

    def __len__(self) -> int:
        return len(self.types)

    def __contains__(self, t: TypeMatrix) -> bool:
        return t in self.types

    @cached_property
    def sorted_types(self) -> tuple[TypeMatrix, ...]:
        return tuple(sorted(self.types))

    def renamed(self, name: str) -> "OrbitRelation":
        return OrbitRelation(name, self.arity, self.types, self.base)

    @classmethod
    def full(cls, k: int, base: BaseStructure, name: str = "T") -> "OrbitRelation":
        return cls(name, k, valid_type_set(k, base), base)


@dataclass(frozen=True)
class Signature:
    base: BaseStructure
    relations: tuple[OrbitRelation, ...]

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple(self.relations))
        names = [r.name for r in self.relations]
        if len(set(names)) != len(names):
            raise ValueError("relation names must be distinct")
        for r in self.relations:
            if r.base != self.base:
                raise ValueError(f"relation {r.name} is over {r.base}, signature over {self.base}")

    @cached_property
    def by_name(self) -> dict[str, OrbitRelation]:
        return {r.name: r for r in self.relations}

    def __getitem__(self, name: str) -> OrbitRelation:
        try:
            return self.by_name[name]
        except KeyError:
            raise UnknownRelation(name) from None

    def __contains__(self, name: str) -> bool:
        return name in self.by_name


@dataclass(frozen=True)
class Constraint:
    rel: str
    vars: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))


@dataclass(frozen=True)
class Instance:
    variables: tuple[str, ...]
    constraints: tuple[Constraint, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(
            c if isinstance(c, Constraint) else Constraint(*c) for c in self.constraints))
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("variable names must be distinct")
        known = set(self.variables)
        for c in self.constraints:
            for v in c.vars:
                if v not in known:
                    raise ValueError(f"constraint {c.rel} uses undeclared variable {v!r}")

    @cached_property
    def var_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.variables)}

    def check(self, sig: Signature) -> None:
        """Raise if a constraint names an unknown relation or has the wrong arity."""
        for c in self.constraints:
            rel = sig[c.rel]
            if rel.arity != len(c.vars):
                raise ArityMismatch(f"{c.rel} has arity {rel.arity}, got {len(c.vars)} variables")

    def positions(self, c: Constraint) -> tuple[int, ...]:
        return tuple(self.var_index[v] for v in c.vars)


def check_witness(sig: Signature, inst: Instance, witness: TypeMatrix) -> list[str]:
    """Problems with a claimed solution; an empty list means it is sound."""
    problems = []
    if witness.arity != len(inst.variables):
        return [f"witness arity {witness.arity} for {len(inst.variables)} variables"]
    v = validate_type(witness, sig.base)
    if not v:
        problems.append(f"invalid witness: {v.rule} {v.detail}")
    for c in inst.constraints:
        t = witness.induced(inst.positions(c))
        if t not in sig[c.rel]:
            problems.append(f"constraint {c.rel}{c.vars} gets type {t.to_string()}")
    return problems


@dataclass(frozen=True)
class SolveResult:
    """Outcome of a satisfiability check; ``witness`` is present iff SAT."""

    status: str
    witness: TypeMatrix | None = None
    solver: str = ""
    reason: str = ""
    details: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.status not in ("SAT", "UNSAT"):
            raise ValueError("status must be SAT or UNSAT")
        if (self.status == "SAT") != (self.witness is not None):
            raise ValueError("witness must be present exactly for SAT")

    @property
    def sat(self) -> bool:
        return self.status == "SAT"


def witness_from_classes(n_vars: int, rep: Sequence[int], value) -> TypeMatrix:
    """Build a type over n_vars variables: EQ inside a class, ``value(ru, rv)`` across."""
    entries = []
    for i, j in pair_list(n_vars):
        ri, rj = rep[i], rep[j]
        entries.append(EQ if ri == rj else value(ri, rj))
    return TypeMatrix(n_vars, tuple(entries))
