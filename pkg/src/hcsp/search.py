"""Backtracking over pair entries with incremental validity pruning.

Shared by type enumeration and the brute-force oracle. Every triple is
checked once its three pairs are assigned, and every clique bound is
checked on the edge that completes the clique, so a full assignment that
survives the search is a valid type.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .core import E, EQ, N, OMEGA, BaseStructure, pair_index, pair_list


def _triple_table(equiv: bool) -> list[list[list[bool]]]:
    ok = [[[True] * 3 for _ in range(3)] for _ in range(3)]
    for a in range(3):
        for b in range(3):
            for c in range(3):
                vals = (a, b, c)
                good = True
                # any EQ among the three forces the other two to agree
                for x in range(3):
                    if vals[x] == EQ and vals[(x + 1) % 3] != vals[(x + 2) % 3]:
                        good = False
                if equiv and sum(v != N for v in vals) == 2:
                    good = False
                ok[a][b][c] = good
    return ok


_TRIPLES = {False: _triple_table(False), True: _triple_table(True)}


@dataclass
class PrefixCheck:
    """Allowed value prefixes over a sequence of pair positions.

    ``pairs`` lists the positions in assignment order; ``prefixes[t]`` holds
    the allowed value tuples for ``pairs[:t + 1]``.
    """

    pairs: tuple[int, ...]
    prefixes: list[set[tuple[int, ...]]]

    @classmethod
    def from_rows(cls, pairs: Sequence[int], rows: Iterable[Sequence[int]]) -> "PrefixCheck":
        rows = [tuple(r) for r in rows]
        prefixes = [{r[:t + 1] for r in rows} for t in range(len(pairs))]
        return cls(tuple(pairs), prefixes)


class PairSearch:
    """Depth-first search over the pair entries of a k-variable type."""

    def __init__(self, k: int, base: BaseStructure, order: Iterable[int] | None = None,
                 values: Sequence[int] | None = None, checks: Sequence[PrefixCheck] = ()):
        self.k = k
        self.base = base
        self.pairs = pair_list(k)
        self.idx = pair_index(k)
        self.order = list(range(len(self.pairs)) if order is None else order)
        if sorted(self.order) != list(range(len(self.pairs))):
            raise ValueError("order must be a permutation of the pair positions")
        self.values = tuple(base.values if values is None else values)
        self.triples = _TRIPLES[base.kind == "equiv"]
        self.e_bound = base.e_clique_bound
        self.n_bound = base.n_clique_bound
        step_of = {p: t for t, p in enumerate(self.order)}
        self.checks_at: list[list[tuple[PrefixCheck, int]]] = [[] for _ in self.order]
        for ck in checks:
            steps = [step_of[p] for p in ck.pairs]
            if steps != sorted(steps):
                raise ValueError("prefix check pairs must follow the search order")
            for t, s in enumerate(steps):
                self.checks_at[s].append((ck, t))
        self.vals = [-1] * len(self.pairs)
        self.nodes = 0

    def _clique_through(self, i: int, j: int, v: int, size: float) -> bool:
        if size == OMEGA:
            return False
        size = int(size)
        if size <= 2:
            return True
        vals, idx = self.vals, self.idx
        cands = [l for l in range(self.k)
                 if l != i and l != j and vals[idx[i][l]] == v and vals[idx[j][l]] == v]

        def extend(chosen: int, cands: list[int]) -> bool:
            if chosen == size:
                return True
            if chosen + len(cands) < size:
                return False
            for pos, a in enumerate(cands):
                nxt = [b for b in cands[pos + 1:] if vals[idx[a][b]] == v]
                if extend(chosen + 1, nxt):
                    return True
            return False

        return extend(2, cands)

    def _consistent(self, step: int) -> bool:
        p = self.order[step]
        i, j = self.pairs[p]
        vals, idx = self.vals, self.idx
        v = vals[p]
        row = self.triples[v]
        for l in range(self.k):
            if l == i or l == j:
                continue
            a = vals[idx[i][l]]
            if a < 0:
                continue
            b = vals[idx[j][l]]
            if b >= 0 and not row[a][b]:
                return False
        if v == E and self._clique_through(i, j, E, self.e_bound):
            return False
        if v == N and self._clique_through(i, j, N, self.n_bound):
            return False
        for ck, t in self.checks_at[step]:
            key = tuple(vals[q] for q in ck.pairs[:t + 1])
            if key not in ck.prefixes[t]:
                return False
        return True

    def solutions(self) -> Iterator[tuple[int, ...]]:
        """Yield every complete assignment that passes all checks."""
        n_steps = len(self.order)
        if n_steps == 0:
            yield ()
            return
        vals, order, values = self.vals, self.order, self.values

        def rec(step: int) -> Iterator[tuple[int, ...]]:
            p = order[step]
            for v in values:
                vals[p] = v
                self.nodes += 1
                if self._consistent(step):
                    if step + 1 == n_steps:
                        yield tuple(vals)
                    else:
                        yield from rec(step + 1)
            vals[p] = -1

        yield from rec(0)

    def first(self) -> tuple[int, ...] | None:
        return next(self.solutions(), None)
