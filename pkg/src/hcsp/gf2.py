"""Linear algebra over GF(2) with rows stored as Python int bitsets.

Bit i of a row mask is the coefficient of variable i.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core import HcspError

__all__ = ["Gf2System", "Solution", "Inconsistent", "gf2_solve", "affine_hull", "EmptyInput",
           "parity", "bits_to_int", "int_to_bits"]


class EmptyInput(HcspError, ValueError):
    pass


def parity(x: int) -> int:
    return bin(x).count("1") & 1


def bits_to_int(bits: Sequence[int]) -> int:
    out = 0
    for i, b in enumerate(bits):
        if b:
            out |= 1 << i
    return out


def int_to_bits(x: int, width: int) -> tuple[int, ...]:
    return tuple((x >> i) & 1 for i in range(width))


@dataclass
class Gf2System:
    n_vars: int
    rows: list[tuple[int, int]] = field(default_factory=list)
    names: list[str] | None = None

    def add(self, mask: int, rhs: int) -> None:
        if mask >> self.n_vars:
            raise ValueError("row mask wider than the variable count")
        self.rows.append((mask, rhs & 1))

    def satisfied_by(self, bits: Sequence[int]) -> bool:
        x = bits_to_int(bits)
        return all(parity(m & x) == r for m, r in self.rows)

    def to_json(self) -> dict:
        names = self.names or [f"v{i}" for i in range(self.n_vars)]
        return {
            "variables": names,
            "rows": [{"vars": [names[i] for i in range(self.n_vars) if (m >> i) & 1], "rhs": r}
                     for m, r in self.rows],
        }


@dataclass(frozen=True)
class Solution:
    bits: tuple[int, ...]


@dataclass(frozen=True)
class Inconsistent:
    """``rows`` are indices of input rows summing to 0 = 1."""

    rows: tuple[int, ...]


def gf2_solve(system: Gf2System) -> Solution | Inconsistent:
    pivots: dict[int, tuple[int, int, int]] = {}
    for i, (mask, rhs) in enumerate(system.rows):
        combo = 1 << i
        while mask:
            top = mask.bit_length() - 1
            if top not in pivots:
                pivots[top] = (mask, rhs, combo)
                break
            pm, pr, pc = pivots[top]
            mask ^= pm
            rhs ^= pr
            combo ^= pc
        else:
            if rhs:
                return Inconsistent(tuple(j for j in range(i + 1) if (combo >> j) & 1))
    x = 0
    for top in sorted(pivots):
        mask, rhs, _ = pivots[top]
        if parity(mask & x & ~(1 << top)) ^ rhs:
            x |= 1 << top
    return Solution(int_to_bits(x, system.n_vars))


def _reduced_basis(vectors: Iterable[int]) -> dict[int, int]:
    """Reduced row echelon basis keyed by pivot column (lowest set bit)."""
    basis: dict[int, int] = {}
    for v in vectors:
        for col, row in basis.items():
            if (v >> col) & 1:
                v ^= row
        if not v:
            continue
        col = (v & -v).bit_length() - 1
        for c in list(basis):
            if (basis[c] >> col) & 1:
                basis[c] ^= v
        basis[col] = v
    return basis


def affine_hull(vectors: Iterable[Sequence[int]], width: int) -> tuple[Gf2System, bool]:
    """Equations cutting out the affine hull of ``vectors``; exact iff the hull adds nothing."""
    ints = {bits_to_int(v) for v in vectors}
    if not ints:
        raise EmptyInput("affine hull of no vectors")
    ordered = sorted(ints)
    v0 = ordered[0]
    basis = _reduced_basis(v ^ v0 for v in ordered[1:])
    system = Gf2System(width)
    for free in range(width):
        if free in basis:
            continue
        h = 1 << free
        for col, row in basis.items():
            if (row >> free) & 1:
                h |= 1 << col
        system.add(h, parity(h & v0))
    return system, (1 << len(basis)) == len(ints)
