"""Quantifier-free formulas over pair atoms, compiled to orbit relations.

Grammar::

    expr   := term ('|' term)*
    term   := factor ('&' factor)*
    factor := '!' factor | '(' expr ')' | atom | 'true' | 'false'
    atom   := NAME '(' INT ',' INT ')'      NAME in E, N, Eq, eq, neq

Indices are 1-based.
"""

from __future__ import annotations

import re
from typing import Callable

from .core import (DEFAULT_TYPE_CAP, EQ, E, N, BaseStructure, OrbitRelation, ParseError,
                   TypeMatrix, enumerate_types)

__all__ = ["parse_formula", "compile_formula"]

Pred = Callable[[TypeMatrix], bool]

_ATOMS: dict[str, Callable[[int], bool]] = {
    "E": lambda v: v == E,
    "N": lambda v: v == N,
    "Eq": lambda v: v != N,
    "eq": lambda v: v == EQ,
    "neq": lambda v: v != EQ,
}

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]\w*)|(.))")


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            break
        tokens.append(m.group(1) or m.group(2) or m.group(3))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str, k: int):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.k = k

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of formula")
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, got {tok!r}")
        self.pos += 1
        return tok

    def parse(self) -> Pred:
        pred = self.expr()
        if self.peek() is not None:
            raise ParseError(f"trailing input at {self.peek()!r}")
        return pred

    def expr(self) -> Pred:
        parts = [self.term()]
        while self.peek() == "|":
            self.take()
            parts.append(self.term())
        if len(parts) == 1:
            return parts[0]
        return lambda m: any(p(m) for p in parts)

    def term(self) -> Pred:
        parts = [self.factor()]
        while self.peek() == "&":
            self.take()
            parts.append(self.factor())
        if len(parts) == 1:
            return parts[0]
        return lambda m: all(p(m) for p in parts)

    def factor(self) -> Pred:
        tok = self.peek()
        if tok == "!":
            self.take()
            inner = self.factor()
            return lambda m: not inner(m)
        if tok == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        if tok in ("true", "false"):
            self.take()
            value = tok == "true"
            return lambda m: value
        if tok in _ATOMS:
            self.take()
            test = _ATOMS[tok]
            self.take("(")
            i = self.index()
            self.take(",")
            j = self.index()
            self.take(")")
            return lambda m: test(m[i, j])
        raise ParseError(f"unexpected token {tok!r}")

    def index(self) -> int:
        tok = self.take()
        if not tok.isdigit():
            raise ParseError(f"expected an index, got {tok!r}")
        i = int(tok)
        if not 1 <= i <= self.k:
            raise ParseError(f"index {i} out of range 1..{self.k}")
        return i - 1


def parse_formula(text: str, k: int) -> Pred:
    """Parse ``text`` into a predicate on arity-k types."""
    return _Parser(text, k).parse()


def compile_formula(text: str, k: int, base: BaseStructure, name: str = "R",
                    cap: int = DEFAULT_TYPE_CAP) -> OrbitRelation:
    """The relation of all valid arity-k types satisfying ``text``."""
    pred = parse_formula(text, k)
    types = frozenset(t for t in enumerate_types(k, base, cap) if pred(t))
    return OrbitRelation(name, k, types, base)
