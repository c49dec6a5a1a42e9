"""Parser for the copula mini-language used on the command line.

    expr  := prefix '*' expr | atom
    prefix:= 'perm' '(' int, ... ')' | 'refl' '(' int, ... ')'
    atom  := 'Pi' '(' int ')' | 'M' '(' int ')' | 'En' '(' int ',' num ')'
           | 'prod' '(' expr ',' expr ')' | 'mix' '(' num ',' expr ',' expr ')'
           | 'marg' '(' expr ';' 'drop' '=' int, ... ')' | '(' expr ')'

Whitespace is ignored.  ``refl(1,3)*M(4)`` is ``sigma_1^* sigma_3^* M^4``;
``perm(2,1,3)*C`` evaluates ``C(x_2, x_1, x_3)``; indices are 1-based.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .copula import (
    Copula,
    ContractViolation,
    DimensionCapError,
    En,
    M,
    MarginalOf,
    Mixture,
    Pi,
    Product,
    SymmetryApplied,
)
from .symmetry import Symmetry

_TOKEN = re.compile(
    r"\s*(?:(?P<num>[-+]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[(),*;=]))"
)


class CopulaSpecError(ValueError):
    """Syntax or construction error in a copula spec, with the character offset."""

    def __init__(self, message: str, position: int, text: str):
        self.position = position
        self.text = text
        pointer = " " * position + "^"
        super().__init__(f"{message} at position {position}\n  {text}\n  {pointer}")


@dataclass
class _Tok:
    kind: str
    value: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise CopulaSpecError(f"unexpected character {text[start]!r}", start, text)
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, message: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        raise CopulaSpecError(message, tok.pos, self.text)

    def take(self, kind: str, value: str | None = None) -> _Tok:
        tok = self.peek()
        if tok.kind != kind or (value is not None and tok.value != value):
            want = value or kind
            got = tok.value or "end of input"
            self.fail(f"expected {want!r}, found {got!r}")
        self.i += 1
        return tok

    def integer(self) -> int:
        tok = self.take("num")
        try:
            return int(tok.value)
        except ValueError:
            self.fail(f"expected an integer, found {tok.value!r}", tok)

    def number(self) -> float:
        return float(self.take("num").value)

    def int_list(self) -> list[int]:
        out = [self.integer()]
        while self.peek().value == ",":
            self.take("op", ",")
            out.append(self.integer())
        return out

    def build(self, tok: _Tok, factory, *args) -> Copula:
        try:
            return factory(*args)
        except DimensionCapError:
            raise
        except (ContractViolation, ValueError) as exc:
            self.fail(str(exc), tok)

    def expr(self) -> Copula:
        tok = self.peek()
        if tok.kind == "name" and tok.value in ("perm", "refl"):
            self.i += 1
            self.take("op", "(")
            idx = self.int_list()
            self.take("op", ")")
            self.take("op", "*")
            inner = self.expr()
            if tok.value == "perm":
                sym = self.build(tok, Symmetry.permutation, idx)
            else:
                sym = self.build(tok, lambda: Symmetry.reflection(inner.dim, *idx))
            return self.build(tok, SymmetryApplied, sym, inner)
        return self.atom()

    def atom(self) -> Copula:
        tok = self.peek()
        if tok.value == "(":
            self.take("op", "(")
            inner = self.expr()
            self.take("op", ")")
            return inner
        name = self.take("name").value
        self.take("op", "(")
        if name == "Pi":
            out = self.build(tok, Pi, self.integer())
        elif name == "M":
            out = self.build(tok, M, self.integer())
        elif name == "En":
            n = self.integer()
            self.take("op", ",")
            out = self.build(tok, En, n, self.number())
        elif name == "prod":
            a = self.expr()
            self.take("op", ",")
            out = self.build(tok, Product, a, self.expr())
        elif name == "mix":
            w = self.number()
            self.take("op", ",")
            a = self.expr()
            self.take("op", ",")
            out = self.build(tok, Mixture, w, a, self.expr())
        elif name == "marg":
            base = self.expr()
            self.take("op", ";")
            self.take("name", "drop")
            self.take("op", "=")
            out = self.build(tok, MarginalOf, base, tuple(self.int_list()))
        else:
            self.fail(f"unknown constructor {name!r}", tok)
        self.take("op", ")")
        return out


def parse_copula(text: str, top_level: bool = True) -> Copula:
    """Parse a copula spec; top-level results must have dimension >= 2."""
    p = _Parser(text)
    out = p.expr()
    if p.peek().kind != "end":
        p.fail(f"unexpected trailing input {p.peek().value!r}")
    if top_level and out.dim < 2:
        raise CopulaSpecError("a copula must have dimension >= 2", 0, text)
    return out
