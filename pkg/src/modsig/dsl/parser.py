"""Recursive-descent parser for structure expressions.

Grammar::

    expr    := atom | call
    atom    := COMPONENT | NAME          COMPONENT is x<digits>, 1-based
    call    := ("series" | "min" | "parallel" | "max") "(" expr ("," expr)* ")"
             | "koutofn" "(" INT ";" expr ("," expr)* ")"

``min``/``max`` are aliases and parse to the same nodes as
``series``/``parallel``. ``NAME`` atoms refer to modules and only make
sense in an organizer expression.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

from ..errors import ParseError

KEYWORDS = {"series": "series", "min": "series", "parallel": "parallel", "max": "parallel", "koutofn": "koutofn"}


@dataclass(frozen=True)
class Component:
    index: int


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Series:
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class Parallel:
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class KOutOfN:
    k: int
    args: tuple["Expr", ...]


Expr = Union[Component, Name, Series, Parallel, KOutOfN]


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "int", "(", ")", ",", ";", "eof"
    text: str
    line: int
    column: int


_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|(\d+)|([(),;]))")


def tokenize(text: str, line: int = 1, column: int = 1) -> Iterator[Token]:
    pos = 0
    # (line, column) tracking across embedded newlines
    def where(p: int) -> tuple[int, int]:
        before = text[:p]
        nl = before.count("\n")
        if nl:
            return line + nl, p - before.rfind("\n")
        return line, column + p

    while True:
        m = _TOKEN.match(text, pos)
        if not m:
            rest = len(text) - len(text[pos:].lstrip())
            if rest >= len(text):
                yield Token("eof", "", *where(len(text)))
                return
            raise ParseError(f"unexpected character {text[rest]!r}", *where(rest))
        start = m.start(m.lastindex)
        if m.group(1):
            yield Token("ident", m.group(1), *where(start))
        elif m.group(2):
            yield Token("int", m.group(2), *where(start))
        else:
            yield Token(m.group(3), m.group(3), *where(start))
        pos = m.end()


class Parser:
    def __init__(self, text: str, line: int = 1, column: int = 1):
        self.tokens = list(tokenize(text, line, column))
        self.pos = 0
        self.atom_positions: list[tuple[Expr, int, int]] = []

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.advance()
        if tok.kind != kind:
            found = tok.text or "end of input"
            raise ParseError(f"expected {kind!r}, found {found!r}", tok.line, tok.column)
        return tok

    def parse(self) -> Expr:
        expr = self.expr()
        tok = self.peek()
        if tok.kind != "eof":
            raise ParseError(f"unexpected {tok.text!r} after expression", tok.line, tok.column)
        return expr

    def expr(self) -> Expr:
        tok = self.advance()
        if tok.kind != "ident":
            found = tok.text or "end of input"
            raise ParseError(f"expected an expression, found {found!r}", tok.line, tok.column)
        op = KEYWORDS.get(tok.text)
        if op is None:
            if self.peek().kind == "(":
                raise ParseError(f"unknown combinator {tok.text!r}", tok.line, tok.column)
            m = re.fullmatch(r"x(\d+)", tok.text)
            if m:
                index = int(m.group(1))
                if index < 1:
                    raise ParseError("component indices start at 1", tok.line, tok.column)
                atom = Component(index)
            else:
                atom = Name(tok.text)
            self.atom_positions.append((atom, tok.line, tok.column))
            return atom
        self.expect("(")
        k = None
        if op == "koutofn":
            k_tok = self.expect("int")
            k = int(k_tok.text)
            self.expect(";")
        args = [self.expr()]
        while self.peek().kind == ",":
            self.advance()
            args.append(self.expr())
        self.expect(")")
        if op == "series":
            return Series(tuple(args))
        if op == "parallel":
            return Parallel(tuple(args))
        if not 1 <= k <= len(args):
            raise ParseError(f"koutofn threshold {k} outside 1..{len(args)}", k_tok.line, k_tok.column)
        return KOutOfN(k, tuple(args))


def atoms(expr: Expr) -> list[Expr]:
    """Leaves of the expression, left to right."""
    if isinstance(expr, (Component, Name)):
        return [expr]
    out = []
    for a in expr.args:
        out.extend(atoms(a))
    return out


def parse_structure(text: str, line: int = 1, column: int = 1) -> Expr:
    """Parse ``text`` and reject repeated atoms."""
    parser = Parser(text, line, column)
    expr = parser.parse()
    seen = set()
    for atom, at_line, at_column in parser.atom_positions:
        if atom in seen:
            label = f"x{atom.index}" if isinstance(atom, Component) else atom.name
            raise ParseError(f"duplicate atom {label}", at_line, at_column)
        seen.add(atom)
    return expr


def to_text(expr: Expr) -> str:
    if isinstance(expr, Component):
        return f"x{expr.index}"
    if isinstance(expr, Name):
        return expr.name
    inner = ", ".join(to_text(a) for a in expr.args)
    if isinstance(expr, Series):
        return f"series({inner})"
    if isinstance(expr, Parallel):
        return f"parallel({inner})"
    return f"koutofn({expr.k}; {inner})"
