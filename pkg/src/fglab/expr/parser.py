"""Recursive-descent parser for the expression grammar.

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' signed-integer)?
    base   := number | ident | '(' expr ')' | func '(' expr ')' | '-' base
    number := integer | integer '/' integer | decimal

A rational literal ``a/b`` is recognised only when written without
whitespace; ``1 / 2`` is a quotient node.  This keeps every printed tree
re-parseable to the same tree.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .tree import FUNCTIONS, Add, Div, Func, Mul, Neg, Node, Num, Pow, Sub, Sym


class ExprSyntaxError(ValueError):
    """Parse failure; ``offset`` is the byte offset into the source text."""

    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} at offset {offset}")


@dataclass(frozen=True)
class _Tok:
    kind: str  # int, dec, ident, op, end
    text: str
    offset: int
    spaced: bool  # whitespace immediately before the token


_TOKEN = re.compile(
    r"(?P<dec>\d+\.\d*|\.\d+)|(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()])"
)


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    spaced = False
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
            spaced = True
            continue
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {ch!r}", _byte_offset(text, pos), text)
        kind = m.lastgroup
        assert kind is not None
        toks.append(_Tok(kind, m.group(), _byte_offset(text, pos), spaced))
        pos = m.end()
        spaced = False
    toks.append(_Tok("end", "", _byte_offset(text, len(text)), spaced))
    return toks


def _byte_offset(text: str, idx: int) -> int:
    return len(text[:idx].encode("utf-8"))


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, message: str, tok: _Tok | None = None) -> ExprSyntaxError:
        t = tok or self.tok
        return ExprSyntaxError(message, t.offset, self.text)

    def take(self, text: str) -> None:
        if self.tok.text != text:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        self.i += 1

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.text in ("+", "-") and self.tok.kind == "op":
            op = self.tok.text
            self.i += 1
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.tok.text in ("*", "/") and self.tok.kind == "op":
            op = self.tok.text
            self.i += 1
            rhs = self.factor()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def factor(self) -> Node:
        node = self.base()
        if self.tok.text == "^":
            self.i += 1
            sign = 1
            if self.tok.text in ("-", "+"):
                sign = -1 if self.tok.text == "-" else 1
                self.i += 1
            if self.tok.kind != "int":
                raise self.error("exponent must be an integer")
            node = Pow(node, sign * int(self.tok.text))
            self.i += 1
        return node

    def base(self) -> Node:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            slash, den = self.tok, self.peek()
            if (
                slash.text == "/"
                and not slash.spaced
                and den.kind == "int"
                and not den.spaced
            ):
                self.i += 2
                if int(den.text) == 0:
                    raise self.error("zero denominator in rational literal", den)
                return Num(Fraction(int(t.text), int(den.text)))
            return Num(Fraction(int(t.text)))
        if t.kind == "dec":
            self.i += 1
            return Num(Fraction(t.text))
        if t.kind == "ident":
            self.i += 1
            if self.tok.text == "(":
                if t.text not in FUNCTIONS:
                    raise self.error(f"unknown function {t.text!r}", t)
                self.i += 1
                arg = self.expr()
                self.take(")")
                return Func(t.text, arg)
            if t.text in FUNCTIONS:
                raise self.error(f"function {t.text!r} needs an argument", t)
            return Sym(t.text)
        if t.text == "(":
            self.i += 1
            node = self.expr()
            self.take(")")
            return node
        if t.text == "-":
            self.i += 1
            return Neg(self.base())
        if t.kind == "end":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected {t.text!r}")


def parse_expr(text: str) -> Node:
    """Parse ``text`` into an expression tree."""
    return _Parser(text).parse()
