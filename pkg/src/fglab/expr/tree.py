"""Immutable expression trees and the canonical printer.

Trees mirror the grammar exactly: binary ``+ - * /`` nodes are left
associative, ``^`` takes a signed integer exponent and unary minus binds
to a base.  Printing inserts only the parentheses the grammar needs, so
``parse(to_string(t)) == t`` for every tree the parser can produce.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh", "tanh")


class Node:
    __slots__ = ()

    # building helpers; these never simplify
    def __add__(self, other: NodeLike) -> Node:
        return Add(self, as_node(other))

    def __radd__(self, other: NodeLike) -> Node:
        return Add(as_node(other), self)

    def __sub__(self, other: NodeLike) -> Node:
        return Sub(self, as_node(other))

    def __rsub__(self, other: NodeLike) -> Node:
        return Sub(as_node(other), self)

    def __mul__(self, other: NodeLike) -> Node:
        return Mul(self, as_node(other))

    def __rmul__(self, other: NodeLike) -> Node:
        return Mul(as_node(other), self)

    def __truediv__(self, other: NodeLike) -> Node:
        return Div(self, as_node(other))

    def __rtruediv__(self, other: NodeLike) -> Node:
        return Div(as_node(other), self)

    def __pow__(self, k: int) -> Node:
        if not isinstance(k, int):
            raise TypeError("only integer exponents are supported; use exp/log")
        return Pow(self, k)

    def __neg__(self) -> Node:
        return Neg(self)

    def __str__(self) -> str:
        return to_string(self)


@dataclass(frozen=True, eq=True, repr=False)
class Num(Node):
    value: Fraction

    def __post_init__(self) -> None:
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))

    def __repr__(self) -> str:
        return f"Num({self.value})"


@dataclass(frozen=True, eq=True, repr=False)
class Sym(Node):
    name: str

    def __repr__(self) -> str:
        return f"Sym({self.name})"


@dataclass(frozen=True, eq=True, repr=False)
class Neg(Node):
    arg: Node

    def __repr__(self) -> str:
        return f"Neg({self.arg!r})"


@dataclass(frozen=True, eq=True, repr=False)
class Add(Node):
    left: Node
    right: Node

    def __repr__(self) -> str:
        return f"Add({self.left!r}, {self.right!r})"


@dataclass(frozen=True, eq=True, repr=False)
class Sub(Node):
    left: Node
    right: Node

    def __repr__(self) -> str:
        return f"Sub({self.left!r}, {self.right!r})"


@dataclass(frozen=True, eq=True, repr=False)
class Mul(Node):
    left: Node
    right: Node

    def __repr__(self) -> str:
        return f"Mul({self.left!r}, {self.right!r})"


@dataclass(frozen=True, eq=True, repr=False)
class Div(Node):
    left: Node
    right: Node

    def __repr__(self) -> str:
        return f"Div({self.left!r}, {self.right!r})"


@dataclass(frozen=True, eq=True, repr=False)
class Pow(Node):
    base: Node
    exp: int

    def __post_init__(self) -> None:
        if not isinstance(self.exp, int):
            object.__setattr__(self, "exp", int(self.exp))

    def __repr__(self) -> str:
        return f"Pow({self.base!r}, {self.exp})"


@dataclass(frozen=True, eq=True, repr=False)
class Func(Node):
    name: str
    arg: Node

    def __post_init__(self) -> None:
        if self.name not in FUNCTIONS:
            raise ValueError(f"unknown function {self.name!r}")

    def __repr__(self) -> str:
        return f"Func({self.name}, {self.arg!r})"


NodeLike = Union[Node, int, Fraction, str]


def as_node(x: NodeLike) -> Node:
    if isinstance(x, Node):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not an expression")
    if isinstance(x, (int, Fraction)):
        v = Fraction(x)
        return Neg(Num(-v)) if v < 0 else Num(v)
    if isinstance(x, str):
        from .parser import parse_expr

        return parse_expr(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an expression")


def const(v: int | Fraction) -> Node:
    return as_node(Fraction(v))


def sym(name: str) -> Sym:
    return Sym(name)


def symbols(names: str) -> tuple[Sym, ...]:
    return tuple(Sym(n) for n in names.split())


def func(name: str, arg: NodeLike) -> Func:
    return Func(name, as_node(arg))


# --- printing -------------------------------------------------------------

_SUM, _TERM, _FACTOR, _BASE = 1, 2, 3, 4


def _level(node: Node) -> int:
    if isinstance(node, (Add, Sub)):
        return _SUM
    if isinstance(node, (Mul, Div)):
        return _TERM
    if isinstance(node, Pow):
        return _FACTOR
    if isinstance(node, Num) and node.value < 0:
        # negative literals never come out of the parser; print as a group
        return 0
    return _BASE


def _fmt_num(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def _wrap(node: Node, min_level: int) -> str:
    s = to_string(node)
    return s if _level(node) >= min_level else f"({s})"


def to_string(node: Node) -> str:
    """Render ``node`` in the expression grammar."""
    if isinstance(node, Num):
        if node.value < 0:
            return f"-{_fmt_num(-node.value)}"
        return _fmt_num(node.value)
    if isinstance(node, Sym):
        return node.name
    if isinstance(node, Func):
        return f"{node.name}({to_string(node.arg)})"
    if isinstance(node, Neg):
        return "-" + _wrap(node.arg, _BASE)
    if isinstance(node, Pow):
        return f"{_wrap(node.base, _BASE)}^{node.exp}"
    if isinstance(node, (Add, Sub)):
        op = " + " if isinstance(node, Add) else " - "
        return _wrap(node.left, _SUM) + op + _wrap(node.right, _TERM)
    if isinstance(node, (Mul, Div)):
        op = " * " if isinstance(node, Mul) else " / "
        return _wrap(node.left, _TERM) + op + _wrap(node.right, _FACTOR)
    raise TypeError(f"not an expression node: {node!r}")


def atoms(node: Node) -> set[str]:
    """Coordinate names occurring in ``node``."""
    out: set[str] = set()
    stack = [node]
    while stack:
        n = stack.pop()
        if isinstance(n, Sym):
            out.add(n.name)
        elif isinstance(n, (Neg, Func)):
            stack.append(n.arg)
        elif isinstance(n, Pow):
            stack.append(n.base)
        elif isinstance(n, (Add, Sub, Mul, Div)):
            stack.extend((n.left, n.right))
    return out
