"""Exact scalar expressions: parse, print, differentiate, normalize, zero-test, evaluate.

Trees (:mod:`fglab.expr.tree`) are what users write and read; :class:`Rat`
is the canonical rational-function form every computation runs on.
"""
from __future__ import annotations

import enum
import math as _math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Union

import mpmath

from .algebra import (
    ExprDomainError,
    ExprZeroDivisionError,
    Rat,
    apply_function,
    as_rat,
    atom_info,
    evaluate_rat,
    from_tree,
    is_atom_name,
    to_tree,
)
from .parser import ExprSyntaxError, parse_expr
from .tree import (
    FUNCTIONS,
    Add,
    Div,
    Func,
    Mul,
    Neg,
    Node,
    Num,
    Pow,
    Sub,
    Sym,
    atoms,
    const,
    func,
    sym,
    symbols,
    to_string,
)

ScalarExpr = Node
ExprLike = Union[Node, Rat, str, int, Fraction]

DEFAULT_PROBES = 8
DEFAULT_SEED = 0
PROBE_THRESHOLD = 1e-9


def to_rat(e: ExprLike) -> Rat:
    if isinstance(e, str):
        return from_tree(parse_expr(e))
    return as_rat(e)


def _as_tree(e: ExprLike) -> Node:
    if isinstance(e, Node):
        return e
    if isinstance(e, Rat):
        return to_tree(e)
    if isinstance(e, str):
        return parse_expr(e)
    return const(e)


@dataclass(frozen=True)
class NormalForm:
    value: Rat
    # denominators (and log arguments) met while normalizing: the result is
    # only valid where none of these vanish
    caveats: tuple[Rat, ...] = ()

    @property
    def tree(self) -> Node:
        return to_tree(self.value)

    def caveat_strings(self) -> list[str]:
        seen: list[str] = []
        for c in self.caveats:
            s = f"{c} != 0"
            if s not in seen:
                seen.append(s)
        return seen


def normal_form(e: ExprLike) -> NormalForm:
    if isinstance(e, Rat):
        return NormalForm(e)
    caveats: list[Rat] = []
    value = from_tree(_as_tree(e), caveats)
    return NormalForm(value, tuple(caveats))


def normalize(e: ExprLike) -> Node:
    """Canonical tree; equal rational functions give identical trees."""
    return to_tree(to_rat(e))


def differentiate(e: ExprLike, var: str) -> Node:
    return to_tree(to_rat(e).diff(var))


def evaluate(e: ExprLike, point: Mapping[str, float], backend: str = "float"):
    """Numeric value at ``point``; raises on poles and domain violations."""
    return _eval_tree(_as_tree(e), point, backend)


def _eval_tree(node: Node, point, backend: str):
    # walk the tree as written, so 1/x0 at x0=0 fails even if it would cancel
    mp = backend == "mpmath"
    conv = mpmath.mpf if mp else float
    if isinstance(node, Num):
        return conv(node.value.numerator) / conv(node.value.denominator)
    if isinstance(node, Sym):
        if node.name not in point:
            raise KeyError(f"no value bound for coordinate {node.name!r}")
        return conv(point[node.name])
    if isinstance(node, Neg):
        return -_eval_tree(node.arg, point, backend)
    if isinstance(node, Pow):
        b = _eval_tree(node.base, point, backend)
        if node.exp < 0 and b == 0:
            raise ExprZeroDivisionError("negative power of zero")
        return b ** node.exp
    if isinstance(node, Func):
        x = _eval_tree(node.arg, point, backend)
        if node.name == "log" and not x > 0:
            raise ExprDomainError(f"log of non-positive value {float(x):g}")
        if node.name == "sqrt" and x < 0:
            raise ExprDomainError(f"sqrt of negative value {float(x):g}")
        lib = mpmath if mp else _math
        return getattr(lib, node.name)(x)
    a = _eval_tree(node.left, point, backend)
    b = _eval_tree(node.right, point, backend)
    if isinstance(node, Add):
        return a + b
    if isinstance(node, Sub):
        return a - b
    if isinstance(node, Mul):
        return a * b
    if isinstance(node, Div):
        if b == 0:
            raise ExprZeroDivisionError("division by zero")
        return a / b
    raise TypeError(f"not an expression node: {node!r}")


class Certainty(enum.Enum):
    CERTAIN_ZERO = "certainly zero"
    NUMERIC_ZERO = "numerically zero (unproven)"
    NONZERO = "nonzero"

    def __bool__(self) -> bool:
        # truthy when the expression should be treated as zero
        return self is not Certainty.NONZERO


@dataclass(frozen=True)
class ZeroTest:
    verdict: Certainty
    seed: int | None = None
    probes: int = 0
    max_abs: float = 0.0
    witness: dict[str, Fraction] | None = field(default=None, compare=False)

    def __bool__(self) -> bool:
        return bool(self.verdict)

    @property
    def certain(self) -> bool:
        return self.verdict is Certainty.CERTAIN_ZERO


def _has_atoms(r: Rat) -> bool:
    return any(is_atom_name(n) for n in r.used_names())


def coordinate_names(r: Rat) -> set[str]:
    out: set[str] = set()
    stack = list(r.used_names())
    while stack:
        n = stack.pop()
        if is_atom_name(n):
            stack.extend(atom_info(n).inner.used_names())
        else:
            out.add(n)
    return out


def is_zero(
    e: ExprLike,
    *,
    probes: int = DEFAULT_PROBES,
    seed: int = DEFAULT_SEED,
    retry_budget: int = 64,
    threshold: float = PROBE_THRESHOLD,
) -> ZeroTest:
    """Three-valued zero test.

    The rational fragment is decided exactly.  When opaque function atoms
    survive normalization the expression is probed at seeded random
    rational points at 50 digits.
    """
    r = to_rat(e)
    if r.is_zero():
        return ZeroTest(Certainty.CERTAIN_ZERO)
    if not _has_atoms(r):
        return ZeroTest(Certainty.NONZERO)
    rng = random.Random(seed)
    names = sorted(coordinate_names(r))
    done = 0
    attempts = 0
    worst = 0.0
    with mpmath.workdps(50):
        while done < probes:
            if attempts >= probes + retry_budget:
                break
            attempts += 1
            pt = {n: Fraction(rng.randint(-40, 40), rng.randint(7, 23)) for n in names}
            try:
                v = evaluate_rat(r, {k: mpmath.mpf(x.numerator) / x.denominator for k, x in pt.items()}, "mpmath")
            except (ExprDomainError, ZeroDivisionError, ValueError):
                continue
            done += 1
            mag = float(abs(v))
            worst = max(worst, mag)
            if mag > threshold:
                return ZeroTest(Certainty.NONZERO, seed, done, mag, pt)
    if done == 0:
        raise ExprDomainError("every probe point hit a domain violation")
    return ZeroTest(Certainty.NUMERIC_ZERO, seed, done, worst)


__all__ = [
    "FUNCTIONS", "Add", "Certainty", "Div", "ExprDomainError", "ExprLike", "ExprSyntaxError",
    "ExprZeroDivisionError", "Func", "Mul", "Neg", "Node", "NormalForm", "Num", "Pow", "Rat",
    "ScalarExpr", "Sub", "Sym", "ZeroTest", "apply_function", "atoms", "const", "coordinate_names",
    "differentiate", "evaluate", "evaluate_rat", "from_tree", "func", "is_zero", "normal_form",
    "normalize", "parse_expr", "sym", "symbols", "to_rat", "to_string", "to_tree",
]
