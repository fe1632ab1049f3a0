"""Rational-function normal form over Q with opaque function atoms.

A :class:`Rat` is ``num/den`` with ``gcd(num, den) = 1`` and ``den`` monic,
both python-flint ``fmpq_mpoly`` polynomials.  Generators are coordinate
names plus one generator per distinct function application, named by the
canonical print of that application (``"sin(x1 * x2)"``).  Generators of
a context are kept sorted, which makes the representation, and therefore
the tree produced by :func:`to_tree`, independent of how the value was
reached.
"""
from __future__ import annotations

import math
import threading
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping

import flint

from .tree import Add, Div, Func, Mul, Neg, Node, Num, Pow, Sub, Sym, to_string

ORDERING = "degrevlex"


class ExprZeroDivisionError(ZeroDivisionError):
    """Division by an expression whose normal form is zero."""


class ExprDomainError(ValueError):
    """Numeric evaluation outside a function's domain (log/sqrt/poles)."""


# --- atoms ------------------------------------------------------------------

class _AtomInfo:
    __slots__ = ("name", "fname", "inner", "_dcache")

    def __init__(self, name: str, fname: str, inner: Rat):
        self.name = name
        self.fname = fname
        self.inner = inner
        self._dcache: dict[str, Rat] = {}


_ATOMS: dict[str, _AtomInfo] = {}
_ATOM_LOCK = threading.Lock()


def is_atom_name(name: str) -> bool:
    return name in _ATOMS


def atom_info(name: str) -> _AtomInfo:
    return _ATOMS[name]


def _ctx(names: Iterable[str]) -> flint.fmpq_mpoly_ctx:
    return flint.fmpq_mpoly_ctx.get(tuple(sorted(set(names))), ORDERING)


_EMPTY = _ctx(())


def _project(p: flint.fmpq_mpoly, ctx: flint.fmpq_mpoly_ctx) -> flint.fmpq_mpoly:
    if p.context() is ctx:
        return p
    return p.project_to_context(ctx)


class Rat:
    """Exact element of Q(coordinates, atoms) in lowest terms."""

    __slots__ = ("ctx", "num", "den")

    def __init__(self, ctx, num, den, *, reduced: bool = False):
        self.ctx = ctx
        if not reduced:
            if den.is_zero():
                raise ExprZeroDivisionError("division by zero")
            if num.is_zero():
                den = ctx.constant(1)
            elif not den.is_constant():
                g = num.gcd(den)
                if not g.is_one():
                    num = num / g
                    den = den / g
            lc = den.leading_coefficient()
            if lc != 1:
                num = num / lc
                den = den / lc
        self.num = num
        self.den = den

    # construction
    @staticmethod
    def const(v: int | Fraction, ctx=None) -> Rat:
        ctx = ctx or _EMPTY
        v = Fraction(v)
        return Rat(ctx, ctx.constant(flint.fmpq(v.numerator, v.denominator)), ctx.constant(1), reduced=True)

    @staticmethod
    def var(name: str) -> Rat:
        ctx = _ctx((name,))
        return Rat(ctx, ctx.gens()[0], ctx.constant(1), reduced=True)

    @staticmethod
    def zero() -> Rat:
        return Rat.const(0)

    @staticmethod
    def one() -> Rat:
        return Rat.const(1)

    # context handling
    @property
    def names(self) -> tuple[str, ...]:
        return self.ctx.names()

    def used_names(self) -> set[str]:
        out: set[str] = set()
        names = self.ctx.names()
        for p in (self.num, self.den):
            for i, d in enumerate(p.degrees()):
                if d > 0:
                    out.add(names[i])
        return out

    def to_ctx(self, ctx) -> Rat:
        if ctx is self.ctx:
            return self
        return Rat(ctx, _project(self.num, ctx), _project(self.den, ctx), reduced=True)

    def _unify(self, other: Rat) -> tuple[Rat, Rat]:
        if self.ctx is other.ctx:
            return self, other
        ctx = _ctx(self.ctx.names() + other.ctx.names())
        return self.to_ctx(ctx), other.to_ctx(ctx)

    # predicates
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.den.is_one() and self.num.is_one()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("expression is not constant")
        c = self.num.leading_coefficient() if not self.num.is_zero() else flint.fmpq(0)
        return Fraction(int(c.p), int(c.q))

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    # arithmetic
    def __add__(self, other) -> Rat:
        other = _coerce(other)
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        a, b = self._unify(other)
        if a.den == b.den:
            if a.den.is_one():
                return Rat(a.ctx, a.num + b.num, a.den, reduced=True)
            return Rat(a.ctx, a.num + b.num, a.den)
        return Rat(a.ctx, a.num * b.den + b.num * a.den, a.den * b.den)

    __radd__ = __add__

    def __neg__(self) -> Rat:
        return Rat(self.ctx, -self.num, self.den, reduced=True)

    def __sub__(self, other) -> Rat:
        return self + (-_coerce(other))

    def __rsub__(self, other) -> Rat:
        return _coerce(other) + (-self)

    def __mul__(self, other) -> Rat:
        other = _coerce(other)
        if self.num.is_zero() or other.num.is_zero():
            return Rat.zero()
        a, b = self._unify(other)
        if a.den.is_one() and b.den.is_one():
            return Rat(a.ctx, a.num * b.num, a.den, reduced=True)
        # cross-cancel before multiplying keeps the gcds small
        g1 = a.num.gcd(b.den)
        g2 = b.num.gcd(a.den)
        num = (a.num / g1) * (b.num / g2)
        den = (a.den / g2) * (b.den / g1)
        return Rat(a.ctx, num, den, reduced=den.is_one())

    __rmul__ = __mul__

    def inv(self) -> Rat:
        if self.num.is_zero():
            raise ExprZeroDivisionError("division by an expression that is identically zero")
        return Rat(self.ctx, self.den, self.num)

    def __truediv__(self, other) -> Rat:
        return self * _coerce(other).inv()

    def __rtruediv__(self, other) -> Rat:
        return _coerce(other) * self.inv()

    def __pow__(self, k: int) -> Rat:
        if not isinstance(k, int):
            raise TypeError("integer exponents only")
        if k < 0:
            return self.inv() ** (-k)
        if k == 0:
            return Rat.one()
        return Rat(self.ctx, self.num ** k, self.den ** k, reduced=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Rat):
            if isinstance(other, (int, Fraction)):
                other = Rat.const(other)
            else:
                return NotImplemented
        a, b = self._unify(other)
        return a.num == b.num and a.den == b.den

    def __hash__(self) -> int:
        return hash(to_string(to_tree(self)))

    def __repr__(self) -> str:
        return f"Rat({to_string(to_tree(self))})"

    def __str__(self) -> str:
        return to_string(to_tree(self))

    # calculus
    def diff(self, var: str) -> Rat:
        """Exact partial derivative with respect to coordinate ``var``."""
        names = self.ctx.names()
        dnum = None
        dden = None
        terms: list[tuple[int, Rat]] = []
        for i, name in enumerate(names):
            dg = _generator_derivative(name, var)
            if dg is not None:
                terms.append((i, dg))
        if not terms:
            return Rat.zero()
        out = Rat.zero()
        for i, dg in terms:
            pn = self.num.derivative(i)
            pd = self.den.derivative(i)
            if pn.is_zero() and pd.is_zero():
                continue
            part = Rat(self.ctx, pn * self.den - self.num * pd, self.den * self.den)
            out = out + (part if dg.is_one() else part * dg)
        del dnum, dden
        return out

    def subs(self, values: Mapping[str, Rat | int | Fraction]) -> Rat:
        """Substitute coordinates by expressions (atoms are rebuilt)."""
        values = {k: _coerce(v) for k, v in values.items()}
        names = self.ctx.names()
        images: list[Rat] = []
        changed = False
        for name in names:
            if name in values:
                images.append(values[name])
                changed = True
            elif name in _ATOMS:
                info = _ATOMS[name]
                if info.inner.used_names() & values.keys():
                    images.append(apply_function(info.fname, info.inner.subs(values)))
                    changed = True
                else:
                    images.append(Rat.var(name))
            else:
                images.append(Rat.var(name))
        if not changed:
            return self
        ctx = _ctx(n for im in images for n in im.ctx.names())
        # common denominator for every image so compose works on polynomials
        den_all = reduce(lambda acc, im: _lcm(acc, im.to_ctx(ctx).den), images, ctx.constant(1))
        nums = [(im.to_ctx(ctx).num * (den_all / im.to_ctx(ctx).den)) for im in images]
        # homogenise: p(n1/D, ..., nk/D) = P~(n, D) / D^deg
        num = _compose_frac(self.num, nums, den_all, ctx)
        den = _compose_frac(self.den, nums, den_all, ctx)
        # num = N / D^a, den = M / D^b
        (nn, da), (dn, db) = num, den
        if da >= db:
            return Rat(ctx, nn, dn * den_all ** (da - db))
        return Rat(ctx, nn * den_all ** (db - da), dn)

    def evaluate(self, point: Mapping[str, float], backend: str = "float"):
        return evaluate_rat(self, point, backend)


def _lcm(a, b):
    if a.is_one():
        return b
    if b.is_one():
        return a
    g = a.gcd(b)
    return (a / g) * b


def _compose_frac(p, nums, den, ctx):
    """Return (P, d) with p(nums/den) = P / den**d."""
    if p.is_zero():
        return ctx.from_dict({}), 0
    d = p.total_degree()
    out = ctx.from_dict({})
    powers_den = [ctx.constant(1)]
    for _ in range(d):
        powers_den.append(powers_den[-1] * den)
    for exps, c in p.to_dict().items():
        term = ctx.constant(c)
        for e, n in zip(exps, nums):
            if e:
                term = term * n ** e
        term = term * powers_den[d - sum(exps)]
        out = out + term
    return out, d


def _coerce(x) -> Rat:
    if isinstance(x, Rat):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not an expression")
    if isinstance(x, (int, Fraction)):
        return Rat.const(x)
    if isinstance(x, Node):
        return from_tree(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact expression")


as_rat = _coerce


# --- function atoms -----------------------------------------------------------

def apply_function(fname: str, inner: Rat) -> Rat:
    """Normal form of ``fname(inner)``; folds only exact constant cases."""
    if inner.is_constant():
        v = inner.constant_value()
        if v == 0:
            if fname in ("sin", "tan", "sinh", "tanh", "sqrt"):
                return Rat.zero()
            if fname in ("cos", "cosh", "exp"):
                return Rat.one()
            if fname == "log":
                raise ExprDomainError("log(0)")
        if fname == "log" and v == 1:
            return Rat.zero()
        if fname == "sqrt" and v > 0:
            rn, rd = math.isqrt(v.numerator), math.isqrt(v.denominator)
            if rn * rn == v.numerator and rd * rd == v.denominator:
                return Rat.const(Fraction(rn, rd))
        if fname == "sqrt" and v < 0:
            raise ExprDomainError("sqrt of a negative constant")
    name = f"{fname}({to_string(to_tree(inner))})"
    info = _ATOMS.get(name)
    if info is None:
        with _ATOM_LOCK:
            info = _ATOMS.setdefault(name, _AtomInfo(name, fname, inner))
    return Rat.var(name)


def _generator_derivative(name: str, var: str) -> Rat | None:
    """d(generator)/d(var), or None when it vanishes."""
    if name == var:
        return Rat.one()
    info = _ATOMS.get(name)
    if info is None:
        return None
    cached = info._dcache.get(var)
    if cached is not None:
        return None if cached.is_zero() else cached
    du = info.inner.diff(var)
    if du.is_zero():
        out = Rat.zero()
    else:
        out = _outer_derivative(info.fname, info.inner, Rat.var(name)) * du
    info._dcache[var] = out
    return None if out.is_zero() else out


def _outer_derivative(fname: str, u: Rat, fu: Rat) -> Rat:
    if fname == "sin":
        return apply_function("cos", u)
    if fname == "cos":
        return -apply_function("sin", u)
    if fname == "tan":
        return 1 + fu * fu
    if fname == "exp":
        return fu
    if fname == "log":
        return u.inv()
    if fname == "sqrt":
        return (2 * fu).inv()
    if fname == "sinh":
        return apply_function("cosh", u)
    if fname == "cosh":
        return apply_function("sinh", u)
    if fname == "tanh":
        return 1 - fu * fu
    raise ValueError(f"unknown function {fname!r}")


def derivative_closure(values: Iterable[Rat], coords: Iterable[str]) -> None:
    """Pre-register the atoms any derivative of ``values`` can introduce."""
    coords = list(coords)
    seen: set[str] = set()
    stack = [n for v in values for n in v.used_names() if n in _ATOMS]
    while stack:
        name = stack.pop()
        if name in seen:
            continue
        seen.add(name)
        for var in coords:
            d = _generator_derivative(name, var)
            if d is not None:
                stack.extend(n for n in d.used_names() if n in _ATOMS and n not in seen)
        stack.extend(n for n in _ATOMS[name].inner.used_names() if n in _ATOMS)


# --- conversion to and from trees ------------------------------------------

def from_tree(node: Node, caveats: list[Rat] | None = None) -> Rat:
    """Normal form of a tree.  Denominators met on the way go to ``caveats``."""
    if isinstance(node, Num):
        return Rat.const(node.value)
    if isinstance(node, Sym):
        return Rat.var(node.name)
    if isinstance(node, Neg):
        return -from_tree(node.arg, caveats)
    if isinstance(node, Add):
        return from_tree(node.left, caveats) + from_tree(node.right, caveats)
    if isinstance(node, Sub):
        return from_tree(node.left, caveats) - from_tree(node.right, caveats)
    if isinstance(node, Mul):
        return from_tree(node.left, caveats) * from_tree(node.right, caveats)
    if isinstance(node, Div):
        d = from_tree(node.right, caveats)
        if d.is_zero():
            raise ExprZeroDivisionError(f"denominator {to_string(node.right)} is identically zero")
        if caveats is not None and not d.is_constant():
            caveats.append(d)
        return from_tree(node.left, caveats) / d
    if isinstance(node, Pow):
        b = from_tree(node.base, caveats)
        if node.exp < 0:
            if b.is_zero():
                raise ExprZeroDivisionError(f"{to_string(node.base)} is identically zero")
            if caveats is not None and not b.is_constant():
                caveats.append(b)
        return b ** node.exp
    if isinstance(node, Func):
        inner = from_tree(node.arg, caveats)
        if node.name == "log" and caveats is not None and not inner.is_constant():
            caveats.append(inner)
        return apply_function(node.name, inner)
    raise TypeError(f"not an expression node: {node!r}")


def _generator_tree(name: str) -> Node:
    info = _ATOMS.get(name)
    if info is None:
        return Sym(name)
    return Func(info.fname, to_tree(info.inner))


def _monomial_key(pairs: list[tuple[str, int]]):
    deg = sum(e for _, e in pairs)
    return (-deg, tuple((n, -e) for n, e in pairs))


def _poly_tree(p, names: tuple[str, ...]) -> Node:
    if p.is_zero():
        return Num(Fraction(0))
    terms = []
    for exps, c in p.to_dict().items():
        pairs = sorted((names[i], int(e)) for i, e in enumerate(exps) if e)
        terms.append((_monomial_key(pairs), pairs, Fraction(int(c.p), int(c.q))))
    terms.sort(key=lambda t: t[0])
    out: Node | None = None
    for _, pairs, c in terms:
        factors: list[Node] = []
        for name, e in pairs:
            f = _generator_tree(name)
            factors.append(f if e == 1 else Pow(f, e))
        mag = abs(c)
        if mag != 1 or not factors:
            factors.insert(0, Num(mag))
        if out is None and c < 0:
            factors[0] = Neg(factors[0])
        mono = factors[0]
        for f in factors[1:]:
            mono = Mul(mono, f)
        if out is None:
            out = mono
        else:
            out = Sub(out, mono) if c < 0 else Add(out, mono)
    assert out is not None
    return out


def to_tree(r: Rat) -> Node:
    """Canonical tree of a normal form."""
    names = r.ctx.names()
    num = _poly_tree(r.num, names)
    if r.den.is_one():
        return num
    return Div(num, _poly_tree(r.den, names))


# --- numeric evaluation ---------------------------------------------------------

def _fn_table(backend: str):
    if backend == "mpmath":
        import mpmath

        return {
            "sin": mpmath.sin, "cos": mpmath.cos, "tan": mpmath.tan, "exp": mpmath.exp,
            "log": mpmath.log, "sqrt": mpmath.sqrt, "sinh": mpmath.sinh,
            "cosh": mpmath.cosh, "tanh": mpmath.tanh,
        }, mpmath.mpf
    return {
        "sin": math.sin, "cos": math.cos, "tan": math.tan, "exp": math.exp,
        "log": math.log, "sqrt": math.sqrt, "sinh": math.sinh,
        "cosh": math.cosh, "tanh": math.tanh,
    }, float


def _check_domain(fname: str, x) -> None:
    if fname == "log" and not x > 0:
        raise ExprDomainError(f"log of non-positive value {float(x):g}")
    if fname == "sqrt" and x < 0:
        raise ExprDomainError(f"sqrt of negative value {float(x):g}")


def _poly_value(p, values) -> object:
    total = 0
    for exps, c in p.to_dict().items():
        term = Fraction(int(c.p), int(c.q))
        term = values[-1](term)
        for v, e in zip(values[:-1], exps):
            if e:
                term = term * v ** int(e)
        total = total + term
    return total


def evaluate_rat(r: Rat, point: Mapping[str, object], backend: str = "float"):
    """Evaluate ``r`` at ``point``; ``backend`` is ``"float"`` or ``"mpmath"``."""
    fns, conv = _fn_table(backend)
    cache: dict[str, object] = {}

    def gen_value(name: str):
        if name in cache:
            return cache[name]
        info = _ATOMS.get(name)
        if info is None:
            if name not in point:
                raise KeyError(f"no value bound for coordinate {name!r}")
            raw = point[name]
            v = conv(raw.numerator) / conv(raw.denominator) if isinstance(raw, Fraction) else conv(raw)
        else:
            x = evaluate_rat(info.inner, point, backend)
            _check_domain(info.fname, x)
            v = fns[info.fname](x)
        cache[name] = v
        return v

    names = r.ctx.names()
    used = r.used_names()
    values = [gen_value(n) if n in used else conv(0) for n in names]
    values.append(lambda c: conv(c.numerator) / conv(c.denominator))
    num = _poly_value(r.num, values)
    den = _poly_value(r.den, values)
    if den == 0:
        raise ExprDomainError("division by zero")
    return num / den
