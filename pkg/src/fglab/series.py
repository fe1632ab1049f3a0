"""Truncated series in a radial variable with ``r^k`` and ``r^k log r`` terms.

A :class:`LogSeries` stores the coefficients of ``r^k (log r)^l`` for
``l`` in ``{0, 1}`` and every ``k`` below its truncation order; everything
from ``r^order`` on is unknown.  Coefficients are any exact ring elements
(``Rat`` in practice).  Products that would create ``(log r)^2`` lower the
order of the result to the first such power instead of dropping the term,
so no reported coefficient is ever silently wrong.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .expr import Rat, as_rat

Key = tuple[int, int]
INF = math.inf


def _coerce_coeff(c):
    if isinstance(c, (int, Fraction)):
        return Rat.const(c)
    return c


class LogSeries:
    __slots__ = ("var", "terms", "order", "log_capped_at")

    def __init__(
        self,
        terms: Mapping[Key, object] | None = None,
        order: float = INF,
        var: str = "r",
        log_capped_at: float = INF,
    ):
        self.var = var
        self.order = order
        self.log_capped_at = log_capped_at
        clean: dict[Key, object] = {}
        for (k, l), c in (terms or {}).items():
            if l not in (0, 1):
                raise ValueError("only log powers 0 and 1 are represented")
            if k >= order:
                continue
            c = _coerce_coeff(c)
            if not c.is_zero():
                clean[(k, l)] = c
        self.terms = clean

    # construction ---------------------------------------------------------
    @classmethod
    def constant(cls, c, order: float = INF, var: str = "r") -> LogSeries:
        return cls({(0, 0): c}, order, var)

    @classmethod
    def monomial(cls, k: int, c=1, log: int = 0, order: float = INF, var: str = "r") -> LogSeries:
        return cls({(k, log): c}, order, var)

    def _like(self, terms, order, capped=None) -> LogSeries:
        return LogSeries(terms, order, self.var, self.log_capped_at if capped is None else capped)

    # inspection -----------------------------------------------------------
    def coeff(self, k: int, log: int = 0):
        if k >= self.order:
            raise ValueError(f"coefficient r^{k} lies beyond the truncation order {self.order}")
        return self.terms.get((k, log), Rat.zero())

    def valuation(self) -> float:
        if not self.terms:
            return self.order
        return min(k for k, _ in self.terms)

    def is_zero(self) -> bool:
        """True when every known coefficient vanishes."""
        return not self.terms

    def has_log(self) -> bool:
        return any(l for _, l in self.terms)

    def truncate(self, order: float) -> LogSeries:
        return self._like(self.terms, min(order, self.order))

    def map_coeffs(self, fn: Callable) -> LogSeries:
        return self._like({key: fn(c) for key, c in self.terms.items()}, self.order)

    def __repr__(self) -> str:
        parts = []
        for (k, l) in sorted(self.terms):
            mono = f"r^{k}" + (" log r" if l else "")
            parts.append(f"({self.terms[(k, l)]}) {mono}")
        tail = "" if self.order == INF else f" + O(r^{self.order})"
        return "LogSeries(" + (" + ".join(parts) or "0") + tail + ")"

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> LogSeries:
        if isinstance(other, LogSeries):
            if other.var != self.var:
                raise ValueError("series in different radial variables")
            return other
        return LogSeries({(0, 0): as_rat(other)}, INF, self.var)

    def __add__(self, other) -> LogSeries:
        other = self._coerce(other)
        order = min(self.order, other.order)
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms[key] + c if key in terms else c
        return self._like(terms, order, min(self.log_capped_at, other.log_capped_at))

    __radd__ = __add__

    def __neg__(self) -> LogSeries:
        return self._like({key: -c for key, c in self.terms.items()}, self.order)

    def __sub__(self, other) -> LogSeries:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> LogSeries:
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> LogSeries:
        if not isinstance(other, LogSeries):
            c = as_rat(other)
            if c.is_zero():
                return self._like({}, self.order)
            return self._like({key: v * c for key, v in self.terms.items()}, self.order)
        other = self._coerce(other)
        va, vb = self.valuation(), other.valuation()
        order = min(self.order + vb, other.order + va)
        capped = min(self.log_capped_at, other.log_capped_at)
        terms: dict[Key, object] = {}
        for (ka, la), ca in self.terms.items():
            for (kb, lb), cb in other.terms.items():
                k = ka + kb
                if k >= order:
                    continue
                l = la + lb
                if l > 1:
                    # (log r)^2 is outside the representation
                    order = k
                    capped = min(capped, k)
                    continue
                p = ca * cb
                terms[(k, l)] = terms[(k, l)] + p if (k, l) in terms else p
        return self._like(terms, order, capped)

    __rmul__ = __mul__

    def __truediv__(self, other) -> LogSeries:
        if isinstance(other, LogSeries):
            return self * other.inv()
        return self * as_rat(other).inv()

    def __pow__(self, k: int) -> LogSeries:
        if k < 0:
            return self.inv() ** (-k)
        out = LogSeries.constant(1, var=self.var)
        for _ in range(k):
            out = out * self
        return out

    def inv(self) -> LogSeries:
        """Multiplicative inverse; the leading term must be log-free."""
        if not self.terms:
            raise ZeroDivisionError("inverse of a series with no known nonzero term")
        v = self.valuation()
        if (v, 1) in self.terms:
            raise ValueError("leading term carries log r; inverse not representable")
        c = self.terms[(v, 0)]
        cinv = c.inv()
        # self = c r^v (1 + u) with u of positive valuation
        u_terms = {(k - v, l): x * cinv for (k, l), x in self.terms.items() if (k, l) != (v, 0)}
        u = self._like(u_terms, self.order - v)
        if u.order == INF:
            if u.terms:
                raise ValueError("exact inverse of a non-monomial series needs a truncation order")
            return self._like({(-v, 0): cinv}, INF)
        # 1/(1+u) = sum (-u)^m, each power raising the valuation by at least one
        target = u.order
        acc = LogSeries.constant(1, target, self.var)
        power = acc
        for m in range(1, int(target) + 1 if u.terms else 1):
            power = (power * u).truncate(target)
            if not power.terms:
                acc = acc.truncate(power.order)
                break
            acc = acc + (power if m % 2 == 0 else -power)
        return self._like({(k - v, l): x * cinv for (k, l), x in acc.terms.items()}, acc.order - v,
                          min(acc.log_capped_at, self.log_capped_at))

    # calculus -------------------------------------------------------------
    def diff(self, name: str) -> LogSeries:
        """Derivative in the radial variable or coefficient-wise in a tangential one."""
        if name != self.var:
            return self._like({key: c.diff(name) for key, c in self.terms.items()}, self.order)
        terms: dict[Key, object] = {}

        def add(key, c):
            terms[key] = terms[key] + c if key in terms else c

        for (k, l), c in self.terms.items():
            if k:
                add((k - 1, l), c * k)
            if l:
                add((k - 1, 0), c)
        return self._like(terms, self.order - 1)

    def subs_coeffs(self, values) -> LogSeries:
        return self.map_coeffs(lambda c: c.subs(values))


def series_matrix_trace(m: list[list[LogSeries]]) -> LogSeries:
    out = m[0][0]
    for i in range(1, len(m)):
        out = out + m[i][i]
    return out


def from_taylor(coeffs: Iterable[tuple[int, int, object]], order: float, var: str = "r") -> LogSeries:
    return LogSeries({(k, l): c for k, l, c in coeffs}, order, var)
