"""Tensor calculus on a single chart.

Every routine here is written against a small ring interface: ``+ - *``,
``inv()``, ``is_zero()`` and ``diff(name)``.  Exact expressions
(:class:`~fglab.expr.Rat`) and radial log-series both satisfy it, so the
same code computes the curvature of a closed-form metric and of a
Fefferman-Graham jet.

Conventions (N = dim):

* ``R_abcd = 1/2 (g_ad,bc + g_bc,ad - g_ac,bd - g_bd,ac)
  + Gamma^e_bc Gamma_e,ad - Gamma^e_bd Gamma_e,ac``, so the round sphere
  has ``R_1212 = +sin^2``, and ``Ric_ik = g^{jl} R_ijkl``.
* Weyl uses the boundary-dimension form with ``n = N - 1``:
  ``W = R - (R_ik g_jl + R_jl g_ik - R_jk g_il - R_il g_jk)/(n-1)
  + S (g_ik g_jl - g_il g_jk)/(n(n-1))``.
* Covariant derivatives append the new index last: ``T_{a...;c}``.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .expr import ExprLike, Rat, to_rat
from .report import ResidualReport, exact_zero_report


class SingularMetricError(ValueError):
    pass


def zero_like(x):
    return x * 0


def one_like(x):
    return x * 0 + 1


# --- charts, metrics, tensors -------------------------------------------------

class Chart:
    __slots__ = ("coords",)

    def __init__(self, coords: Sequence[str]):
        coords = tuple(coords)
        if len(coords) < 2:
            raise ValueError("a chart needs at least two coordinates")
        if len(set(coords)) != len(coords):
            raise ValueError("coordinate names must be distinct")
        self.coords = coords

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __eq__(self, other) -> bool:
        return isinstance(other, Chart) and other.coords == self.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def __repr__(self) -> str:
        return f"Chart{self.coords}"


def _canon(sym: str, idx: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    """Canonical representative and sign of ``idx`` under ``sym``.

    ``sym`` is ``none``, ``sym`` (first two slots symmetric), ``riemann``
    (first four slots), ``christoffel`` (last two symmetric), or any of
    these followed by ``+k`` for k trailing free slots.
    """
    base = sym.split("+", 1)[0]
    if base == "none":
        return 1, idx
    if base == "sym":
        a, b = idx[0], idx[1]
        return 1, (min(a, b), max(a, b)) + idx[2:]
    if base == "christoffel":
        a, b, c = idx[0], idx[1], idx[2]
        return 1, (a, min(b, c), max(b, c)) + idx[3:]
    if base == "riemann":
        a, b, c, d = idx[:4]
        if a == b or c == d:
            return 0, idx
        sign = 1
        if a > b:
            a, b, sign = b, a, -sign
        if c > d:
            c, d, sign = d, c, -sign
        if (a, b) > (c, d):
            a, b, c, d = c, d, a, b
        return sign, (a, b, c, d) + idx[4:]
    raise ValueError(f"unknown symmetry {sym!r}")


def _sym_prefix(sym: str) -> str:
    return sym.split("+", 1)[0]


def _sym_extend(sym: str) -> str:
    base, _, extra = sym.partition("+")
    if base == "none":
        return "none"
    return f"{base}+{int(extra or 0) + 1}"


class TensorField:
    """Component array on a chart with ``upper`` then ``lower`` indices.

    Only canonical components under ``symmetry`` are stored; reads expand.
    """

    def __init__(self, chart: Chart, rank: int, data: dict, symmetry: str = "none", upper: int = 0):
        self.chart = chart
        self.rank = rank
        self.upper = upper
        self.symmetry = symmetry
        self.data = data

    @property
    def lower(self) -> int:
        return self.rank - self.upper

    def __getitem__(self, idx):
        if isinstance(idx, int):
            idx = (idx,)
        sign, key = _canon(self.symmetry, tuple(idx))
        if sign == 0:
            return zero_like(next(iter(self.data.values()))) if self.data else Rat.zero()
        v = self.data[key]
        return v if sign == 1 else -v

    def keys(self) -> list[tuple[int, ...]]:
        return list(self.data)

    def all_indices(self) -> Iterable[tuple[int, ...]]:
        return itertools.product(range(self.chart.dim), repeat=self.rank)

    def components(self) -> list:
        return [self.data[k] for k in self.data]

    def map(self, fn: Callable) -> TensorField:
        return TensorField(self.chart, self.rank, {k: fn(v) for k, v in self.data.items()}, self.symmetry, self.upper)

    def __sub__(self, other: TensorField) -> TensorField:
        return TensorField(self.chart, self.rank, {k: self[k] - other[k] for k in self.data},
                           self.symmetry, self.upper)

    def as_nested(self):
        n = self.chart.dim

        def build(prefix):
            if len(prefix) == self.rank:
                return self[prefix]
            return [build(prefix + (i,)) for i in range(n)]

        return build(())

    def __repr__(self) -> str:
        return f"TensorField(rank={self.rank}, upper={self.upper}, symmetry={self.symmetry!r}, n={len(self.data)})"


def _build(chart: Chart, rank: int, symmetry: str, fn: Callable, upper: int = 0) -> TensorField:
    data = {}
    for idx in itertools.product(range(chart.dim), repeat=rank):
        sign, key = _canon(symmetry, idx)
        if sign == 0 or key != idx or key in data:
            continue
        data[key] = fn(idx)
    return TensorField(chart, rank, data, symmetry, upper)


class MetricField:
    """Symmetric metric on a chart; entries are ring elements (usually Rat).

    Derived quantities are memoised on first use.  The memo never changes a
    value, so a metric can be shared freely.
    """

    def __init__(self, chart: Chart | Sequence[str], components: Sequence[Sequence]):
        if not isinstance(chart, Chart):
            chart = Chart(chart)
        n = chart.dim
        if len(components) != n or any(len(row) != n for row in components):
            raise ValueError(f"metric must be {n}x{n}")
        rows = [[_ring(components[i][j]) for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(i):
                if rows[i][j] is not rows[j][i] and not (rows[i][j] - rows[j][i]).is_zero():
                    raise ValueError(f"metric is not symmetric at ({i},{j})")
                rows[j][i] = rows[i][j]
        self.chart = chart
        self.g = rows
        self._memo: dict = {}

    @classmethod
    def diagonal(cls, chart, entries: Sequence) -> MetricField:
        n = len(entries)
        z = zero_like(_ring(entries[0]))
        return cls(chart, [[_ring(entries[i]) if i == j else z for j in range(n)] for i in range(n)])

    @property
    def dim(self) -> int:
        return self.chart.dim

    @property
    def coords(self) -> tuple[str, ...]:
        return self.chart.coords

    def __getitem__(self, ij):
        i, j = ij
        return self.g[i][j]

    def scaled(self, factor) -> MetricField:
        return MetricField(self.chart, [[factor * x for x in row] for row in self.g])

    def memo(self, key, fn):
        if key not in self._memo:
            self._memo[key] = fn()
        return self._memo[key]

    def as_tensor(self) -> TensorField:
        return _build(self.chart, 2, "sym", lambda ij: self.g[ij[0]][ij[1]])


def _ring(x):
    if hasattr(x, "diff") and hasattr(x, "inv"):
        return x
    return to_rat(x)


# --- linear algebra over the ring ------------------------------------------------

def mat_inverse(m: Sequence[Sequence]) -> list[list]:
    """Gauss-Jordan inverse; a pivot is the first entry whose inverse exists."""
    n = len(m)
    z = zero_like(m[0][0])
    one = one_like(m[0][0])
    a = [list(row) + [one if i == j else z for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if a[r][col].is_zero():
                continue
            try:
                inv = a[r][col].inv()
            except (ZeroDivisionError, ValueError):
                continue
            piv = r
            break
        if piv is None:
            raise SingularMetricError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r == col or a[r][col].is_zero():
                continue
            f = a[r][col]
            a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = None
            for t in range(k):
                if a[i][t].is_zero() or b[t][j].is_zero():
                    continue
                p = a[i][t] * b[t][j]
                acc = p if acc is None else acc + p
            row.append(acc if acc is not None else zero_like(a[0][0]) + zero_like(b[0][0]))
        out.append(row)
    return out


def mat_trace(a):
    out = a[0][0]
    for i in range(1, len(a)):
        out = out + a[i][i]
    return out


def determinant(m: Sequence[Sequence]):
    """Fraction-free determinant by cofactor expansion along the first row."""
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    out = None
    for j in range(n):
        if m[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * determinant(minor)
        if j % 2:
            term = -term
        out = term if out is None else out + term
    return out if out is not None else zero_like(m[0][0])


def _sum(terms: Iterable, zero):
    out = None
    for t in terms:
        if t is None:
            continue
        out = t if out is None else out + t
    return zero if out is None else out


# --- the core computations ------------------------------------------------------

def _inv(g: MetricField) -> list[list]:
    def compute():
        try:
            return mat_inverse(g.g)
        except SingularMetricError:
            raise SingularMetricError("metric is singular") from None

    return g.memo("inv", compute)


def _dg(g: MetricField) -> list[list[list]]:
    """``dg[a][b][c] = d_c g_ab``."""
    n = g.dim
    names = g.coords

    def compute():
        out = [[[None] * n for _ in range(n)] for _ in range(n)]
        for a in range(n):
            for b in range(a, n):
                for c in range(n):
                    v = g.g[a][b].diff(names[c])
                    out[a][b][c] = out[b][a][c] = v
        return out

    return g.memo("dg", compute)


def _ddg(g: MetricField) -> dict:
    """``ddg[(a, b, c, d)] = d_c d_d g_ab`` for a<=b, c<=d."""
    n = g.dim
    names = g.coords

    def compute():
        dg = _dg(g)
        out = {}
        for a in range(n):
            for b in range(a, n):
                for c in range(n):
                    for d in range(c, n):
                        out[(a, b, c, d)] = dg[a][b][c].diff(names[d])
        return out

    return g.memo("ddg", compute)


def _ddg_get(dd, a, b, c, d):
    if a > b:
        a, b = b, a
    if c > d:
        c, d = d, c
    return dd[(a, b, c, d)]


def _gamma_first(g: MetricField) -> dict:
    """``G1[(a, b, c)] = Gamma_{a,bc} = 1/2 (g_ab,c + g_ac,b - g_bc,a)``, b<=c."""
    n = g.dim
    half = Fraction(1, 2)

    def compute():
        dg = _dg(g)
        out = {}
        for a in range(n):
            for b in range(n):
                for c in range(b, n):
                    out[(a, b, c)] = (dg[a][b][c] + dg[a][c][b] - dg[b][c][a]) * half
        return out

    return g.memo("gamma1", compute)


def _gamma_second(g: MetricField) -> dict:
    """``G2[(a, b, c)] = Gamma^a_bc``, b<=c."""
    n = g.dim

    def compute():
        gi = _inv(g)
        g1 = _gamma_first(g)
        z = zero_like(g.g[0][0])
        out = {}
        for a in range(n):
            for b in range(n):
                for c in range(b, n):
                    out[(a, b, c)] = _sum(
                        (gi[a][d] * g1[(d, b, c)] for d in range(n)
                         if not gi[a][d].is_zero() and not g1[(d, b, c)].is_zero()), z)
        return out

    return g.memo("gamma2", compute)


def _G(table, a, b, c):
    return table[(a, b, c)] if b <= c else table[(a, c, b)]


def inverse_metric(g: MetricField) -> TensorField:
    gi = _inv(g)
    return _build(g.chart, 2, "sym", lambda ij: gi[ij[0]][ij[1]], upper=2)


def christoffel(g: MetricField) -> TensorField:
    """``Gamma^a_bc`` with the upper index first."""
    t = _gamma_second(g)
    return _build(g.chart, 3, "christoffel", lambda idx: t[idx], upper=1)


def _riemann_component(g: MetricField, a: int, b: int, c: int, d: int):
    dd = _ddg(g)
    g1 = _gamma_first(g)
    g2 = _gamma_second(g)
    n = g.dim
    half = Fraction(1, 2)
    lin = (_ddg_get(dd, a, d, b, c) + _ddg_get(dd, b, c, a, d)
           - _ddg_get(dd, a, c, b, d) - _ddg_get(dd, b, d, a, c)) * half
    quad = []
    for e in range(n):
        x, y = _G(g2, e, b, c), _G(g1, e, a, d)
        if not x.is_zero() and not y.is_zero():
            quad.append(x * y)
        x, y = _G(g2, e, b, d), _G(g1, e, a, c)
        if not x.is_zero() and not y.is_zero():
            quad.append(-(x * y))
    return _sum([lin] + quad, zero_like(lin))


def riemann(g: MetricField) -> TensorField:
    """Fully lowered Riemann tensor (minimal storage under its symmetries)."""
    return g.memo("riemann", lambda: _build(g.chart, 4, "riemann",
                                            lambda idx: _riemann_component(g, *idx)))


def riemann_unreduced(g: MetricField) -> dict:
    """Every component computed independently, for symmetry checks."""
    n = g.dim
    return {idx: _riemann_component(g, *idx) for idx in itertools.product(range(n), repeat=4)}


def ricci(g: MetricField) -> TensorField:
    """``Ric_bd = d_a G^a_bd - d_d G^a_ba + G^a_ae G^e_bd - G^a_de G^e_ba``.

    Equal to ``g^{ac} R_abcd`` in this module's convention; computing it
    from the Christoffel symbols avoids building the full Riemann tensor.
    """
    n = g.dim
    names = g.coords

    def compute():
        g2 = _gamma_second(g)
        z = zero_like(g.g[0][0])
        trace = [_sum((_G(g2, a, a, e) for a in range(n)), z) for e in range(n)]

        def comp(idx):
            b, d = idx
            terms = []
            for a in range(n):
                terms.append(_G(g2, a, b, d).diff(names[a]))
            terms.append(-trace[b].diff(names[d]))
            for e in range(n):
                x = _G(g2, e, b, d)
                if not x.is_zero() and not trace[e].is_zero():
                    terms.append(trace[e] * x)
                for a in range(n):
                    x, y = _G(g2, a, d, e), _G(g2, e, b, a)
                    if not x.is_zero() and not y.is_zero():
                        terms.append(-(x * y))
            return _sum(terms, z)

        return _build(g.chart, 2, "sym", comp)

    return g.memo("ricci", compute)


def ricci_from_riemann(g: MetricField) -> TensorField:
    n = g.dim
    gi = _inv(g)
    R = riemann(g)
    z = zero_like(g.g[0][0])
    return _build(g.chart, 2, "sym", lambda ik: _sum(
        (gi[j][l] * R[ik[0], j, ik[1], l] for j in range(n) for l in range(n) if not gi[j][l].is_zero()), z))


def scalar_curvature(g: MetricField):
    n = g.dim

    def compute():
        gi = _inv(g)
        ric = ricci(g)
        z = zero_like(g.g[0][0])
        return _sum((gi[i][k] * ric[i, k] for i in range(n) for k in range(n) if not gi[i][k].is_zero()), z)

    return g.memo("scalar", compute)


def weyl(g: MetricField) -> TensorField:
    N = g.dim
    if N < 3:
        raise ValueError("the Weyl tensor needs dimension at least 3")
    n = N - 1
    c1 = Fraction(1, n - 1)
    c2 = Fraction(1, n * (n - 1))

    def compute():
        R = riemann(g)
        ric = ricci(g)
        S = scalar_curvature(g)
        G = g.g

        def comp(idx):
            i, j, k, l = idx
            v = R[idx]
            v = v - (ric[i, k] * G[j][l] + ric[j, l] * G[i][k] - ric[j, k] * G[i][l] - ric[i, l] * G[j][k]) * c1
            v = v + S * (G[i][k] * G[j][l] - G[i][l] * G[j][k]) * c2
            return v

        return _build(g.chart, 4, "riemann", comp)

    return g.memo("weyl", compute)


def covariant_derivative(T: TensorField | object, g: MetricField) -> TensorField:
    """Covariant derivative of a fully lowered tensor (or a scalar).

    The derivative index is appended last; storage keeps the symmetry of
    ``T`` on the leading slots.
    """
    names = g.coords
    n = g.dim
    if not isinstance(T, TensorField):
        f = _ring(T)
        return _build(g.chart, 1, "none", lambda idx: f.diff(names[idx[0]]))
    if T.upper:
        raise ValueError("covariant_derivative expects a fully lowered tensor")
    if T.rank > 4:
        raise ValueError("valence above 4 is not supported")
    g2 = _gamma_second(g)
    z = zero_like(g.g[0][0])

    def comp(idx):
        base, c = idx[:-1], idx[-1]
        terms = [T[base].diff(names[c])]
        for slot in range(len(base)):
            for e in range(n):
                gam = _G(g2, e, c, base[slot])
                if gam.is_zero():
                    continue
                other = T[base[:slot] + (e,) + base[slot + 1:]]
                if not other.is_zero():
                    terms.append(-(gam * other))
        return _sum(terms, z)

    return _build(g.chart, T.rank + 1, _sym_extend(T.symmetry), comp)


def laplace_beltrami(f: ExprLike, g: MetricField):
    f = _ring(f)
    n = g.dim
    names = g.coords
    gi = _inv(g)
    g2 = _gamma_second(g)
    df = [f.diff(x) for x in names]
    z = zero_like(g.g[0][0])
    terms = []
    for a in range(n):
        for b in range(n):
            if gi[a][b].is_zero():
                continue
            inner = [df[a].diff(names[b])]
            for c in range(n):
                gam = _G(g2, c, a, b)
                if not gam.is_zero() and not df[c].is_zero():
                    inner.append(-(gam * df[c]))
            terms.append(gi[a][b] * _sum(inner, z))
    return _sum(terms, z)


def hessian(f: ExprLike, g: MetricField) -> TensorField:
    f = _ring(f)
    names = g.coords
    n = g.dim
    g2 = _gamma_second(g)
    df = [f.diff(x) for x in names]
    z = zero_like(g.g[0][0])
    return _build(g.chart, 2, "sym", lambda ab: _sum(
        [df[ab[0]].diff(names[ab[1]])] + [-(_G(g2, c, ab[0], ab[1]) * df[c]) for c in range(n)
                                         if not df[c].is_zero()], z))


def gradient_norm2(f: ExprLike, g: MetricField):
    f = _ring(f)
    gi = _inv(g)
    df = [f.diff(x) for x in g.coords]
    n = g.dim
    z = zero_like(g.g[0][0])
    return _sum((gi[a][b] * df[a] * df[b] for a in range(n) for b in range(n)
                 if not gi[a][b].is_zero() and not df[a].is_zero() and not df[b].is_zero()), z)


def raise_contract(g: MetricField, fn: Callable[[int, int], object]):
    """``g^{ab} fn(a, b)`` summed."""
    gi = _inv(g)
    n = g.dim
    z = zero_like(g.g[0][0])
    return _sum((gi[a][b] * fn(a, b) for a in range(n) for b in range(n) if not gi[a][b].is_zero()), z)


# --- identities as residual reports ----------------------------------------------

def riemann_symmetry_residuals(g: MetricField, seed: int = 0) -> ResidualReport:
    """Pair antisymmetries, pair interchange and the first Bianchi identity,
    each checked on independently computed components."""
    R = riemann_unreduced(g)
    n = g.dim
    anti1, anti2, pair, bianchi = [], [], [], []
    for a, b, c, d in itertools.product(range(n), repeat=4):
        anti1.append(R[a, b, c, d] + R[b, a, c, d])
        anti2.append(R[a, b, c, d] + R[a, b, d, c])
        pair.append(R[a, b, c, d] - R[c, d, a, b])
        bianchi.append(R[a, b, c, d] + R[a, c, d, b] + R[a, d, b, c])
    parent = ResidualReport("riemann-symmetries", True)
    for name, vals in (("antisym-first-pair", anti1), ("antisym-second-pair", anti2),
                       ("pair-interchange", pair), ("first-bianchi", bianchi)):
        parent.children.append(exact_zero_report(f"riemann-{name}", vals, seed=seed))
    parent.passed = all(c.passed for c in parent.children)
    return parent


def weyl_trace_residual(g: MetricField, seed: int = 0) -> ResidualReport:
    """All single metric traces of the Weyl tensor."""
    W = weyl(g)
    n = g.dim
    vals = []
    for pos in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)):
        free = [s for s in range(4) if s not in pos]
        for x, y in itertools.product(range(n), repeat=2):
            def fn(a, b, pos=pos, free=free, x=x, y=y):
                idx = [0] * 4
                idx[pos[0]], idx[pos[1]] = a, b
                idx[free[0]], idx[free[1]] = x, y
                return W[tuple(idx)]
            vals.append(raise_contract(g, fn))
    return exact_zero_report("weyl-trace-free", vals, seed=seed)


def second_bianchi_residual(g: MetricField, seed: int = 0) -> ResidualReport:
    """``R_abcd;e + R_abde;c + R_abec;d = 0``."""
    dR = covariant_derivative(riemann(g), g)
    n = g.dim
    vals = []
    for a, b, c, d, e in itertools.product(range(n), repeat=5):
        if a < b and c < d < e:
            vals.append(dR[a, b, c, d, e] + dR[a, b, d, e, c] + dR[a, b, e, c, d])
    return exact_zero_report("second-bianchi", vals, seed=seed)


def contracted_bianchi_residual(g: MetricField, seed: int = 0) -> ResidualReport:
    """``g^{jh} R_jk;h - 1/2 d_k S`` (always zero) and ``g^{jh} R_jk;h`` alone."""
    n = g.dim
    dric = covariant_derivative(ricci(g), g)
    S = scalar_curvature(g)
    div = [raise_contract(g, lambda j, h, k=k: dric[j, k, h]) for k in range(n)]
    dS = [S.diff(x) for x in g.coords]
    full = exact_zero_report("contracted-bianchi", [d - s * Fraction(1, 2) for d, s in zip(div, dS)], seed=seed)
    s_const = all(x.is_zero() for x in dS)
    div_rep = exact_zero_report("ricci-divergence", div, seed=seed,
                                detail="constant-S" if s_const else "S not constant")
    if not s_const:
        div_rep.hypothesis_met = False
    parent = ResidualReport("bianchi-suite", full.passed and (div_rep.passed or not s_const),
                            children=[full, div_rep])
    return parent


def weyl_divergence_identity_residual(g: MetricField, seed: int = 0) -> ResidualReport:
    """``R_ik;l - R_il;k - (n-1)/(n-2) g^{jh} W_ijkl;h`` with n = dim - 1.

    Valid when the scalar curvature is constant; otherwise the report is
    labelled ``hypothesis-unmet`` (and the check is still computed).
    """
    N = g.dim
    n = N - 1
    if n <= 2:
        raise ValueError("the identity needs dim >= 4")
    S = scalar_curvature(g)
    s_const = all(S.diff(x).is_zero() for x in g.coords)
    dric = covariant_derivative(ricci(g), g)
    dW = covariant_derivative(weyl(g), g)
    c = Fraction(n - 1, n - 2)
    vals = []
    for i, k, l in itertools.product(range(N), repeat=3):
        if k >= l:
            continue
        lhs = dric[i, k, l] - dric[i, l, k]
        rhs = raise_contract(g, lambda j, h: dW[i, j, k, l, h]) * c
        vals.append(lhs - rhs)
    rep = exact_zero_report("weyl-divergence-identity", vals, seed=seed)
    if not s_const:
        rep.hypothesis_met = False
        rep.detail = (rep.detail + " scalar curvature not constant").strip()
    return rep


def harmonicity_residual(functions: Sequence[ExprLike], g: MetricField, seed: int = 0) -> ResidualReport:
    lap = [laplace_beltrami(f, g) for f in functions]
    parent = ResidualReport("harmonicity", True)
    for i, v in enumerate(lap):
        child = exact_zero_report(f"harmonic[{i}]", [v], seed=seed, allow_numeric=True)
        child.components["laplacian"] = v
        parent.children.append(child)
    parent.passed = all(c.passed for c in parent.children)
    parent.components["laplacians"] = lap
    return parent
