"""Proper ellipticity and the complementing condition for constant-coefficient systems.

Symbols follow the convention ``L'(x0, xi + z n)`` with real covectors and
the normal variable ``z``; no factors of ``i`` are attached to derivatives.
Polynomials in ``z`` carry exact Gaussian-rational coefficients or complex
floats.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .report import ResidualReport

FLOAT_RANK_TOL = 1e-9
ROOT_IMAG_TOL = 1e-10


# --- Gaussian rationals -----------------------------------------------------------------------

class QI:
    """``a + b i`` with rational ``a, b``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, x) -> QI:
        if isinstance(x, QI):
            return x
        if isinstance(x, complex):
            raise TypeError("floating complex value in exact mode")
        return cls(x)

    def __add__(self, o):
        o = QI.coerce(o)
        return QI(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-QI.coerce(o))

    def __rsub__(self, o):
        return QI.coerce(o) - self

    def __mul__(self, o):
        o = QI.coerce(o)
        return QI(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conj(self) -> QI:
        return QI(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __truediv__(self, o):
        o = QI.coerce(o)
        d = o.norm2()
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        p = self * o.conj()
        return QI(p.re / d, p.im / d)

    def __rtruediv__(self, o):
        return QI.coerce(o) / self

    def __eq__(self, o):
        try:
            o = QI.coerce(o)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        return f"({self.re}{'+' if self.im > 0 else '-'}{abs(self.im)}i)"


I = QI(0, 1)


def _zero(exact: bool):
    return QI(0) if exact else 0j


def _is_zero(c, exact: bool, tol: float = 0.0) -> bool:
    if exact:
        return not c
    return abs(c) <= tol


# --- polynomials in z ---------------------------------------------------------------------------

class SymbolPolynomial:
    """Polynomial in ``z``; ``coeffs[k]`` multiplies ``z^k``."""

    __slots__ = ("coeffs", "exact")

    def __init__(self, coeffs: Iterable, exact: bool = True):
        self.exact = exact
        cs = [QI.coerce(c) for c in coeffs] if exact else [complex(c) for c in coeffs]
        while cs and _is_zero(cs[-1], exact):
            cs.pop()
        self.coeffs = cs

    @classmethod
    def const(cls, c, exact: bool = True) -> SymbolPolynomial:
        return cls([c], exact)

    @classmethod
    def z(cls, exact: bool = True) -> SymbolPolynomial:
        return cls([0, 1], exact)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(_is_zero(c, self.exact, tol) for c in self.coeffs)

    def _co(self, o) -> SymbolPolynomial:
        if isinstance(o, SymbolPolynomial):
            if o.exact != self.exact:
                return SymbolPolynomial([complex(c) for c in o.coeffs], False) if not self.exact else o
            return o
        return SymbolPolynomial([o], self.exact)

    def _mode(self, o: SymbolPolynomial) -> bool:
        return self.exact and o.exact

    def to_float(self) -> SymbolPolynomial:
        return SymbolPolynomial([complex(c) for c in self.coeffs], False)

    def __add__(self, o):
        o = self._co(o)
        ex = self._mode(o)
        a, b = (self, o) if ex else (self.to_float(), o.to_float())
        m = max(len(a.coeffs), len(b.coeffs))
        z = _zero(ex)
        return SymbolPolynomial([(a.coeffs[k] if k < len(a.coeffs) else z) + (b.coeffs[k] if k < len(b.coeffs) else z)
                                 for k in range(m)], ex)

    __radd__ = __add__

    def __neg__(self):
        return SymbolPolynomial([-c for c in self.coeffs], self.exact)

    def __sub__(self, o):
        return self + (-self._co(o))

    def __rsub__(self, o):
        return self._co(o) - self

    def __mul__(self, o):
        o = self._co(o)
        ex = self._mode(o)
        a, b = (self, o) if ex else (self.to_float(), o.to_float())
        if not a.coeffs or not b.coeffs:
            return SymbolPolynomial([], ex)
        out = [_zero(ex)] * (len(a.coeffs) + len(b.coeffs) - 1)
        for i, x in enumerate(a.coeffs):
            for j, y in enumerate(b.coeffs):
                out[i + j] = out[i + j] + x * y
        return SymbolPolynomial(out, ex)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> SymbolPolynomial:
        out = SymbolPolynomial.const(1, self.exact)
        for _ in range(k):
            out = out * self
        return out

    def divmod(self, b: SymbolPolynomial) -> tuple[SymbolPolynomial, SymbolPolynomial]:
        """``self = q b + r`` with ``deg r < deg b``; verified before returning."""
        ex = self._mode(b)
        a, b = (self, b) if ex else (self.to_float(), b.to_float())
        if b.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        r = list(a.coeffs)
        db = b.degree
        lead = b.coeffs[-1]
        q = [_zero(ex)] * max(len(r) - db, 0)
        for k in range(len(r) - 1, db - 1, -1):
            c = r[k] / lead
            q[k - db] = c
            for j, bc in enumerate(b.coeffs):
                r[k - db + j] = r[k - db + j] - c * bc
        Q = SymbolPolynomial(q, ex)
        R = SymbolPolynomial(r[:db] if db > 0 else [], ex)
        check = Q * b + R - a
        scale = max([abs(complex(c)) for c in a.coeffs] + [1.0])
        if not check.is_zero(0.0 if ex else 1e-9 * scale):
            raise ArithmeticError("division identity a = q b + r failed")
        return Q, R

    def __call__(self, z):
        out = _zero(self.exact) if isinstance(z, QI) or (self.exact and not isinstance(z, complex)) else 0j
        for c in reversed(self.coeffs):
            out = out * z + c
        return out

    def __eq__(self, o):
        if not isinstance(o, SymbolPolynomial):
            o = self._co(o)
        return self.exact == o.exact and self.coeffs == o.coeffs

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if _is_zero(c, self.exact):
                continue
            mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            cs = str(c)
            if mono and cs in ("1", "(1+0j)"):
                parts.append(mono)
            elif mono and cs in ("-1", "(-1+0j)"):
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}{'*' if mono else ''}{mono}")
        return " + ".join(reversed(parts))


def poly_from_roots(roots: Sequence, exact: bool = True) -> SymbolPolynomial:
    out = SymbolPolynomial.const(1, exact)
    for r in roots:
        out = out * SymbolPolynomial([-r, 1], exact)
    return out


# --- polynomial matrices --------------------------------------------------------------------------

PolyMatrix = list[list[SymbolPolynomial]]


def determinant(M: PolyMatrix) -> SymbolPolynomial:
    """Laplace expansion (sizes here are at most about 6)."""
    n = len(M)
    exact = all(p.exact for row in M for p in row)
    if n == 1:
        return M[0][0]
    if all(M[i][j].is_zero() for i in range(n) for j in range(n) if i != j):
        out = SymbolPolynomial.const(1, exact)
        for i in range(n):
            out = out * M[i][i]
        return out
    total = SymbolPolynomial([], exact)
    for j in range(n):
        if M[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * determinant(minor)
        total = total + (term if j % 2 == 0 else -term)
    return total


def adjugate(M: PolyMatrix) -> PolyMatrix:
    n = len(M)
    exact = all(p.exact for row in M for p in row)
    if n == 1:
        return [[SymbolPolynomial.const(1, exact)]]
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(M) if k != i]
            c = determinant(minor)
            out[j][i] = c if (i + j) % 2 == 0 else -c
    return out


def mat_mul(A: PolyMatrix, B: PolyMatrix) -> PolyMatrix:
    exact = all(p.exact for row in A + B for p in row)
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), SymbolPolynomial([], exact))
             for j in range(len(B[0]))] for i in range(len(A))]


def adjugate_identity_residual(M: PolyMatrix) -> bool:
    """``adj(M) M = det(M) I`` exactly (or to 1e-9 in float mode)."""
    n = len(M)
    adj = adjugate(M)
    det = determinant(M)
    prod = mat_mul(adj, M)
    exact = det.exact
    for i in range(n):
        for j in range(n):
            target = det if i == j else SymbolPolynomial([], exact)
            if not (prod[i][j] - target).is_zero(0.0 if exact else 1e-9):
                return False
    return True


# --- system spec ---------------------------------------------------------------------------------

@dataclass
class EllipticSystemSpec:
    L: PolyMatrix
    B: PolyMatrix
    exact: bool = True
    data: dict = field(default_factory=dict)
    # exact roots of the diagonal entries when known in closed form
    root_hint: list | None = None

    @property
    def size(self) -> int:
        return len(self.L)

    def is_diagonal(self) -> bool:
        n = self.size
        return all(self.L[i][j].is_zero() for i in range(n) for j in range(n) if i != j)


def quadratic_form_symbol(ginv: Sequence[Sequence], xi: Sequence, exact: bool = True) -> SymbolPolynomial:
    """``g^{ab}(xi + z n)_a (xi + z n)_b`` with ``n = (1, 0, ..., 0)`` and ``xi_0 = 0``."""
    N = len(ginv)
    eta = [SymbolPolynomial.z(exact)] + [SymbolPolynomial.const(x, exact) for x in xi]
    if len(eta) != N:
        raise ValueError("xi must have one entry per tangential direction")
    out = SymbolPolynomial([], exact)
    for a in range(N):
        for b in range(N):
            if ginv[a][b]:
                out = out + eta[a] * eta[b] * ginv[a][b]
    return out


def diagonal_system(ginv, xi, B: PolyMatrix, size: int, exact: bool = True, data: dict | None = None) -> EllipticSystemSpec:
    q = quadratic_form_symbol(ginv, xi, exact)
    zero = SymbolPolynomial([], exact)
    L = [[q if i == j else zero for j in range(size)] for i in range(size)]
    return EllipticSystemSpec(L, B, exact, dict(data or {}))


def _rational_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    a, b = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if a * a == x.numerator and b * b == x.denominator:
        return Fraction(a, b)
    return None


def build_gauge_system(n: int, g00, ginv_tangential: Sequence[Sequence], xi: Sequence, *,
                       exact: bool | None = None) -> EllipticSystemSpec:
    """The ``(g^00, g_01, ..., g_0n)`` system with its oblique boundary rows.

    ``g^{0i} = 0`` at the point; ``|xi|_h^2 = g^{ij} xi_i xi_j``.  Exact mode
    needs ``g^00`` to be a rational square so ``P = (g^00)^(3/2)`` is rational.
    """
    if n < 1:
        raise ValueError("n must be positive")
    g00 = Fraction(g00) if not isinstance(g00, float) else g00
    if g00 <= 0:
        raise ValueError("g^00 must be positive")
    gt = [[Fraction(x) if not isinstance(x, float) else x for x in row] for row in ginv_tangential]
    if len(gt) != n or any(len(row) != n for row in gt):
        raise ValueError("tangential inverse metric must be n x n")
    for i in range(n):
        for j in range(n):
            if gt[i][j] != gt[j][i]:
                raise ValueError("tangential inverse metric must be symmetric")
    if np.any(np.linalg.eigvalsh(np.array([[float(x) for x in row] for row in gt])) <= 0):
        raise ValueError("tangential metric must be positive definite")
    xi = [Fraction(x) if not isinstance(x, float) else x for x in xi]
    if len(xi) != n or all(x == 0 for x in xi):
        raise ValueError("xi must be a nonzero tangential covector of length n")
    root = _rational_sqrt(g00) if isinstance(g00, Fraction) else None
    if exact is None:
        exact = root is not None and all(isinstance(x, Fraction) for x in xi)
    if exact and root is None:
        raise ValueError("exact mode needs g^00 to be a rational square")
    P = root ** 3 if exact else float(g00) ** 1.5
    N = n + 1
    ginv = [[g00] + [0] * n] + [[0] + list(row) for row in gt]
    w = [sum(gt[i][j] * xi[i] for i in range(n)) for j in range(n)]  # g^{ij} xi_i
    z = SymbolPolynomial.z(exact)
    c = lambda v: SymbolPolynomial.const(v, exact)
    zero = SymbolPolynomial([], exact)
    B = [[z] + [c(-2 * P * w[j]) for j in range(n)]]
    for i in range(n):
        B.append([c(xi[i] / (2 * P))] + [z if j == i else zero for j in range(n)])
    norm2 = sum(gt[i][j] * xi[i] * xi[j] for i in range(n) for j in range(n))
    spec = diagonal_system(ginv, xi, B, N, exact, {"g00": g00, "xi": xi, "P": P, "xi_h2": norm2, "n": n})
    if exact:
        k2 = Fraction(norm2) / g00
        k = _rational_sqrt(k2)
        if k is not None:
            spec.root_hint = [QI(0, k)] * N + [QI(0, -k)] * N
    return spec


def scalar_laplacian(xi: Sequence, boundary_row: Sequence, exact: bool = True) -> EllipticSystemSpec:
    """``Delta`` with flat metric and a single boundary row ``B'`` (entries as constants or polys)."""
    m = len(xi)
    ginv = [[1 if a == b else 0 for b in range(m + 1)] for a in range(m + 1)]
    B = [[p if isinstance(p, SymbolPolynomial) else SymbolPolynomial.const(p, exact) for p in boundary_row]]
    spec = diagonal_system(ginv, xi, B, 1, exact, {"xi": list(xi)})
    k = _rational_sqrt(Fraction(sum(Fraction(x) ** 2 for x in xi))) if exact else None
    if k is not None:
        spec.root_hint = [QI(0, k), QI(0, -k)]
    return spec


# --- operations ------------------------------------------------------------------------------------

def principal_determinant(spec: EllipticSystemSpec) -> SymbolPolynomial:
    return determinant(spec.L)


@dataclass
class RootReport:
    verdict: str                # "properly elliptic" | "not properly elliptic" | "not properly elliptic (borderline)"
    roots: list
    upper: list
    lower: list
    exact: bool

    @property
    def ok(self) -> bool:
        return self.verdict == "properly elliptic"


def _quadratic_roots_exact(q: SymbolPolynomial):
    """Exact roots of ``a z^2 + b z + c`` when the discriminant is a square in Q(i) of simple form."""
    if q.degree != 2:
        return None
    c, b, a = (q.coeffs + [QI(0)] * 3)[:3]
    if a.im or b.im or c.im:
        return None
    a, b, c = a.re, b.re, c.re
    disc = b * b - 4 * a * c
    s = _rational_sqrt(abs(disc))
    if s is None:
        return None
    if disc >= 0:
        return [QI((-b + s) / (2 * a)), QI((-b - s) / (2 * a))]
    return [QI(-b / (2 * a), s / (2 * a)), QI(-b / (2 * a), -s / (2 * a))]


def _float_roots(p: SymbolPolynomial) -> list[complex]:
    cs = [complex(c) for c in reversed(p.coeffs)]
    if len(cs) <= 1:
        return []
    return [complex(r) for r in np.roots(cs)]


def roots_of(spec: EllipticSystemSpec) -> tuple[list, bool]:
    if spec.root_hint is not None:
        # a hint is trusted only if it reproduces the determinant exactly
        det = principal_determinant(spec)
        lead = det.coeffs[-1] if det.coeffs else QI(0)
        if det.exact and (poly_from_roots(spec.root_hint) * SymbolPolynomial.const(lead) - det).is_zero():
            return list(spec.root_hint), True
    if spec.is_diagonal():
        out, exact = [], spec.exact
        for i in range(spec.size):
            q = spec.L[i][i]
            ex = _quadratic_roots_exact(q) if spec.exact else None
            if ex is None:
                exact = False
                out.extend(_float_roots(q.to_float() if q.exact else q))
            else:
                out.extend(ex)
        return out, exact
    det = principal_determinant(spec)
    return _float_roots(det.to_float() if det.exact else det), False


def proper_ellipticity_check(spec: EllipticSystemSpec) -> RootReport:
    roots, exact = roots_of(spec)
    upper, lower, real = [], [], []
    for r in roots:
        if exact and isinstance(r, QI):
            im = r.im
            (upper if im > 0 else lower if im < 0 else real).append(r)
        else:
            c = complex(r)
            if abs(c.imag) <= ROOT_IMAG_TOL * (1 + abs(c)):
                real.append(r)
            else:
                (upper if c.imag > 0 else lower).append(r)
    if real:
        verdict = "not properly elliptic" if exact or any(abs(complex(r).imag) == 0 for r in real) \
            else "not properly elliptic (borderline)"
    elif len(upper) != len(lower):
        verdict = "not properly elliptic"
    else:
        verdict = "properly elliptic"
    return RootReport(verdict, roots, upper, lower, exact)


def lplus(spec: EllipticSystemSpec, roots: RootReport | None = None) -> SymbolPolynomial:
    rep = roots or proper_ellipticity_check(spec)
    if not rep.ok:
        raise ValueError(f"L_0^+ needs a properly elliptic system ({rep.verdict})")
    return poly_from_roots(rep.upper, rep.exact)


@dataclass
class ComplementingResult:
    passed: bool
    rank: int
    rows: int
    matrix: list                 # remainder coefficients, one row per boundary row
    pivots: list[int]            # pivot columns of the row echelon form (certificate)
    kernel: list | None          # C_r with sum C_r Q_r = 0 mod L_0^+ (on failure)
    lplus: SymbolPolynomial
    remainders: list             # remainders[r][beta]
    quotients: list
    Q: PolyMatrix
    exact: bool
    roundtrip_ok: bool

    def report(self, name: str = "complementing") -> ResidualReport:
        mode = "exact" if self.exact else "float"
        detail = f"rank={self.rank}/{self.rows} mode={mode}"
        if self.kernel is not None:
            detail += " kernel=[" + ",".join(str(c) for c in self.kernel) + "]"
        return ResidualReport(name, self.passed, exact=self.exact, detail=detail)


def _rank_exact(rows: list[list[QI]]):
    """Row echelon over Q(i): rank, pivot columns and a left-kernel vector if any."""
    m = len(rows)
    width = len(rows[0]) if rows else 0
    # augment with identity to track row combinations
    A = [list(r) + [QI(1) if i == j else QI(0) for j in range(m)] for i, r in enumerate(rows)]
    pivots = []
    r = 0
    for c in range(width):
        p = next((i for i in range(r, m) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = QI(1) / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(m):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    kernel = None
    if r < m:
        kernel = A[r][width:]
    return r, pivots, kernel


def _rank_float(rows: list[list[complex]]):
    M = np.array(rows, dtype=complex)
    if M.size == 0:
        return 0, [], None
    U, s, Vh = np.linalg.svd(M)
    scale = s[0] if len(s) and s[0] > 0 else 1.0
    rank = int(np.sum(s > FLOAT_RANK_TOL * scale))
    kernel = None
    if rank < M.shape[0]:
        kernel = [complex(x) for x in U[:, -1].conj()]
    # pivots from QR with column pivoting are not in numpy; report singular values instead
    return rank, [float(x) for x in s], kernel


def complementing_check(spec: EllipticSystemSpec, mode: str | None = None) -> ComplementingResult:
    """Rows of ``Q = B' adj(L')`` independent modulo ``L_0^+``."""
    roots = proper_ellipticity_check(spec)
    if not roots.ok:
        raise ValueError(f"complementing condition needs a properly elliptic system ({roots.verdict})")
    exact = spec.exact and roots.exact if mode in (None, "exact") else False
    if mode == "exact" and not exact:
        raise ValueError("exact mode unavailable: roots are not exactly representable")
    Lp = lplus(spec, roots)
    L = spec.L
    B = spec.B
    if not exact:
        L = [[p.to_float() for p in row] for row in L]
        B = [[p.to_float() for p in row] for row in B]
        Lp = Lp.to_float()
    adj = adjugate(L)
    Q = mat_mul(B, adj)
    m = Lp.degree
    rems, quots, rows = [], [], []
    roundtrip = True
    for r_row in Q:
        rr, qq, flat = [], [], []
        for poly in r_row:
            q, rem = poly.divmod(Lp)
            back = q * Lp + rem - poly
            roundtrip &= back.is_zero(0.0 if exact else 1e-10 * _magnitude(poly, q, Lp))
            rr.append(rem)
            qq.append(q)
            flat.extend((rem.coeffs + [_zero(exact)] * m)[:m])
        rems.append(rr)
        quots.append(qq)
        rows.append(flat)
    if exact:
        rank, piv, kernel = _rank_exact(rows)
    else:
        rank, piv, kernel = _rank_float(rows)
    if kernel is not None:
        _check_kernel(kernel, rems, exact)
    return ComplementingResult(rank == len(rows), rank, len(rows), rows, piv, kernel, Lp, rems, quots, Q,
                               exact, roundtrip)


def _magnitude(*polys: SymbolPolynomial) -> float:
    """Largest coefficient size, floored at 1; scales float tolerances."""
    return max([1.0] + [abs(complex(c)) for p in polys for c in p.coeffs])


def _check_kernel(kernel, rems, exact: bool) -> None:
    cols = len(rems[0])
    for b in range(cols):
        acc = SymbolPolynomial([], exact)
        for c, row in zip(kernel, rems):
            acc = acc + row[b] * c
        if not acc.is_zero(0.0 if exact else 1e-9 * _magnitude(*(row[b] for row in rems))):
            raise ArithmeticError("kernel vector does not annihilate the remainders")


def gauge_system_scan(g00_values: Sequence, xi2_values: Sequence, ns: Sequence[int]) -> list[tuple[dict, ComplementingResult]]:
    """Complementing verdicts over a grid; ``xi = (|xi|, 0, ...)`` with ``h = identity``."""
    out = []
    for g00, x2, n in itertools.product(g00_values, xi2_values, ns):
        x = _rational_sqrt(Fraction(x2))
        xi = [x if x is not None else math.sqrt(float(x2))] + [0] * (n - 1)
        ident = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        spec = build_gauge_system(n, g00, ident, xi)
        out.append(({"g00": g00, "xi2": x2, "n": n}, complementing_check(spec)))
    return out
