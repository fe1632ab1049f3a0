"""Line-oriented metric documents.

    # comment
    name = hyperbolic-ball-4d
    description = free text
    dim = 4
    coords = t y1 y2 y3
    metric = compactified          # or "plus": g is g_+ and rho^2 g is used
    g[0][0] = "1"                  # 0-based indices; unset entries are 0
    rho = "t*(2-t)/2"
    boundary_coords = y1 y2 y3     # defaults to coords[1:]
    h[0][0] = "4/(1+y1^2+y2^2+y3^2)^2"
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from ..expr import ExprSyntaxError, Rat, atoms, parse_expr, to_rat, to_string
from ..geometry import MetricField


class DocumentError(ValueError):
    """Parse or validation failure with a 1-based line and column."""

    def __init__(self, message: str, line: int, column: int, source: str = "<text>"):
        self.message, self.line, self.column, self.source = message, line, column, source
        super().__init__(f"{source}:{line}:{column}: {message}")


@dataclass
class MetricDocument:
    dim: int
    coords: tuple[str, ...]
    g: dict[tuple[int, int], str] = field(default_factory=dict)
    rho: str | None = None
    metric_kind: str = "compactified"
    boundary_coords: tuple[str, ...] | None = None
    h: dict[tuple[int, int], str] = field(default_factory=dict)
    name: str = ""
    description: str = ""

    # --- conversions ---------------------------------------------------------------

    def _matrix(self, entries: dict[tuple[int, int], str], size: int) -> list[list[Rat]]:
        m = [[Rat.zero() for _ in range(size)] for _ in range(size)]
        for (i, j), text in entries.items():
            m[i][j] = m[j][i] = to_rat(text)
        return m

    def metric(self) -> MetricField:
        """The metric exactly as written (``g_+`` when ``metric = plus``)."""
        return MetricField(self.coords, self._matrix(self.g, self.dim))

    def compactified(self) -> MetricField:
        g = self.metric()
        if self.metric_kind == "plus":
            if self.rho is None:
                raise ValueError("metric = plus needs rho")
            r2 = to_rat(self.rho) ** 2
            g = MetricField(self.coords, [[r2 * x for x in row] for row in g.g])
        return g

    def rho_rat(self) -> Rat | None:
        return None if self.rho is None else to_rat(self.rho)

    def bcoords(self) -> tuple[str, ...]:
        return self.boundary_coords if self.boundary_coords is not None else self.coords[1:]

    def boundary_metric(self) -> MetricField | None:
        if not self.h:
            return None
        bc = self.bcoords()
        return MetricField(bc, self._matrix(self.h, len(bc)))

    def to_text(self) -> str:
        out = []
        if self.name:
            out.append(f"name = {self.name}")
        if self.description:
            out.append(f"description = {self.description}")
        out += [f"dim = {self.dim}", f"coords = {' '.join(self.coords)}", f"metric = {self.metric_kind}"]
        for (i, j), e in sorted(self.g.items()):
            out.append(f'g[{i}][{j}] = "{e}"')
        if self.rho is not None:
            out.append(f'rho = "{self.rho}"')
        if self.boundary_coords is not None:
            out.append(f"boundary_coords = {' '.join(self.boundary_coords)}")
        for (i, j), e in sorted(self.h.items()):
            out.append(f'h[{i}][{j}] = "{e}"')
        return "\n".join(out) + "\n"


_LINE = re.compile(r"^\s*(?P<key>[A-Za-z_]+)(?P<idx>(\[\s*\d+\s*\]){2})?\s*=\s*(?P<val>.*?)\s*$")
_IDX = re.compile(r"\[\s*(\d+)\s*\]")
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _strip_comment(line: str) -> str:
    inside = False
    for k, ch in enumerate(line):
        if ch == '"':
            inside = not inside
        elif ch == "#" and not inside:
            return line[:k]
    return line


def parse_document(text: str, source: str = "<text>") -> MetricDocument:
    fields: dict[str, object] = {}
    g: dict[tuple[int, int], tuple[str, int, int]] = {}
    h: dict[tuple[int, int], tuple[str, int, int]] = {}
    where: dict[str, int] = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        m = _LINE.match(line)
        if m is None:
            col = len(line) - len(line.lstrip()) + 1
            raise DocumentError("expected 'key = value'", ln, col, source)
        key, val = m.group("key"), m.group("val")
        vcol = m.start("val") + 1
        if m.group("idx"):
            if key not in ("g", "h"):
                raise DocumentError(f"indexed entry {key!r} is not allowed", ln, m.start("key") + 1, source)
            i, j = (int(x) for x in _IDX.findall(m.group("idx")))
            expr, _, ecol = _quoted(val, ln, vcol, source)
            target = g if key == "g" else h
            key_ij = (max(i, j), min(i, j))
            if key_ij in target:
                raise DocumentError(f"duplicate entry {key}[{i}][{j}]", ln, m.start("key") + 1, source)
            target[key_ij] = (expr, ln, ecol)
            continue
        if key in fields:
            raise DocumentError(f"duplicate key {key!r}", ln, m.start("key") + 1, source)
        where[key] = ln
        if key == "dim":
            if not val.isdigit():
                raise DocumentError("dim must be a positive integer", ln, vcol, source)
            fields[key] = int(val)
        elif key in ("coords", "boundary_coords"):
            names = val.split()
            for nm in names:
                if not _IDENT.match(nm):
                    raise DocumentError(f"bad coordinate name {nm!r}", ln, vcol + val.find(nm), source)
            if len(set(names)) != len(names):
                raise DocumentError("coordinate names must be distinct", ln, vcol, source)
            fields[key] = tuple(names)
        elif key == "rho":
            fields[key] = _quoted(val, ln, vcol, source)
        elif key == "metric":
            if val not in ("compactified", "plus"):
                raise DocumentError("metric must be 'compactified' or 'plus'", ln, vcol, source)
            fields[key] = val
        elif key in ("name", "description"):
            fields[key] = val.strip('"')
        else:
            raise DocumentError(f"unknown key {key!r}", ln, m.start("key") + 1, source)
    last = max(1, len(text.splitlines()))
    if "dim" not in fields or "coords" not in fields:
        raise DocumentError("document needs 'dim' and 'coords'", last, 1, source)
    dim, coords = fields["dim"], fields["coords"]
    if dim < 2:
        raise DocumentError("dim must be at least 2", where["dim"], 1, source)
    if len(coords) != dim:
        raise DocumentError(f"coords lists {len(coords)} names but dim = {dim}", where["coords"], 1, source)
    bcoords = fields.get("boundary_coords")
    bnames = bcoords if bcoords is not None else coords[1:]

    def check(entries, size, names, label):
        out = {}
        for (i, j), (expr, ln, col) in entries.items():
            if i >= size:
                raise DocumentError(f"index {i} out of range for {label}", ln, 1, source)
            _check_expr(expr, names, ln, col, source)
            out[(j, i)] = expr
        return out

    gd = check(g, dim, coords, "g")
    hd = check(h, len(bnames), bnames, "h")
    rho = None
    if "rho" in fields:
        rho, ln_c = fields["rho"][0], fields["rho"][2]
        _check_expr(rho, coords, where["rho"], ln_c, source)
    doc = MetricDocument(dim, coords, gd, rho, fields.get("metric", "compactified"), bcoords, hd,
                         fields.get("name", ""), fields.get("description", ""))
    if not gd:
        raise DocumentError("no metric entries g[i][j]", last, 1, source)
    return doc


def _quoted(val: str, ln: int, col: int, source: str) -> tuple[str, int, int]:
    if len(val) < 2 or val[0] != '"' or val[-1] != '"':
        raise DocumentError("expression must be double-quoted", ln, col, source)
    return val[1:-1], ln, col + 1


def _check_expr(expr: str, names, ln: int, col: int, source: str) -> None:
    try:
        tree = parse_expr(expr)
    except ExprSyntaxError as e:
        pre = expr.encode("utf-8")[:e.offset].decode("utf-8", "ignore")
        raise DocumentError(str(e).rsplit(" at offset", 1)[0], ln, col + len(pre), source) from None
    unknown = sorted(atoms(tree) - set(names))
    if unknown:
        raise DocumentError(f"undeclared coordinate {unknown[0]!r}", ln, col + max(0, expr.find(unknown[0])), source)


def load_metric(path: str | Path) -> MetricDocument:
    p = Path(path)
    return parse_document(p.read_text(encoding="utf-8"), source=str(p))


def canonical(expr: str) -> str:
    """Printed form of a parsed expression (used for round-tripping)."""
    return to_string(parse_expr(expr))
