"""Residual reports shared by every module and the CLI's line format."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from .expr import Certainty, ZeroTest, is_zero


@dataclass
class ResidualReport:
    """Outcome of one named check.

    ``exact`` checks carry a :class:`Certainty`; numeric checks carry the
    largest residual magnitude against ``tolerance``.  ``rate`` holds a
    measured decay exponent when the check is an asymptotic one.
    """

    name: str
    passed: bool
    exact: bool = True
    certainty: Certainty | None = None
    magnitude: float | None = None
    tolerance: float | None = None
    rate: float | None = None
    detail: str = ""
    hypothesis_met: bool = True
    seed: int | None = None
    components: dict = field(default_factory=dict)
    children: list[ResidualReport] = field(default_factory=list)

    def line(self) -> str:
        return f"CHECK {self.name} {'PASS' if self.passed else 'FAIL'} {self.summary()}".rstrip()

    def summary(self) -> str:
        bits = []
        if not self.hypothesis_met:
            bits.append("hypothesis-unmet")
        if self.certainty is not None:
            bits.append(f"verdict={self.certainty.name.lower()}")
        if self.magnitude is not None:
            bits.append(f"residual={self.magnitude:.3e}")
        if self.tolerance is not None and not self.exact:
            bits.append(f"tol={self.tolerance:.1e}")
        if self.rate is not None:
            bits.append(f"rate={_fmt_rate(self.rate)}")
        if self.seed is not None:
            bits.append(f"seed={self.seed}")
        if self.detail:
            bits.append(self.detail.replace("\n", " "))
        return " ".join(bits)

    def lines(self) -> list[str]:
        out = [self.line()]
        for c in self.children:
            out.extend(c.lines())
        return out

    def all_passed(self) -> bool:
        return self.passed and all(c.all_passed() for c in self.children)


def _fmt_rate(x: float) -> str:
    return "inf" if math.isinf(x) else f"{x:.3f}"


def parse_check_line(line: str) -> tuple[str, bool, dict[str, str], str]:
    """Inverse of :meth:`ResidualReport.line` for the key=value fields."""
    parts = line.split(" ", 3)
    if len(parts) < 3 or parts[0] != "CHECK" or parts[2] not in ("PASS", "FAIL"):
        raise ValueError(f"not a CHECK line: {line!r}")
    rest = parts[3] if len(parts) > 3 else ""
    fields: dict[str, str] = {}
    free: list[str] = []
    for tok in rest.split():
        if "=" in tok and not tok.startswith("="):
            k, v = tok.split("=", 1)
            fields[k] = v
        else:
            free.append(tok)
    return parts[1], parts[2] == "PASS", fields, " ".join(free)


def exact_zero_report(name: str, values: Iterable, *, seed: int = 0, detail: str = "",
                      allow_numeric: bool = False) -> ResidualReport:
    """Check that every value in ``values`` is zero.

    With ``allow_numeric`` a numerically-zero verdict (transcendental
    atoms that the normal form cannot cancel) also passes.
    """
    worst = Certainty.CERTAIN_ZERO
    nonzero: list[str] = []
    for i, v in enumerate(values):
        t: ZeroTest = is_zero(v, seed=seed)
        if t.verdict is Certainty.NONZERO:
            worst = Certainty.NONZERO
            nonzero.append(str(i))
        elif t.verdict is Certainty.NUMERIC_ZERO and worst is Certainty.CERTAIN_ZERO:
            worst = Certainty.NUMERIC_ZERO
    ok = worst is Certainty.CERTAIN_ZERO or (allow_numeric and worst is Certainty.NUMERIC_ZERO)
    if nonzero:
        detail = (detail + " " if detail else "") + "nonzero-at=" + ",".join(nonzero[:8])
    return ResidualReport(name, ok, exact=True, certainty=worst, detail=detail,
                          seed=seed if worst is not Certainty.CERTAIN_ZERO else None)


def numeric_report(name: str, residuals: Iterable[float], tolerance: float, detail: str = "",
                   hypothesis_met: bool = True) -> ResidualReport:
    vals = [abs(float(v)) for v in residuals]
    mag = max(vals) if vals else 0.0
    ok = hypothesis_met and math.isfinite(mag) and mag <= tolerance
    return ResidualReport(name, ok, exact=False, magnitude=mag, tolerance=tolerance, detail=detail,
                          hypothesis_met=hypothesis_met)
