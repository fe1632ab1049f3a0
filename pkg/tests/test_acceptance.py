"""The nine acceptance criteria, one named suite each.

Run under pytest, or directly with ``python tests/test_acceptance.py``.
Each criterion prints one line: ``ACCEPTANCE <k> <suite> PASS|FAIL <detail>``.
"""
from __future__ import annotations

import sys
import time

import pytest

from fglab.cli.suites import SUITES

CRITERIA = [
    (1, "fg-flat", "FG recursion on a flat boundary, n=3 and n=4, exact zeros through n+4"),
    (2, "fg-round-sphere", "round sphere jets equal the closed form through r^6"),
    (3, "obstruction", "n=4 log coefficient: trace free, free-data invariant, curvature relations"),
    (4, "weyl-obstruction", "coeff(W_irjr)=0 iff f=0, pipeline jet and 20 random h"),
    (5, "identities", "Weyl, Riemann and Bianchi identities on S2xS2"),
    (6, "boundary", "boundary relations, exact series and numeric at 5 probes <= 1e-6"),
    (7, "adn", "complementing condition grid, Laplacian cases, exact roots"),
    (8, "asymptotics", "decay exponents within 0.1 of the constructed values"),
    (9, "toolchain", "parser round trip, idempotence, finite-difference curvature <= 1e-6"),
]


def run_criterion(k: int, suite: str, seed: int = 0):
    t0 = time.perf_counter()
    rep = SUITES[suite](seed)
    elapsed = time.perf_counter() - t0
    failed = [c.name for c in rep.children if not c.passed]
    detail = f"{elapsed:.2f}s" + (f" failed={','.join(failed)}" if failed else "")
    line = f"ACCEPTANCE {k} {suite} {'PASS' if rep.passed else 'FAIL'} {detail}"
    return rep, line


@pytest.mark.parametrize("k, suite, summary", CRITERIA, ids=[f"{k}-{s}" for k, s, _ in CRITERIA])
def test_criterion(k, suite, summary, capsys):
    rep, line = run_criterion(k, suite)
    with capsys.disabled():
        print(f"\n{line}  # {summary}")
    assert rep.passed, "\n".join(rep.lines())


def main() -> int:
    ok = True
    for k, suite, summary in CRITERIA:
        rep, line = run_criterion(k, suite)
        print(f"{line}  # {summary}")
        ok &= rep.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
