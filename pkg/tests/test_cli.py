from __future__ import annotations

import io

import pytest
from hypothesis import given, strategies as st

from fglab.cli import main
from fglab.cli.catalog import UnknownModelError, catalog, names
from fglab.cli.document import DocumentError, parse_document
from fglab.report import parse_check_line

GOOD = """# flat ball
name = demo
dim = 3
coords = t a b
g[0][0] = "1"   # comment after a value
g[1][1] = "(1-t)^2"
g[2][2] = "(1-t)^2"
rho = "t*(2-t)/2"
h[0][0] = "1"
h[1][1] = "1"
"""


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_document_parses_and_round_trips():
    doc = parse_document(GOOD)
    assert doc.dim == 3 and doc.coords == ("t", "a", "b") and doc.name == "demo"
    assert doc.bcoords() == ("a", "b")
    again = parse_document(doc.to_text())
    assert again.g == doc.g and again.h == doc.h and again.rho == doc.rho


@pytest.mark.parametrize("text, line, col, fragment", [
    ('dim = 2\ncoords = x y\ng[0][0] = "1+z"\n', 3, 14, "undeclared coordinate"),
    ('dim = 2\ncoords = x y\ng[0][0] = "1 +"\n', 3, 15, "end of input"),
    ("dim = 2\ncoords = x y z\n", 2, 1, "dim = 2"),
    ('dim = 2\ndim = 2\n', 2, 1, "duplicate key"),
    ('dim = 2\ncoords = x y\nfoo = 1\ng[0][0] = "1"\n', 3, 1, "unknown key"),
    ('dim = 2\ncoords = x y\ng[0][0] = 1\n', 3, 11, "double-quoted"),
    ('dim = 2\ncoords = x y\ng[0][0] = "1"\ng[0][0] = "2"\n', 4, 1, "duplicate entry"),
    ('dim = 2\ncoords = x y\ng[2][0] = "1"\n', 3, 1, "out of range"),
    ("dim = 2\ncoords = x y\n", 2, 1, "no metric entries"),
    ("this is not a document\n", 1, 1, "key = value"),
])
def test_document_errors_carry_position(text, line, col, fragment):
    with pytest.raises(DocumentError) as e:
        parse_document(text, source="m.fgm")
    assert (e.value.line, e.value.column) == (line, col)
    assert fragment in e.value.message
    assert str(e.value).startswith(f"m.fgm:{line}:{col}:")


def test_catalog_self_tests():
    for name in names():
        assert catalog(name).self_test().all_passed(), name
    with pytest.raises(UnknownModelError):
        catalog("no-such-model")


def test_check_lines_are_parseable():
    code, out = run("adn-check", "--n", "2", "--g00", "4", "--xi", "1,0")
    assert code == 0
    checks = [parse_check_line(l) for l in out.splitlines() if l.startswith("CHECK ")]
    assert checks and all(c[1] for c in checks)


def test_exit_code_one_on_failed_check():
    code, out = run("adn-check", "--n", "2", "--g00", "1", "--xi", "1,0")
    assert code == 1
    assert "CHECK complementing FAIL" in out and "kernel=" in out


@pytest.mark.parametrize("argv", [
    ["curvature"],
    ["curvature", "--model", "nope"],
    ["adn-check", "--n", "2", "--g00", "x", "--xi", "1,0"],
    ["obstruction", "--model", "fg-round-sphere-n3"],
    ["verify", "--suite", "nope"],
    ["no-such-command"],
])
def test_exit_code_two_on_usage_errors(argv, capsys):
    assert run(*argv)[0] == 2


def test_exit_code_two_on_bad_file(tmp_path):
    p = tmp_path / "bad.fgm"
    p.write_text('dim = 2\ncoords = x y\ng[0][0] = "1+q"\n')
    assert run("curvature", "--file", str(p))[0] == 2
    assert run("curvature", "--file", str(tmp_path / "missing.fgm"))[0] == 2


def test_file_and_model_agree(tmp_path):
    p = tmp_path / "ball.fgm"
    p.write_text(catalog("hyperbolic-ball-4d").document.to_text())
    a = run("boundary-check", "--file", str(p))
    b = run("boundary-check", "--model", "hyperbolic-ball-4d")
    assert a == b and a[0] == 0


@pytest.mark.parametrize("argv", [
    ["expand", "--model", "fg-round-sphere-n3", "--order", "6"],
    ["obstruction", "--model", "perturbed-flat-boundary-n4"],
    ["geodesic-gauge", "--model", "hyperbolic-ball-4d"],
    ["asymptotics", "--model", "ah-perturbed-5d"],
    ["curvature", "--model", "s2xh2", "--riemann"],
    ["adn-check", "--laplacian", "--xi", "1", "--boundary-row", "1"],
    ["verify", "--suite", "adn"],
])
def test_subcommands_pass(argv):
    code, out = run(*argv)
    assert code == 0, out
    assert "CHECK " in out


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("FGLAB_SEED", "7")
    code, out = run("curvature", "--model", "hyperbolic-half-space-4d")
    assert code == 0
    monkeypatch.setenv("FGLAB_SEED", "x")
    assert run("curvature", "--model", "hyperbolic-half-space-4d")[0] == 2


@given(st.sampled_from(["1", "x^2+1", "exp(x)*y", "1/(1+y^2)", "sin(x)^2"]))
def test_document_expressions_survive_round_trip(expr):
    doc = parse_document(f'dim = 2\ncoords = x y\ng[0][0] = "{expr}"\ng[1][1] = "1"\n')
    assert parse_document(doc.to_text()).g == doc.g
