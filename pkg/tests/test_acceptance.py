"""Acceptance criteria at desk scale; each test prints one PASS/FAIL line."""
import pytest

from schreier_lab import experiments as E

CRITERIA = [
    ("1", "square lattice Schreier", E.suite_square),
    ("2", "triangular and kagome Schreier", E.suite_tri_kagome),
    ("3", "(3,4,6,4) Schreier and locality", E.suite_t3464),
    ("4", "Z^3 Schreier with toast hierarchy", E.suite_z3),
    ("5", "planar balanced orientation", E.suite_planar),
    ("6", "hierarchy engine audit", E.suite_hierarchy),
    ("7", "parity invariant oracle", E.suite_prop23),
    ("8", "product with a cycle", E.suite_prop24),
    ("9", "derived structures", E.suite_derived),
    ("10", "determinism and round-trip", E.suite_determinism),
]


@pytest.mark.parametrize("num,title,suite", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_criterion(num, title, suite, capsys):
    outcomes = suite()
    ok = all(o.passed for o in outcomes)
    with capsys.disabled():
        print(f"\nCRITERION {num} [{'PASS' if ok else 'FAIL'}] {title}")
        for o in outcomes:
            print(f"    {o.line()}")
    assert ok, "; ".join(o.line() for o in outcomes if not o.passed)
