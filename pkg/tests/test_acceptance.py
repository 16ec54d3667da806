"""The acceptance suite at the default parameters, one test per criterion."""

import pytest

from klab.acceptance import TITLES, AcceptanceSuite, format_line

from .conftest import ACCEPTANCE_LINES


@pytest.fixture(scope="module")
def suite():
    return AcceptanceSuite(seed=0)


@pytest.mark.parametrize("number", sorted(TITLES), ids=[f"{k:02d}-{TITLES[k].replace(' ', '-')}" for k in sorted(TITLES)])
def test_criterion(suite, number):
    result = getattr(suite, f"criterion_{number}")()
    line = format_line(result)
    ACCEPTANCE_LINES.append(line)
    print(line)
    for note in result.notes:
        print(f"    note [{'PASS' if note.passed else 'FAIL'}] {note.name}: {note.lhs} {note.relation} {note.rhs}")
    failed = [c for c in result.checks if not c.passed]
    assert not failed, "\n".join(f"{c.name}: {c.lhs} {c.relation} {c.rhs} (margin {c.margin})" for c in failed)
