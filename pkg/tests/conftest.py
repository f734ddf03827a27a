import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from stateless_hol.state import SymbolTable  # noqa: E402
from stateless_hol.syntax import parse_term, parse_type  # noqa: E402


@pytest.fixture
def table():
    """A table with the repl prelude: num, 0 and 1."""
    t = SymbolTable()
    t.new_type("num", 0)
    t.new_constant("0", parse_type("num", t))
    t.new_constant("1", parse_type("num", t))
    return t


@pytest.fixture
def rich(table):
    """The prelude table plus list, prod, f : num->num and NIL : A list."""
    table.new_type("list", 1)
    table.new_type("prod", 2)
    num = table.mk_type("num")
    table.new_constant("f", table.mk_type("fun", (num, num)))
    table.new_constant("NIL", table.mk_type("list", (table.mk_vartype("A"),)))
    return table


@pytest.fixture
def tm(table):
    return lambda s: parse_term(s, table)


@pytest.fixture
def ty(table):
    return lambda s: parse_type(s, table)


# ---------------------------------------------------------------------------
# Acceptance criteria report: one PASS/FAIL line per criterion, repeated in
# the terminal summary so it survives output capturing.

_ACCEPTANCE = []


@pytest.fixture
def criterion():
    def record(number, title, ok, detail=""):
        line = f"criterion {number} ({title}): {'PASS' if ok else 'FAIL'}"
        if detail:
            line += f"  [{detail}]"
        _ACCEPTANCE.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
