from __future__ import annotations

from pathlib import Path

import pytest

from compmpg.diagram import load
from compmpg.game import Role, make_game

ROOT = Path(__file__).resolve().parent.parent
SAMPLE_PATH = ROOT / "diagrams" / "sample.mpg"


@pytest.fixture
def sample_source() -> str:
    return SAMPLE_PATH.read_text()


@pytest.fixture
def sample_game(sample_source):
    return load(sample_source).nodes[0].game


def sample_by_hand():
    """The same game built through the Python API."""
    from compmpg.game import Entrance as En, Exit as Ex
    # exits: 0 = rhs.r1, 1 = rhs.r2, 2 = lhs.l1; entrances: 0..2 = lhs.r*, 3 = rhs.l1
    return make_game(
        (3, 1), (2, 1),
        {"e1": (Role.EXISTS, "3.1"), "a1": (Role.FORALL, "-4.5"), "a2": (Role.FORALL, 2)},
        [(En(0), Ex(0)), (En(1), "a1"), (En(2), "e1"), (En(3), "a2"),
         ("e1", Ex(2)), ("e1", "a1"), ("a1", "a2"), ("a2", "e1"), ("a2", Ex(1))],
    )


ACCEPTANCE: list[str] = []


def report(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
