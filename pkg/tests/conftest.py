from __future__ import annotations

import pytest

from swisscheese.geometry import AnnulusRecord, Disc, SwissCheese, generate_cheese

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def default_cheese() -> SwissCheese:
    return generate_cheese(1.0, 4, 3, 7)


@pytest.fixture(scope="session")
def big_disc_cheese() -> SwissCheese:
    """Hand-built cheese with large discs, so pole clusters and norms are visible."""
    discs = (
        Disc(0.3 + 0.2j, 0.1),
        Disc(-0.35 - 0.1j, 0.15),
        Disc(0.05 - 0.5j, 0.08),
    )
    return SwissCheese(C=1.0, annuli=(AnnulusRecord(3, 2 / 3, 1.0, discs),), seed=0)


@pytest.fixture
def acceptance_log():
    def log(number: int, title: str, ok: bool, info: str = "") -> None:
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} {info}")

    return log


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
