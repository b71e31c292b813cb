from pathlib import Path

import numpy as np
import pytest

from qgt.expander import parse_graph

DATA = Path(__file__).parent / "data"


def load_graph(name: str):
    """Stored desk expander; parsing re-verifies it by brute force."""
    return parse_graph((DATA / f"{name}.qgtexp").read_text())


@pytest.fixture(scope="session")
def desk_graph():
    return load_graph("desk_16_64_4_8")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# -- acceptance summary ----------------------------------------------------------

CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        status, detail = CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {detail}")
