import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from thzcavity.cavity import EllipseGeometry, enumerate_modes  # noqa: E402

# one line per acceptance criterion, filled in by test_acceptance
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def device_geometry():
    return EllipseGeometry(245.0, 52.0, 1.0, 17.76)


@pytest.fixture(scope="session")
def device_modes(device_geometry):
    return enumerate_modes(device_geometry, 1500.0, m_max=2)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
