import math

import pytest
from hypothesis import settings

from ccpj.chain import straight_chain
from ccpj.geometry import BeadSpec
from ccpj.solver import pretension
from ccpj.string_model import OgdenUniaxial

settings.register_profile("ccpj", max_examples=60, deadline=None)
settings.load_profile("ccpj")


@pytest.fixture(scope="session")
def table_spec():
    """Default bead: 15 mm diameter, 15 mm long, 40 deg cone."""
    return BeadSpec()


@pytest.fixture(scope="session")
def jammed_40():
    """Ten free 40 deg beads pretensioned to 50 N with the nylon string."""
    chain = straight_chain(BeadSpec(cone_angle=math.radians(40.0)), 10)
    return pretension(chain, OgdenUniaxial(), 50.0)


def pytest_terminal_summary(terminalreporter):
    from acceptance_report import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(LINES):
            terminalreporter.write_line(LINES[n])
