"""Shared reference networks for the test suite.

``reference_groups`` builds the two aerial-coverage groups used across the
coverage, mobility and acceptance tests on the standard 19-site network:

* group g1: three pairs whose aerial cells sit one outer-ring hop from the
  map center with boresights through it, giving three wide coverage lobes
  that meet over the central site;
* group g2: six pairs using inner-ring cells as aerial cells (several g1
  cells return in swapped roles), doubling the dedicated capacity with
  smaller per-cell regions.
"""

import pytest

from aircov.antenna import AntennaConfig
from aircov.network import (
    AerialCoverageGroup,
    CellPair,
    Network,
    build_standard_network,
)

G1_PAIRS = (CellPair(49, 46), CellPair(26, 29), CellPair(39, 36))
G2_PAIRS = (
    CellPair(19, 49),
    CellPair(16, 46),
    CellPair(8, 26),
    CellPair(5, 23),
    CellPair(12, 39),
    CellPair(15, 48),
)


def reference_groups():
    return (
        AerialCoverageGroup("g1", G1_PAIRS, {"service": "command-and-control"}),
        AerialCoverageGroup("g2", G2_PAIRS, {"service": "video-uplink"}),
    )


def standard_network_with_groups(antenna=None):
    base = build_standard_network(2, 500, 75, antenna or AntennaConfig())
    return Network(
        cells=base.cells,
        groups=reference_groups(),
        isd=base.isd,
        predefined_height=base.predefined_height,
    )


@pytest.fixture(scope="session")
def grouped_network():
    return standard_network_with_groups()


@pytest.fixture(scope="session")
def cone_grouped_network():
    return standard_network_with_groups(AntennaConfig(model="cone"))


# --------------------------------------------------------------------------
# The five-cell walkthrough network: a UAV flies east at 300 m, serving the
# aerial cell of pair (2, 1), and meets in order a conventional cell's
# sidelobe (ignored), the same cell's second sidelobe (ignored), the
# sidelobe of aerial cell 5 while its indication cell 4 is out of view
# (ignored), and finally cell 5's mainlobe with cell 4 audible (handover).
# Cell 4 sits laterally offset with low power so it is heard, never chosen;
# narrow sidelobe cones keep each trigger window below two time-to-trigger
# lengths, so every window yields exactly one report.
# --------------------------------------------------------------------------

from aircov.antenna import SidelobeSpec
from aircov.geometry import Point3
from aircov.mobility import Trajectory
from aircov.network import Cell
from aircov.policy import HandoverPolicy

WALKTHROUGH_SPEED = 50.0


def walkthrough_network():
    sl_narrow = (SidelobeSpec(50.0, 2.0, -8.0),)
    sl_double = (SidelobeSpec(25.0, 0.5, -8.0), SidelobeSpec(50.0, 2.0, -8.0))

    def cone(sidelobes):
        return AntennaConfig(model="cone", sidelobes=sidelobes)

    cells = (
        Cell(1, 1, Point3(-3700.0, 0.0, 75.0), 0.0, cone(sl_narrow)),
        Cell(2, 2, Point3(-3200.0, 0.0, 75.0), 0.0, cone(sl_narrow)),
        Cell(3, 3, Point3(-160.0, 0.0, 75.0), 180.0, cone(sl_double)),
        Cell(4, 4, Point3(81.0, 140.0, 75.0), 0.0, cone(sl_narrow),
             tx_power_dbm=20.0),
        Cell(5, 5, Point3(561.0, 0.0, 75.0), 0.0, cone(sl_narrow)),
    )
    group = AerialCoverageGroup("walk", (CellPair(2, 1), CellPair(5, 4)))
    return Network(cells=cells, groups=(group,), isd=500.0)


def walkthrough_trajectory(sample_interval=0.01):
    return Trajectory(
        (Point3(-900.0, 0.0, 300.0), Point3(1500.0, 0.0, 300.0)),
        speed_mps=WALKTHROUGH_SPEED,
        sample_interval_s=sample_interval,
    )


WALKTHROUGH_POLICY = HandoverPolicy("bcs", group_id="walk")


@pytest.fixture(scope="session")
def walkthrough_net():
    return walkthrough_network()
