"""Deterministic system-level simulator of cellular aerial coverage for UAVs.

Models sectorized antennas with mainlobes and upward sidelobes, computes
per-height best-server coverage maps, simulates UAV flights with
measurement-report events, and applies cell-pair / cell-group filtering to
handover decisions.
"""

__version__ = "0.1.0"

from .antenna import AntennaConfig, SidelobeSpec, composite_gain, measure_hpbw
from .coverage import (
    CoverageGrid,
    FragmentationReport,
    best_server_grid,
    bcs_filtered_grid,
    fragmentation,
    path_gain_grid,
)
from .geometry import (
    ConicSection,
    FootprintIntervals,
    LobeCone,
    Point3,
    bcs_min_range,
    conic_section,
    footprint_intervals,
    hex_layout,
)
from .mobility import (
    FlightTrace,
    Trajectory,
    UeConfig,
    mobility_metrics,
    simulate_flight,
)
from .network import (
    AerialCoverageGroup,
    Cell,
    CellPair,
    Network,
    build_standard_network,
    capacity_fraction,
    validate_pair,
)
from .policy import (
    HandoverDecision,
    HandoverPolicy,
    MeasurementReport,
    eligible_targets,
    evaluate_mr,
)
from .propagation import LinkBudgetConfig, fspl, path_gain, rss
from .scenario import Scenario, parse_scenario, scenario_hash, serialize_scenario
