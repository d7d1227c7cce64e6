"""Cell / site / pair / group object model and its validation rules."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .antenna import AntennaConfig, cone_lobes
from .errors import InvalidParameterError, NotFoundError
from .geometry import Point3, circular_diff, conic_points, hex_layout

__all__ = [
    "ROLES",
    "STANDARD_SECTOR_AZIMUTHS",
    "Cell",
    "CellPair",
    "AerialCoverageGroup",
    "Network",
    "PairValidation",
    "build_standard_network",
    "validate_pair",
    "capacity_fraction",
]

ROLES = ("conventional", "aerial_coverage", "mainlobe_indication")
STANDARD_SECTOR_AZIMUTHS = (90.0, 210.0, 330.0)


@dataclass(frozen=True)
class Cell:
    """One sector.  ``position.z`` is the antenna height; ``role`` is the
    standalone default - inside a group the pair membership decides the
    effective role, so one cell may serve different purposes in different
    groups."""

    id: int
    site_id: int
    position: Point3
    boresight_azimuth: float
    antenna: AntennaConfig
    tx_power_dbm: float = 44.0
    role: str = "conventional"

    def __post_init__(self):
        if self.role not in ROLES:
            raise InvalidParameterError(f"unknown cell role {self.role!r}")


@dataclass(frozen=True)
class CellPair:
    aerial_coverage_cell: int
    mainlobe_indication_cell: int


@dataclass(frozen=True)
class AerialCoverageGroup:
    """Named set of cell-pairs forming an isolated aerial mobility domain.

    ``qos_profile`` is opaque metadata (intended UL/DL ratio, latency
    class, ...); the simulator carries it but never interprets it.
    """

    group_id: str
    pairs: tuple
    qos_profile: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        seen = set()
        for p in self.pairs:
            for cid in (p.aerial_coverage_cell, p.mainlobe_indication_cell):
                if cid in seen:
                    raise InvalidParameterError(
                        f"cell {cid} appears more than once in group "
                        f"{self.group_id!r}"
                    )
                seen.add(cid)

    @property
    def aerial_cells(self) -> frozenset:
        return frozenset(p.aerial_coverage_cell for p in self.pairs)

    def indication_for(self, aerial_cell_id: int) -> int:
        for p in self.pairs:
            if p.aerial_coverage_cell == aerial_cell_id:
                return p.mainlobe_indication_cell
        raise NotFoundError(
            f"cell {aerial_cell_id} is not an aerial-coverage-cell of group "
            f"{self.group_id!r}"
        )


@dataclass(frozen=True)
class Network:
    cells: tuple
    groups: tuple = ()
    isd: float = 500.0
    predefined_height: float = 300.0

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        object.__setattr__(self, "groups", tuple(self.groups))
        ids = [c.id for c in self.cells]
        if len(ids) != len(set(ids)):
            raise InvalidParameterError("cell ids must be unique across the network")
        if self.cells:
            top = max(c.position.z for c in self.cells)
            if self.predefined_height <= top:
                raise InvalidParameterError(
                    f"predefined_height {self.predefined_height} m must exceed "
                    f"the tallest antenna at {top} m"
                )
        names = [g.group_id for g in self.groups]
        if len(names) != len(set(names)):
            raise InvalidParameterError("group ids must be unique")

    @cached_property
    def _by_id(self) -> dict:
        return {c.id: c for c in self.cells}

    @cached_property
    def _groups_by_id(self) -> dict:
        return {g.group_id: g for g in self.groups}

    def cell(self, cell_id: int) -> Cell:
        try:
            return self._by_id[cell_id]
        except KeyError:
            raise NotFoundError(f"no cell with id {cell_id}") from None

    def group(self, group_id: str) -> AerialCoverageGroup:
        try:
            return self._groups_by_id[group_id]
        except KeyError:
            raise NotFoundError(f"no group named {group_id!r}") from None

    def aerial_cells_of_any_group(self) -> frozenset:
        out = set()
        for g in self.groups:
            out |= g.aerial_cells
        return frozenset(out)


def build_standard_network(
    rings: int,
    isd: float,
    antenna_height: float,
    antenna: AntennaConfig,
    tx_power_dbm: float = 44.0,
    predefined_height: float = 300.0,
) -> Network:
    """Hexagonal grid of three-sector sites, all cells conventional.

    Sector boresights are fixed at 90/210/330 degrees; cell ids count from 1
    in site order, three per site.
    """
    sites = hex_layout(rings, isd)
    cells = []
    for s, site in enumerate(sites):
        for k, az in enumerate(STANDARD_SECTOR_AZIMUTHS):
            cells.append(
                Cell(
                    id=3 * s + k + 1,
                    site_id=s,
                    position=Point3(site.x, site.y, antenna_height),
                    boresight_azimuth=az,
                    antenna=antenna,
                    tx_power_dbm=tx_power_dbm,
                )
            )
    return Network(cells=tuple(cells), groups=(), isd=isd,
                   predefined_height=predefined_height)


@dataclass(frozen=True)
class PairValidation:
    ok: bool
    violations: tuple  # of (code, message), sorted by code

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [{"code": c, "message": m} for c, m in self.violations],
        }


def _mainlobe_overlap(cell_a: Cell, cell_b: Cell, height: float, isd: float) -> bool:
    """Grid check: do the two mainlobe beyond-conic-section regions at the
    given height intersect anywhere within a generous window?"""
    lobe_a = cone_lobes(cell_a.position, cell_a.boresight_azimuth, cell_a.antenna)[0][1]
    lobe_b = cone_lobes(cell_b.position, cell_b.boresight_azimuth, cell_b.antenna)[0][1]
    cx = 0.5 * (cell_a.position.x + cell_b.position.x)
    cy = 0.5 * (cell_a.position.y + cell_b.position.y)
    span = 6.0 * isd + 10.0 * max(height - cell_a.position.z, height - cell_b.position.z, isd)
    step = max(10.0, span / 360.0)
    xs = np.arange(cx - span, cx + span, step)
    ys = np.arange(cy - span, cy + span, step)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.stack([gx, gy, np.full_like(gx, height)], axis=-1)
    return bool((lobe_a.contains(pts) & lobe_b.contains(pts)).any())


def _sidelobe_footprint_points(cell: Cell, height: float):
    """Dense sample of the cell's sidelobe footprints at the given height."""
    out = []
    for kind, lobe in cone_lobes(cell.position, cell.boresight_azimuth, cell.antenna):
        if kind == "mainlobe":
            continue
        boundary = conic_points(lobe, height, n=256)
        if len(boundary) == 0:
            continue
        xmin, ymin = boundary[:, 0].min(), boundary[:, 1].min()
        xmax, ymax = boundary[:, 0].max(), boundary[:, 1].max()
        if not (np.isfinite([xmin, xmax, ymin, ymax]).all()):
            continue
        step = max(min((xmax - xmin), (ymax - ymin)) / 50.0, 0.5)
        xs = np.arange(xmin, xmax + step, step)
        ys = np.arange(ymin, ymax + step, step)
        gx, gy = np.meshgrid(xs, ys)
        pts = np.stack([gx, gy, np.full_like(gx, height)], axis=-1).reshape(-1, 3)
        out.append((lobe, pts[lobe.contains(pts)]))
    return out


def _sidelobes_disjoint(cell_a: Cell, cell_b: Cell, height: float) -> bool:
    fp_a = _sidelobe_footprint_points(cell_a, height)
    lobes_b = [
        lobe
        for kind, lobe in cone_lobes(cell_b.position, cell_b.boresight_azimuth, cell_b.antenna)
        if kind != "mainlobe"
    ]
    for _, pts in fp_a:
        for lobe in lobes_b:
            if len(pts) and lobe.contains(pts).any():
                return False
    return True


def validate_pair(
    network: Network,
    pair: CellPair,
    boresight_tolerance: float = 15.0,
    adjacency_factor: float = 1.1,
) -> PairValidation:
    """Check the structural and geometric constraints of a cell-pair.

    Structural: distinct grid-adjacent sites and similar boresights.
    Geometric, on the cone model at the network's predefined height: the
    two mainlobe coverage regions must intersect while the sidelobe
    footprints stay disjoint.
    """
    a = network.cell(pair.aerial_coverage_cell)
    b = network.cell(pair.mainlobe_indication_cell)
    violations = []

    if a.site_id == b.site_id:
        violations.append(("same-site", f"cells {a.id} and {b.id} share site {a.site_id}"))
    dist = math.hypot(a.position.x - b.position.x, a.position.y - b.position.y)
    limit = adjacency_factor * network.isd
    if dist > limit:
        violations.append(
            ("not-adjacent", f"sites are {dist:.1f} m apart, above the "
                             f"{limit:.1f} m adjacency limit")
        )
    diff = circular_diff(a.boresight_azimuth, b.boresight_azimuth)
    if diff > boresight_tolerance:
        violations.append(
            ("boresight-mismatch", f"boresights differ by {diff:.1f} deg, above "
                                   f"the {boresight_tolerance:.1f} deg tolerance")
        )

    h = network.predefined_height
    if a.site_id != b.site_id:
        if not _mainlobe_overlap(a, b, h, network.isd):
            violations.append(
                ("mainlobe-gap", f"mainlobe coverage regions at {h:.0f} m do not overlap")
            )
        if not _sidelobes_disjoint(a, b, h):
            violations.append(
                ("sidelobe-overlap", f"sidelobe footprints at {h:.0f} m overlap")
            )

    violations.sort()
    return PairValidation(ok=not violations, violations=tuple(violations))


def capacity_fraction(network: Network, group: AerialCoverageGroup) -> float:
    """Share of the network's cells that the group dedicates to aerial
    coverage: distinct aerial-coverage-cells over total cells."""
    if not network.cells:
        raise InvalidParameterError("network has no cells")
    return len(group.aerial_cells) / len(network.cells)
