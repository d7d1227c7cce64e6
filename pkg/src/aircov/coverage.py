"""Best-server grids at arbitrary heights and fragmentation metrics.

Grids are evaluated as pure maps over points (vectorized with numpy), so
results are independent of evaluation order.  Ties in best-server
selection break to the lowest cell id, and a point is covered only when at
least one considered cell is received at or above the noise floor.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import InvalidParameterError, NotFoundError
from .network import AerialCoverageGroup, Network
from .propagation import LinkBudgetConfig, path_gain, rss

__all__ = [
    "DEFAULT_BOUNDS",
    "DEFAULT_RESOLUTION",
    "CoverageGrid",
    "FragmentationReport",
    "PathGainGrid",
    "best_server_grid",
    "bcs_filtered_grid",
    "fragmentation",
    "path_gain_grid",
    "write_grid_csv",
    "grid_metadata",
]

DEFAULT_BOUNDS = (-2500.0, -2500.0, 2500.0, 2500.0)
DEFAULT_RESOLUTION = 10.0

UNCOVERED = -1


def _grid_axes(bounds, resolution):
    if resolution <= 0:
        raise InvalidParameterError("resolution must be > 0")
    xmin, ymin, xmax, ymax = (float(v) for v in bounds)
    nx = int(np.floor((xmax - xmin) / resolution + 1e-9)) + 1 if xmax >= xmin else 0
    ny = int(np.floor((ymax - ymin) / resolution + 1e-9)) + 1 if ymax >= ymin else 0
    xs = xmin + resolution * np.arange(nx)
    ys = ymin + resolution * np.arange(ny)
    return xs, ys


def _grid_points(xs, ys, height):
    gx, gy = np.meshgrid(xs, ys)
    return np.stack([gx, gy, np.full_like(gx, float(height))], axis=-1)


@dataclass(frozen=True)
class CoverageGrid:
    """Per-point best cell and RSS at a fixed height.

    ``best_cell`` is (ny, nx) of cell ids with -1 for uncovered points;
    ``best_rss`` holds the winning RSS in dBm (NaN where no cell was even
    eligible).  Rows follow ascending y, columns ascending x.
    """

    height: float
    origin: tuple
    nx: int
    ny: int
    resolution: float
    best_cell: np.ndarray
    best_rss: np.ndarray
    per_cell_rss: dict | None = None

    @property
    def xs(self) -> np.ndarray:
        return self.origin[0] + self.resolution * np.arange(self.nx)

    @property
    def ys(self) -> np.ndarray:
        return self.origin[1] + self.resolution * np.arange(self.ny)

    @property
    def covered(self) -> np.ndarray:
        return self.best_cell != UNCOVERED


@dataclass(frozen=True)
class PathGainGrid:
    height: float
    origin: tuple
    nx: int
    ny: int
    resolution: float
    max_path_gain: np.ndarray


@dataclass(frozen=True)
class FragmentationReport:
    per_cell_components: dict
    total_components: int
    covered_fraction: float

    def to_dict(self) -> dict:
        return {
            "per_cell_components": {str(k): v for k, v in sorted(self.per_cell_components.items())},
            "total_components": self.total_components,
            "covered_fraction": self.covered_fraction,
        }


def best_server_grid(
    network: Network,
    height: float,
    bounds=DEFAULT_BOUNDS,
    resolution: float = DEFAULT_RESOLUTION,
    cell_filter=None,
    link: LinkBudgetConfig | None = None,
    keep_per_cell: bool = False,
) -> CoverageGrid:
    """Best-server map: argmax of RSS over the (optionally filtered) cells
    at every grid point, lowest cell id winning ties."""
    link = link or LinkBudgetConfig()
    if cell_filter is not None:
        cell_filter = set(cell_filter)
        if not cell_filter:
            raise InvalidParameterError("cell_filter must not be empty")
        cells = [network.cell(cid) for cid in sorted(cell_filter)]
    else:
        cells = sorted(network.cells, key=lambda c: c.id)
    if not cells:
        raise InvalidParameterError("no cells to evaluate")

    xs, ys = _grid_axes(bounds, resolution)
    pts = _grid_points(xs, ys, height)
    best = np.full(pts.shape[:2], -np.inf)
    who = np.full(pts.shape[:2], UNCOVERED, dtype=int)
    per_cell = {} if keep_per_cell else None
    for cell in cells:
        r = np.asarray(rss(cell, pts, link))
        if keep_per_cell:
            per_cell[cell.id] = r
        better = r > best
        best = np.where(better, r, best)
        who = np.where(better, cell.id, who)
    who = np.where(best >= link.noise_floor_dbm, who, UNCOVERED)
    return CoverageGrid(
        height=float(height),
        origin=(float(xs[0]) if len(xs) else float(bounds[0]),
                float(ys[0]) if len(ys) else float(bounds[1])),
        nx=len(xs),
        ny=len(ys),
        resolution=float(resolution),
        best_cell=who,
        best_rss=best,
        per_cell_rss=per_cell,
    )


def bcs_filtered_grid(
    network: Network,
    group: AerialCoverageGroup,
    height: float,
    bounds=DEFAULT_BOUNDS,
    resolution: float = DEFAULT_RESOLUTION,
    link: LinkBudgetConfig | None = None,
) -> CoverageGrid:
    """Best server among the group's aerial-coverage-cells, with the
    measurement-report inclusion rule applied pointwise: an aerial cell is
    eligible at a point only where both it and its paired
    mainlobe-indication-cell are received at or above the noise floor."""
    link = link or LinkBudgetConfig()
    if not group.pairs:
        raise InvalidParameterError(f"group {group.group_id!r} has no pairs")
    if height < network.predefined_height:
        raise InvalidParameterError(
            f"filtered grids are defined at or above the predefined height "
            f"({network.predefined_height} m); got {height} m"
        )
    xs, ys = _grid_axes(bounds, resolution)
    pts = _grid_points(xs, ys, height)
    best = np.full(pts.shape[:2], -np.inf)
    who = np.full(pts.shape[:2], UNCOVERED, dtype=int)
    for pair in sorted(group.pairs, key=lambda p: p.aerial_coverage_cell):
        aerial = network.cell(pair.aerial_coverage_cell)
        indication = network.cell(pair.mainlobe_indication_cell)
        r_a = np.asarray(rss(aerial, pts, link))
        r_i = np.asarray(rss(indication, pts, link))
        eligible = (r_a >= link.noise_floor_dbm) & (r_i >= link.noise_floor_dbm)
        cand = np.where(eligible, r_a, -np.inf)
        better = cand > best
        best = np.where(better, cand, best)
        who = np.where(better, aerial.id, who)
    best = np.where(np.isfinite(best), best, np.nan)
    return CoverageGrid(
        height=float(height),
        origin=(float(xs[0]) if len(xs) else float(bounds[0]),
                float(ys[0]) if len(ys) else float(bounds[1])),
        nx=len(xs),
        ny=len(ys),
        resolution=float(resolution),
        best_cell=who,
        best_rss=best,
    )


def fragmentation(grid: CoverageGrid) -> FragmentationReport:
    """4-connected component count per best-server cell value.

    Uncovered points are excluded; the conservative connectivity makes the
    metric reproducible."""
    if grid.nx == 0 or grid.ny == 0:
        raise InvalidParameterError("grid is empty")
    per_cell = {}
    total = 0
    for cid in np.unique(grid.best_cell):
        if cid == UNCOVERED:
            continue
        mask = grid.best_cell == cid
        _, n = ndimage.label(mask)
        per_cell[int(cid)] = int(n)
        total += int(n)
    covered = float(np.count_nonzero(grid.covered)) / grid.best_cell.size
    return FragmentationReport(
        per_cell_components=per_cell,
        total_components=total,
        covered_fraction=covered,
    )


def path_gain_grid(
    network: Network,
    cells,
    height: float,
    bounds=DEFAULT_BOUNDS,
    resolution: float = DEFAULT_RESOLUTION,
    link: LinkBudgetConfig | None = None,
) -> PathGainGrid:
    """Per-point maximum path gain over the listed cells only (every other
    cell treated as inactive)."""
    link = link or LinkBudgetConfig()
    chosen = [network.cell(cid) for cid in sorted(set(cells))]
    if not chosen:
        raise NotFoundError("no cells selected")
    xs, ys = _grid_axes(bounds, resolution)
    pts = _grid_points(xs, ys, height)
    best = np.full(pts.shape[:2], -np.inf)
    for cell in chosen:
        best = np.maximum(best, np.asarray(path_gain(cell, pts, link)))
    return PathGainGrid(
        height=float(height),
        origin=(float(xs[0]) if len(xs) else float(bounds[0]),
                float(ys[0]) if len(ys) else float(bounds[1])),
        nx=len(xs),
        ny=len(ys),
        resolution=float(resolution),
        max_path_gain=best,
    )


def _fmt(v: float) -> str:
    return format(v, ".9g")


def write_grid_csv(grid: CoverageGrid, path) -> None:
    """Grid CSV contract: header ``x_m,y_m,best_cell,rss_dbm``, row-major
    with the y loop outermost and ascending; best_cell empty when
    uncovered, rss empty when no cell was eligible."""
    xs, ys = grid.xs, grid.ys
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x_m", "y_m", "best_cell", "rss_dbm"])
        for j, y in enumerate(ys):
            for i, x in enumerate(xs):
                cid = grid.best_cell[j, i]
                r = grid.best_rss[j, i]
                w.writerow([
                    _fmt(x),
                    _fmt(y),
                    "" if cid == UNCOVERED else int(cid),
                    "" if np.isnan(r) else _fmt(r),
                ])


def grid_metadata(grid: CoverageGrid, link: LinkBudgetConfig) -> dict:
    return {
        "height_m": grid.height,
        "origin_m": [grid.origin[0], grid.origin[1]],
        "nx": grid.nx,
        "ny": grid.ny,
        "resolution_m": grid.resolution,
        "noise_floor_dbm": link.noise_floor_dbm,
        "covered_points": int(np.count_nonzero(grid.covered)),
        "total_points": int(grid.best_cell.size),
    }
