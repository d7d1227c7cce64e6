import numpy as np
import pytest

from aircov.antenna import AntennaConfig
from aircov.coverage import (
    CoverageGrid,
    best_server_grid,
    bcs_filtered_grid,
    fragmentation,
    path_gain_grid,
    write_grid_csv,
)
from aircov.errors import InvalidParameterError, NotFoundError
from aircov.geometry import Point3
from aircov.network import AerialCoverageGroup, Cell, CellPair, Network
from aircov.propagation import LinkBudgetConfig

from conftest import G1_PAIRS


def small_net(n_cells=1, antenna=None, spacing=400.0):
    ant = antenna or AntennaConfig()
    cells = tuple(
        Cell(i + 1, i, Point3(spacing * i, 0, 75), 90.0, ant) for i in range(n_cells)
    )
    return Network(cells=cells, isd=500.0)


BOUNDS = (-1000.0, -1000.0, 1000.0, 1000.0)


def test_single_cell_grid_serves_everything_covered():
    net = small_net(1)
    grid = best_server_grid(net, 300, BOUNDS, 50)
    assert set(np.unique(grid.best_cell[grid.covered])) == {1}
    assert grid.covered.any()


def test_colocated_cells_tie_break_to_lower_id():
    ant = AntennaConfig()
    cells = (
        Cell(4, 0, Point3(0, 0, 75), 90.0, ant),
        Cell(9, 1, Point3(0, 0, 75), 90.0, ant),
    )
    net = Network(cells=cells, isd=500.0)
    grid = best_server_grid(net, 300, BOUNDS, 50)
    assert set(np.unique(grid.best_cell[grid.covered])) == {4}


def test_grid_geometry_and_axes():
    net = small_net(1)
    grid = best_server_grid(net, 300, (0, 0, 100, 50), 25)
    assert (grid.nx, grid.ny) == (5, 3)
    assert grid.xs.tolist() == [0, 25, 50, 75, 100]
    assert grid.ys.tolist() == [0, 25, 50]


def test_empty_bounds_give_empty_grid():
    net = small_net(1)
    grid = path_gain_grid(net, {1}, 300, (0, 0, -100, -100), 10)
    assert grid.max_path_gain.size == 0


def test_empty_filter_rejected():
    net = small_net(2)
    with pytest.raises(InvalidParameterError):
        best_server_grid(net, 300, BOUNDS, 100, cell_filter=set())


def test_unknown_filter_cell_rejected():
    net = small_net(2)
    with pytest.raises(NotFoundError):
        best_server_grid(net, 300, BOUNDS, 100, cell_filter={77})


def test_filter_monotonicity():
    """Adding a cell to the filter never decreases best_rss anywhere."""
    net = small_net(4)
    rng = np.random.default_rng(3)
    for _ in range(6):
        subset = set(rng.choice([1, 2, 3, 4], size=2, replace=False).tolist())
        extra = rng.choice(sorted({1, 2, 3, 4} - subset))
        g_small = best_server_grid(net, 300, BOUNDS, 100, cell_filter=subset)
        g_big = best_server_grid(net, 300, BOUNDS, 100,
                                 cell_filter=subset | {int(extra)})
        assert np.all(g_big.best_rss >= g_small.best_rss - 1e-12)


def test_determinism_and_order_independence():
    net = small_net(3)
    a = best_server_grid(net, 300, BOUNDS, 100)
    b = best_server_grid(net, 300, BOUNDS, 100)
    assert np.array_equal(a.best_cell, b.best_cell)
    assert np.array_equal(a.best_rss, b.best_rss)


def test_fragmentation_uniform_grid():
    best_cell = np.full((10, 10), 3)
    grid = CoverageGrid(300.0, (0.0, 0.0), 10, 10, 10.0, best_cell,
                        np.full((10, 10), -60.0))
    report = fragmentation(grid)
    assert report.total_components == 1
    assert report.per_cell_components == {3: 1}
    assert report.covered_fraction == 1.0


def test_fragmentation_checkerboard():
    n = 8
    best_cell = np.fromfunction(lambda j, i: ((i + j) % 2) + 1, (n, n), dtype=int)
    grid = CoverageGrid(300.0, (0.0, 0.0), n, n, 10.0, best_cell,
                        np.full((n, n), -60.0))
    report = fragmentation(grid)
    # 4-connectivity: every square is its own component
    assert report.total_components == n * n
    assert report.per_cell_components[1] == n * n // 2


def test_fragmentation_excludes_uncovered():
    best_cell = np.full((6, 6), -1)
    best_cell[2:4, 2:4] = 5
    grid = CoverageGrid(300.0, (0.0, 0.0), 6, 6, 10.0, best_cell,
                        np.full((6, 6), -130.0))
    report = fragmentation(grid)
    assert report.total_components == 1
    assert report.covered_fraction == pytest.approx(4 / 36)


def test_bcs_filtered_grid_requires_group_and_height(grouped_network):
    empty = AerialCoverageGroup("none", ())
    with pytest.raises(InvalidParameterError):
        bcs_filtered_grid(grouped_network, empty, 300, BOUNDS, 100)
    with pytest.raises(InvalidParameterError):
        bcs_filtered_grid(grouped_network, grouped_network.group("g1"), 200,
                          BOUNDS, 100)


def test_bcs_filtered_single_pair_inside_both_mainlobes():
    """Where both cells of the only pair are audible, the aerial cell serves."""
    ant = AntennaConfig(model="cone")
    cells = (
        Cell(1, 0, Point3(0, 0, 75), 90.0, ant),
        Cell(2, 1, Point3(500, 0, 75), 90.0, ant),
    )
    net = Network(
        cells=cells,
        groups=(AerialCoverageGroup("g", (CellPair(1, 2),)),),
        isd=500.0,
    )
    grid = bcs_filtered_grid(net, net.group("g"), 300, (0, 1200, 500, 2000), 20)
    assert set(np.unique(grid.best_cell[grid.covered])) == {1}
    assert grid.covered.any()


def test_bcs_filtered_uncovered_where_indication_cell_silent():
    """A point hearing only the aerial cell stays uncovered in the filtered
    map even though the raw best-server map covers it."""
    ant = AntennaConfig(model="cone")
    cells = (
        Cell(1, 0, Point3(0, 0, 75), 90.0, ant),
        Cell(2, 1, Point3(0, 500, 75), 90.0, ant),
    )
    net = Network(
        cells=cells,
        groups=(AerialCoverageGroup("g", (CellPair(1, 2),)),),
        isd=500.0,
    )
    # band where cell 1's mainlobe reaches but cell 2's (starting 500 m
    # further along the boresight) does not
    window = (-50.0, 900.0, 50.0, 1200.0)
    raw = best_server_grid(net, 300, window, 10, cell_filter={1})
    filt = bcs_filtered_grid(net, net.group("g"), 300, window, 10)
    sliver = raw.covered & ~filt.covered
    assert sliver.any()
    # and the filtered coverage never exceeds the unfiltered one
    both = best_server_grid(net, 300, window, 10)
    assert not (filt.covered & ~both.covered).any()


def test_group2_cells_cover_less_area_each_than_group1(grouped_network):
    """Six aerial cells split the same sky into smaller per-cell regions
    than three do."""
    bounds = (-1500.0, -1500.0, 1500.0, 1500.0)
    g1 = bcs_filtered_grid(grouped_network, grouped_network.group("g1"), 300,
                           bounds, 20)
    g2 = bcs_filtered_grid(grouped_network, grouped_network.group("g2"), 300,
                           bounds, 20)

    def mean_region_area(grid):
        ids, counts = np.unique(grid.best_cell[grid.covered], return_counts=True)
        return counts.mean()

    assert mean_region_area(g2) < mean_region_area(g1)


def test_three_cell_filter_reproduces_three_regions(grouped_network):
    aerial = sorted(p.aerial_coverage_cell for p in G1_PAIRS)
    grid = best_server_grid(grouped_network, 300,
                            (-800, -800, 800, 800), 20,
                            cell_filter=set(aerial))
    winners = set(np.unique(grid.best_cell[grid.covered]).tolist())
    assert winners == set(aerial)


def test_path_gain_grid_cone_model_regions():
    net = small_net(1, antenna=AntennaConfig(model="cone"))
    grid = path_gain_grid(net, {1}, 300, (-50, 800, 50, 2000), 10)
    ys = grid.origin[1] + grid.resolution * np.arange(grid.ny)
    beyond = grid.max_path_gain[ys > 900, :]
    assert np.all(np.isfinite(beyond)) and beyond.max() > -150
    # before the minimum range and outside the sidelobe cones: sentinel region
    before = path_gain_grid(net, {1}, 300, (-50, 650, 50, 750), 10)
    assert np.all(before.max_path_gain <= -300)


def test_path_gain_grid_unknown_cell(grouped_network):
    with pytest.raises(NotFoundError):
        path_gain_grid(grouped_network, {999}, 300, BOUNDS, 100)


def test_pair_sidelobe_contrast_via_path_gain_grid(grouped_network):
    """Two-cell pair with everything else inactive: the strongest signal near
    either site at the aerial height beats the mainlobe region by > 10 dB."""
    aerial = grouped_network.cell(49)
    indication = grouped_network.cell(46)
    cells = {49, 46}
    for site_cell in (aerial, indication):
        x0, y0 = site_cell.position.x, site_cell.position.y
        near = path_gain_grid(grouped_network, cells, 300,
                              (x0 - 300, y0 - 300, x0 + 300, y0 + 300), 10)
        # mainlobe region: along the pair boresight (north), 840-2000 m out
        far = path_gain_grid(grouped_network, cells, 300,
                             (x0 - 100, y0 + 840, x0 + 100, y0 + 2000), 10)
        assert near.max_path_gain.max() - far.max_path_gain.max() > 10.0


def test_grid_csv_format(tmp_path):
    net = small_net(1)
    grid = best_server_grid(net, 300, (0, 0, 20, 10), 10)
    out = tmp_path / "grid.csv"
    write_grid_csv(grid, out)
    lines = out.read_text().splitlines()
    assert lines[0] == "x_m,y_m,best_cell,rss_dbm"
    assert len(lines) == 1 + grid.nx * grid.ny
    # y is the outer loop, ascending
    first, second = lines[1].split(","), lines[2].split(",")
    assert first[1] == second[1]
    assert float(second[0]) > float(first[0])
