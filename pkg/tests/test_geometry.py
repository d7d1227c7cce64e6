import math
import random

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from aircov.errors import BelowConeError, InvalidParameterError
from aircov.geometry import (
    LobeCone,
    Point3,
    bcs_min_range,
    conic_points,
    conic_section,
    footprint_intervals,
    hex_layout,
)

# Frozen oracle values, computed with mpmath at 50 digits:
#   225/tan(15 deg), 300/tan(15 deg), 225*tan(15 deg)
MIN_RANGE_75_300 = 839.71143170299739
MIN_RANGE_0_300 = 1119.61524227066319
VERTICAL_CUT_RADIUS = 60.28856829700261


def test_hex_layout_single_site():
    sites = hex_layout(0, 500)
    assert len(sites) == 1
    assert sites[0] == Point3(0.0, 0.0, 0.0)


def test_hex_layout_one_ring():
    sites = hex_layout(1, 500)
    assert len(sites) == 7
    assert sites[0].x == 0.0 and sites[0].y == 0.0
    for s in sites[1:]:
        assert math.hypot(s.x, s.y) == pytest.approx(500.0, abs=1e-9)


def test_hex_layout_two_rings_site_count():
    assert len(hex_layout(2, 500)) == 19


@pytest.mark.parametrize("rings", [1, 2, 3])
def test_hex_layout_min_pairwise_distance_is_isd(rings):
    sites = hex_layout(rings, 500)
    dmin = min(
        math.hypot(a.x - b.x, a.y - b.y)
        for i, a in enumerate(sites)
        for b in sites[i + 1:]
    )
    assert dmin == pytest.approx(500.0, abs=1e-9)


def test_hex_layout_rejects_bad_isd():
    with pytest.raises(InvalidParameterError):
        hex_layout(2, 0.0)
    with pytest.raises(InvalidParameterError):
        hex_layout(-1, 500.0)


def test_bcs_min_range_values():
    assert bcs_min_range(75, 300, 30) == pytest.approx(MIN_RANGE_75_300, abs=1e-6)
    assert bcs_min_range(300, 300, 30) == 0.0
    assert bcs_min_range(0, 300, 30) == pytest.approx(MIN_RANGE_0_300, abs=1e-6)


def test_bcs_min_range_below_cone():
    with pytest.raises(BelowConeError):
        bcs_min_range(75, 50, 30)
    with pytest.raises(InvalidParameterError):
        bcs_min_range(75, 300, 0)
    with pytest.raises(InvalidParameterError):
        bcs_min_range(75, 300, 180)


def test_bcs_min_range_monotonicity():
    heights = [100, 200, 300, 500, 1000]
    values = [bcs_min_range(75, h, 30) for h in heights]
    assert all(b > a for a, b in zip(values, values[1:]))
    angles = [10, 20, 30, 60, 120, 179]
    values = [bcs_min_range(75, 300, a) for a in angles]
    assert all(b < a for a, b in zip(values, values[1:]))


def _horizontal_mainlobe():
    return LobeCone(Point3(0, 0, 75), axis_azimuth=0, axis_elevation=0,
                    apex_full_angle=30)


def test_conic_section_horizontal_cone_is_hyperbola():
    cs = conic_section(_horizontal_mainlobe(), 300)
    assert cs.kind == "hyperbola"
    assert cs.apex_range == pytest.approx(MIN_RANGE_75_300, abs=1e-6)
    assert cs.apex_range == pytest.approx(bcs_min_range(75, 300, 30), abs=1e-9)


def test_conic_section_vertical_cone_is_circle():
    cone = LobeCone(Point3(0, 0, 75), 0, 90, 30)
    cs = conic_section(cone, 300)
    assert cs.kind == "ellipse"
    assert cs.apex_range == pytest.approx(VERTICAL_CUT_RADIUS, abs=1e-6)
    pts = conic_points(cone, 300, 720)
    radii = np.hypot(pts[:, 0], pts[:, 1])
    assert radii == pytest.approx(VERTICAL_CUT_RADIUS, abs=1e-6)


def test_conic_section_through_apex_degenerates_to_point():
    cs = conic_section(_horizontal_mainlobe(), 75)
    assert cs.kind == "degenerate-point"
    assert cs.apex_range == 0.0


def test_conic_section_empty_when_cone_points_down():
    cone = LobeCone(Point3(0, 0, 75), 0, -45, 30)
    assert conic_section(cone, 300).kind == "degenerate-empty"


def test_conic_section_parabola_when_upper_generator_is_tangent():
    # axis elevation equal to the half angle puts one generator in the plane
    cone = LobeCone(Point3(0, 0, 75), 0, 15, 30)
    assert conic_section(cone, 300).kind == "parabola"


def test_conic_section_tilted_cone_is_ellipse():
    cone = LobeCone(Point3(0, 0, 75), 40, 45, 30)
    cs = conic_section(cone, 300)
    assert cs.kind == "ellipse"
    # closest-generator elevation is 45 + 15 deg
    assert cs.apex_range == pytest.approx(225 / math.tan(math.radians(60)), abs=1e-9)


def _random_cone(rng):
    return LobeCone(
        Point3(rng.uniform(-500, 500), rng.uniform(-500, 500), rng.uniform(0, 120)),
        axis_azimuth=rng.uniform(0, 360),
        axis_elevation=rng.uniform(-80, 80),
        apex_full_angle=rng.uniform(5, 120),
    )


@pytest.mark.parametrize("seed", range(8))
def test_conic_points_lie_on_cone_boundary(seed):
    rng = random.Random(seed)
    cone = _random_cone(rng)
    for h in (200, 300, 500):
        pts = conic_points(cone, h, 360)
        if len(pts) == 0:
            continue
        w = pts - cone.apex.as_array()
        norm = np.linalg.norm(w, axis=1)
        cosang = (w @ cone.axis) / norm
        assert cosang == pytest.approx(
            math.cos(math.radians(cone.apex_full_angle / 2)), rel=1e-6
        )
        # the same points satisfy the implicit quadratic
        cs = conic_section(cone, h)
        a, b, c, d, e, f = cs.coefficients
        u, v = pts[:, 0], pts[:, 1]
        res = a * u * u + b * u * v + c * v * v + d * u + e * v + f
        scale = np.abs([a * u * u, b * u * v, c * v * v, d * u, e * v,
                        np.full_like(u, f)]).sum(axis=0)
        assert np.all(np.abs(res) <= 1e-6 * np.maximum(scale, 1.0))


@pytest.mark.parametrize("seed", range(8))
def test_apex_range_matches_numeric_minimum(seed):
    rng = random.Random(100 + seed)
    cone = _random_cone(rng)
    h = 300.0
    cs = conic_section(cone, h)
    if cs.kind in ("degenerate-empty", "degenerate-point"):
        return
    dh = h - cone.apex.z
    d = cone.axis
    if abs(d[2]) > 1 - 1e-12:
        e1 = np.array([1.0, 0.0, 0.0])
    else:
        e1 = np.cross([0, 0, 1], d)
        e1 /= np.linalg.norm(e1)
    e2 = np.cross(d, e1)
    half = math.radians(cone.apex_full_angle / 2)

    def horiz_dist(psi):
        u = math.cos(half) * d + math.sin(half) * (math.cos(psi) * e1 + math.sin(psi) * e2)
        if u[2] * dh <= 0:
            return math.inf
        t = dh / u[2]
        return t * math.hypot(u[0], u[1])

    psis = np.linspace(0, 2 * math.pi, 3600, endpoint=False)
    vals = np.array([horiz_dist(p) for p in psis])
    i = int(np.argmin(vals))
    res = minimize_scalar(
        horiz_dist,
        bounds=(psis[i] - 0.01, psis[i] + 0.01),
        method="bounded",
        options={"xatol": 1e-12},
    )
    assert cs.apex_range == pytest.approx(min(res.fun, vals[i]), abs=1e-6)


def test_footprint_single_mainlobe_boundary_is_min_range():
    cone = _horizontal_mainlobe()
    fp = footprint_intervals([(1, "mainlobe", cone)], 300, 0, 5000)
    assert len(fp.intervals) == 2
    (s0, e0, l0), (s1, e1, l1) = fp.intervals
    assert (s0, l0) == (0.0, frozenset())
    assert e0 == pytest.approx(MIN_RANGE_75_300, abs=1e-6)
    assert s1 == e0 and e1 == 5000.0
    assert l1 == frozenset({(1, "mainlobe")})


def test_footprint_empty_lobe_list():
    fp = footprint_intervals([], 300, 45, 1000)
    assert fp.intervals == ((0.0, 1000.0, frozenset()),)


def test_footprint_two_identical_cones_share_labels():
    cone = _horizontal_mainlobe()
    fp = footprint_intervals(
        [(1, "mainlobe", cone), (2, "mainlobe", cone)], 300, 0, 5000
    )
    assert len(fp.intervals) == 2
    assert fp.intervals[1][2] == frozenset({(1, "mainlobe"), (2, "mainlobe")})


def test_footprint_rejects_bad_max_range():
    with pytest.raises(InvalidParameterError):
        footprint_intervals([], 300, 0, 0)


def test_footprint_first_boundary_matches_min_range_along_boresight():
    for apex_angle in (10, 30, 60):
        cone = LobeCone(Point3(0, 0, 75), 0, 0, apex_angle)
        fp = footprint_intervals([(1, "mainlobe", cone)], 300, 0, 50000)
        first = next(s for s, _, labels in fp.intervals if labels)
        assert first == pytest.approx(bcs_min_range(75, 300, apex_angle), abs=1e-6)


@pytest.mark.parametrize("seed", range(20))
def test_footprint_intervals_match_brute_force_sampling(seed):
    """Analytic breakpoints against direct membership at 0.1 m resolution."""
    rng = random.Random(1000 + seed)
    cones = []
    for i in range(rng.randint(1, 4)):
        kind = rng.choice(["mainlobe", "sidelobe1", "sidelobe2"])
        cones.append((i + 1, kind, _random_cone(rng)))
    height = rng.uniform(150, 400)
    azimuth = rng.uniform(0, 360)
    origin = (rng.uniform(-200, 200), rng.uniform(-200, 200))
    max_range = 3000.0
    fp = footprint_intervals(cones, height, azimuth, max_range, origin=origin)

    # structural invariants
    assert fp.intervals[0][0] == 0.0
    assert fp.intervals[-1][1] == max_range
    for (_, e_prev, l_prev), (s_next, _, l_next) in zip(fp.intervals, fp.intervals[1:]):
        assert e_prev == s_next
        assert l_prev != l_next

    az = math.radians(azimuth)
    v = np.array([math.cos(az), math.sin(az), 0.0])
    ts = np.arange(0.05, max_range, 0.1)
    pts = np.array([origin[0], origin[1], height]) + ts[:, None] * v
    expected = [frozenset() for _ in ts]
    for cid, kind, cone in cones:
        inside = cone.contains(pts)
        for j in np.flatnonzero(inside):
            expected[j] = expected[j] | {(cid, kind)}
    for t, exp in zip(ts, expected):
        assert fp.labels_at(t) == exp, f"mismatch at range {t}"
