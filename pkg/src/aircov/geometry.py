"""Hexagonal layout and cone/plane analytic geometry.

Conventions used across the package:

* Coordinates are flat-earth Cartesian metres: x east, y north, z height
  above ground.
* Azimuth is measured in degrees from east, counterclockwise, stored in
  [0, 360).  Elevation is degrees above the horizon in [-90, +90].
* Cone membership is closed: a point whose direction from the apex makes
  exactly the half apex angle with the axis counts as inside.  Closed
  coverage sets keep interval partitions well defined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BelowConeError, InvalidParameterError

__all__ = [
    "Point3",
    "LobeCone",
    "ConicSection",
    "FootprintIntervals",
    "hex_layout",
    "bcs_min_range",
    "conic_section",
    "conic_points",
    "footprint_intervals",
    "wrap_azimuth",
    "wrap_half",
    "circular_diff",
    "unit_from_az_el",
]

_QUAD_EPS = 1e-12


def wrap_azimuth(deg: float) -> float:
    """Normalize an angle to [0, 360)."""
    return float(deg) % 360.0


def wrap_half(deg: float) -> float:
    """Normalize an angle to (-180, 180]."""
    a = float(deg) % 360.0
    if a > 180.0:
        a -= 360.0
    return a


def circular_diff(a: float, b: float) -> float:
    """Absolute circular difference between two azimuths, in [0, 180]."""
    return abs(wrap_half(a - b))


def unit_from_az_el(azimuth_deg, elevation_deg):
    """Unit direction vector(s) for azimuth/elevation in degrees."""
    az = np.radians(azimuth_deg)
    el = np.radians(elevation_deg)
    return np.stack(
        [np.cos(el) * np.cos(az), np.cos(el) * np.sin(az), np.sin(el)], axis=-1
    )


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class LobeCone:
    """A circular cone modelling one antenna lobe.

    ``apex_full_angle`` is the full opening angle; a point is inside when
    the angle between (point - apex) and the axis is at most half of it.
    Negative ``axis_elevation`` means downtilt.
    """

    apex: Point3
    axis_azimuth: float
    axis_elevation: float
    apex_full_angle: float

    def __post_init__(self):
        if not 0.0 < self.apex_full_angle < 180.0:
            raise InvalidParameterError(
                f"apex_full_angle must be in (0, 180), got {self.apex_full_angle}"
            )
        if not -90.0 <= self.axis_elevation <= 90.0:
            raise InvalidParameterError(
                f"axis_elevation must be in [-90, 90], got {self.axis_elevation}"
            )
        object.__setattr__(self, "axis_azimuth", wrap_azimuth(self.axis_azimuth))

    @property
    def axis(self) -> np.ndarray:
        return unit_from_az_el(self.axis_azimuth, self.axis_elevation)

    def contains(self, points) -> np.ndarray:
        """Closed membership test for an (..., 3) array of points."""
        p = np.asarray(points, dtype=float)
        w = p - self.apex.as_array()
        norm = np.linalg.norm(w, axis=-1)
        cos_half = math.cos(math.radians(self.apex_full_angle / 2.0))
        dot = w @ self.axis
        return (dot >= norm * cos_half) | (norm == 0.0)


@dataclass(frozen=True)
class ConicSection:
    """Intersection of a lobe cone with a horizontal plane.

    ``coefficients`` holds (A, B, C, D, E, F) of the implicit quadratic
    A u^2 + B u v + C v^2 + D u + E v + F = 0 in world (x, y) coordinates
    on the cut plane.  ``apex_range`` is the minimum horizontal distance
    from the antenna's vertical axis to the curve.
    """

    kind: str  # ellipse | parabola | hyperbola | degenerate-empty | degenerate-point
    apex_range: float
    coefficients: tuple[float, float, float, float, float, float]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "apex_range": self.apex_range,
            "coefficients": list(self.coefficients),
        }


@dataclass(frozen=True)
class FootprintIntervals:
    """Partition of a horizontal ray into maximal equally-labelled intervals.

    Each interval is (start_range, end_range, labels) where labels is a
    frozenset of (cell_id, lobe_kind) tuples covering every point of the
    interval.  Intervals are sorted, disjoint and cover [0, max_range).
    """

    height: float
    azimuth_ray: float
    max_range: float
    intervals: tuple

    def labels_at(self, r: float):
        for s, e, labels in self.intervals:
            if s <= r < e:
                return labels
        return None

    def to_dict(self) -> dict:
        return {
            "height": self.height,
            "azimuth_ray": self.azimuth_ray,
            "max_range": self.max_range,
            "intervals": [
                {
                    "start_range": s,
                    "end_range": e,
                    "labels": sorted([list(l) for l in labels]),
                }
                for s, e, labels in self.intervals
            ],
        }


def hex_layout(rings: int, isd: float) -> list[Point3]:
    """Site positions of a hexagonal grid: a center site plus ``rings``
    concentric rings, nearest neighbors exactly ``isd`` apart.

    Sites are ordered by ring and then by angle from east, center first.
    """
    if isd <= 0:
        raise InvalidParameterError(f"isd must be positive, got {isd}")
    if rings < 0:
        raise InvalidParameterError(f"rings must be >= 0, got {rings}")
    ax = (isd, 0.0)
    bx = (isd / 2.0, isd * math.sqrt(3.0) / 2.0)
    sites = []
    for q in range(-rings, rings + 1):
        for r in range(max(-rings, -q - rings), min(rings, -q + rings) + 1):
            x = q * ax[0] + r * bx[0]
            y = q * ax[1] + r * bx[1]
            ring = max(abs(q), abs(r), abs(q + r))
            ang = math.atan2(y, x) % (2.0 * math.pi) if ring else 0.0
            sites.append((ring, ang, x, y))
    sites.sort()
    return [Point3(x, y, 0.0) for _, _, x, y in sites]


def bcs_min_range(antenna_height: float, target_height: float, apex_full_angle: float) -> float:
    """Minimum horizontal range of beyond-conic-section mainlobe coverage
    for an untilted cone: (target_height - antenna_height) / tan(half angle).
    """
    if not 0.0 < apex_full_angle < 180.0:
        raise InvalidParameterError(
            f"apex_full_angle must be in (0, 180), got {apex_full_angle}"
        )
    if target_height < antenna_height:
        raise BelowConeError(
            f"target height {target_height} m is below the antenna at "
            f"{antenna_height} m; the plane cuts the mainlobe cone itself"
        )
    return (target_height - antenna_height) / math.tan(math.radians(apex_full_angle / 2.0))


def _implicit_coefficients(cone: LobeCone, cut_height: float):
    dx, dy, dz = cone.axis
    ax, ay = cone.apex.x, cone.apex.y
    wz = cut_height - cone.apex.z
    c2 = math.cos(math.radians(cone.apex_full_angle / 2.0)) ** 2
    k = -dx * ax - dy * ay + dz * wz
    a = dx * dx - c2
    b = 2.0 * dx * dy
    cc = dy * dy - c2
    d = 2.0 * dx * k + 2.0 * c2 * ax
    e = 2.0 * dy * k + 2.0 * c2 * ay
    f = k * k - c2 * (ax * ax + ay * ay + wz * wz)
    return (a, b, cc, d, e, f)


def _max_reach_elevation(axis_elevation: float, half_angle: float) -> float:
    """Highest elevation over all directions on the cone boundary, degrees."""
    return 90.0 - abs(90.0 - axis_elevation - half_angle)


def conic_section(cone: LobeCone, cut_height: float) -> ConicSection:
    """Classify and parameterize the cone / horizontal-plane intersection.

    Only the forward nappe of the cone is considered when deciding whether
    the intersection exists; the implicit coefficients describe the full
    quadric.  A plane through the apex is reported as degenerate-point.
    """
    coeff = _implicit_coefficients(cone, cut_height)
    dh = cut_height - cone.apex.z
    half = cone.apex_full_angle / 2.0

    if dh == 0.0:
        return ConicSection("degenerate-point", 0.0, coeff)

    el = cone.axis_elevation if dh > 0 else -cone.axis_elevation
    reach = _max_reach_elevation(el, half)
    if reach <= 0.0:
        return ConicSection("degenerate-empty", math.inf, coeff)

    if reach >= 90.0:
        apex_range = 0.0
    else:
        apex_range = abs(dh) / math.tan(math.radians(reach))

    a, b, cc = coeff[0], coeff[1], coeff[2]
    disc = b * b - 4.0 * a * cc
    scale = max(a * a, b * b, cc * cc, 1e-300)
    if abs(disc) <= 1e-9 * scale:
        kind = "parabola"
    elif disc > 0:
        kind = "hyperbola"
    else:
        kind = "ellipse"
    return ConicSection(kind, apex_range, coeff)


def conic_points(cone: LobeCone, cut_height: float, n: int = 360) -> np.ndarray:
    """Sample points of the forward-nappe intersection curve, shape (m, 3).

    Points are generated on exact boundary generators of the cone, so they
    satisfy the cone membership equation by construction.  Returns an empty
    array when the plane misses the forward nappe, and the apex itself when
    the plane passes through it.
    """
    dh = cut_height - cone.apex.z
    apex = cone.apex.as_array()
    if dh == 0.0:
        return apex.reshape(1, 3)
    d = cone.axis
    if abs(d[2]) > 1.0 - 1e-12:
        e1 = np.array([1.0, 0.0, 0.0])
    else:
        e1 = np.cross([0.0, 0.0, 1.0], d)
        e1 /= np.linalg.norm(e1)
    e2 = np.cross(d, e1)
    half = math.radians(cone.apex_full_angle / 2.0)
    psi = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    dirs = (
        math.cos(half) * d[None, :]
        + math.sin(half)
        * (np.cos(psi)[:, None] * e1[None, :] + np.sin(psi)[:, None] * e2[None, :])
    )
    uz = dirs[:, 2]
    t = np.full(n, np.nan)
    ok = uz * dh > 0
    t[ok] = dh / uz[ok]
    pts = apex[None, :] + t[:, None] * dirs
    return pts[ok]


def _quadratic_ge_zero(qa: float, qb: float, qc: float):
    """Solution of qa t^2 + qb t + qc >= 0 as a list of (lo, hi) intervals."""
    inf = math.inf
    if abs(qa) <= _QUAD_EPS:
        if abs(qb) <= _QUAD_EPS:
            return [(-inf, inf)] if qc >= 0 else []
        t0 = -qc / qb
        return [(t0, inf)] if qb > 0 else [(-inf, t0)]
    disc = qb * qb - 4.0 * qa * qc
    if disc <= 0:
        # no sign change; tangency contributes measure zero
        return [(-inf, inf)] if qa > 0 else []
    sq = math.sqrt(disc)
    r1 = (-qb - sq) / (2.0 * qa)
    r2 = (-qb + sq) / (2.0 * qa)
    if r1 > r2:
        r1, r2 = r2, r1
    if qa > 0:
        return [(-inf, r1), (r2, inf)]
    return [(r1, r2)]


def _cone_ray_intervals(cone: LobeCone, origin_xy, height: float, azimuth: float):
    """Ranges t >= 0 along the horizontal ray where the point is inside the
    (solid, closed) cone."""
    az = math.radians(azimuth)
    v = np.array([math.cos(az), math.sin(az), 0.0])
    apex = cone.apex.as_array()
    m = np.array([origin_xy[0] - apex[0], origin_xy[1] - apex[1], height - apex[2]])
    d = cone.axis
    c2 = math.cos(math.radians(cone.apex_full_angle / 2.0)) ** 2
    md = float(m @ d)
    vd = float(v @ d)
    mv = float(m @ v)
    mm = float(m @ m)

    qa = vd * vd - c2
    qb = 2.0 * (md * vd - c2 * mv)
    qc = md * md - c2 * mm
    pieces = _quadratic_ge_zero(qa, qb, qc)

    # forward-nappe halfplane: (m + t v) . d >= 0
    if abs(vd) <= _QUAD_EPS:
        if md < 0:
            return []
        half = (-math.inf, math.inf)
    elif vd > 0:
        half = (-md / vd, math.inf)
    else:
        half = (-math.inf, -md / vd)

    out = []
    for lo, hi in pieces:
        lo = max(lo, half[0], 0.0)
        hi = min(hi, half[1])
        if hi > lo:
            out.append((lo, hi))
    return out


def footprint_intervals(
    pair_lobes,
    height: float,
    azimuth_ray: float,
    max_range: float,
    origin=(0.0, 0.0),
) -> FootprintIntervals:
    """Partition a horizontal ray into maximal intervals labelled by the set
    of lobes covering each point.

    ``pair_lobes`` is an iterable of (cell_id, lobe_kind, LobeCone).  Ranges
    are measured from ``origin`` at the given height along ``azimuth_ray``.
    Breakpoints come from analytic quadratic root-finding per cone, not from
    sampling.  Zero-width tangencies are dropped.
    """
    if max_range <= 0:
        raise InvalidParameterError(f"max_range must be positive, got {max_range}")

    per_lobe = []
    cuts = {0.0, float(max_range)}
    for cell_id, kind, cone in pair_lobes:
        spans = []
        for lo, hi in _cone_ray_intervals(cone, origin, height, azimuth_ray):
            lo = max(lo, 0.0)
            hi = min(hi, float(max_range))
            if hi > lo:
                spans.append((lo, hi))
                cuts.add(lo)
                cuts.add(hi)
        per_lobe.append(((cell_id, kind), spans))

    breaks = sorted(cuts)
    intervals = []
    for s, e in zip(breaks[:-1], breaks[1:]):
        if e <= s:
            continue
        mid = 0.5 * (s + e)
        labels = frozenset(
            label
            for label, spans in per_lobe
            if any(lo <= mid <= hi for lo, hi in spans)
        )
        if intervals and intervals[-1][2] == labels:
            prev = intervals.pop()
            intervals.append((prev[0], e, labels))
        else:
            intervals.append((s, e, labels))
    return FootprintIntervals(
        height=float(height),
        azimuth_ray=wrap_azimuth(azimuth_ray),
        max_range=float(max_range),
        intervals=tuple(intervals),
    )
