"""Parametric sector-antenna radiation model.

Two interchangeable backends share one config:

* ``array`` - a parabolic-in-dB sector element stacked into a uniform
  vertical array.  This is the physical model used for signal-strength
  simulation; with the default two-element, one-wavelength stack it has a
  strong upward grating lobe, which is what makes aerial coverage above
  the antenna height scattered in the first place.
* ``cone`` - an idealized model made of a mainlobe cone plus configurable
  upward sidelobe cones, constant gain inside each lobe and a -300 dBi
  sentinel outside.  This is the model the analytic geometry and the
  pair-validation rules reason about.

Angles are degrees; gains dB/dBi.  Positive electrical tilt steers the
pattern downwards, so the composite peak sits at elevation -tilt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError, UnmeasurableError
from .geometry import LobeCone, Point3, unit_from_az_el

__all__ = [
    "SidelobeSpec",
    "AntennaConfig",
    "PatternSample",
    "CONE_FLOOR_DBI",
    "element_gain",
    "array_factor",
    "composite_gain",
    "measure_hpbw",
    "cone_lobes",
]

# Substitute for -inf outside the cone model's lobes: keeps arithmetic
# total while never winning a best-server comparison.
CONE_FLOOR_DBI = -300.0


@dataclass(frozen=True)
class SidelobeSpec:
    """One idealized upward sidelobe cone of the cone backend."""

    elevation_deg: float
    apex_angle_deg: float
    offset_db: float


DEFAULT_SIDELOBES = (
    SidelobeSpec(25.0, 10.0, -8.0),
    SidelobeSpec(50.0, 10.0, -8.0),
)


@dataclass(frozen=True)
class AntennaConfig:
    model: str = "array"  # "array" | "cone"
    element_hpbw_az_deg: float = 120.0
    element_hpbw_el_deg: float = 180.0
    element_max_attenuation_db: float = 30.0
    n_vertical_elements: int = 2
    element_spacing_wl: float = 1.0
    electrical_tilt_deg: float = 0.0
    max_gain_dbi: float = 8.0
    carrier_frequency_hz: float = 3.5e9
    mainlobe_apex_angle_deg: float = 30.0
    sidelobes: tuple = field(default_factory=lambda: DEFAULT_SIDELOBES)

    def __post_init__(self):
        if self.model not in ("array", "cone"):
            raise InvalidParameterError(f"unknown antenna model {self.model!r}")
        for name in ("element_hpbw_az_deg", "element_hpbw_el_deg"):
            v = getattr(self, name)
            if not 0.0 < v <= 180.0:
                raise InvalidParameterError(f"{name} must be in (0, 180], got {v}")
        if self.n_vertical_elements < 1:
            raise InvalidParameterError("n_vertical_elements must be >= 1")
        if self.element_spacing_wl <= 0:
            raise InvalidParameterError("element_spacing_wl must be > 0")
        if not math.isfinite(self.max_gain_dbi):
            raise InvalidParameterError("max_gain_dbi must be finite")
        if self.carrier_frequency_hz <= 0:
            raise InvalidParameterError("carrier_frequency_hz must be > 0")
        object.__setattr__(self, "sidelobes", tuple(self.sidelobes))


@dataclass(frozen=True)
class PatternSample:
    azimuth_off: float
    elevation_off: float
    gain: float


def element_gain(azimuth_off, elevation_off, config: AntennaConfig):
    """Single-element gain relative to the element peak, dB (<= 0).

    Parabolic in dB in both planes with a front-to-back attenuation floor;
    -3 dB at half the half-power beamwidth by construction.
    """
    a = np.asarray(azimuth_off, dtype=float)
    e = np.asarray(elevation_off, dtype=float)
    att = 12.0 * (a / config.element_hpbw_az_deg) ** 2 + 12.0 * (
        e / config.element_hpbw_el_deg
    ) ** 2
    return -np.minimum(att, config.element_max_attenuation_db)


def array_factor(elevation_deg, n: int, spacing_wl: float, steer_deg: float):
    """Uniform-amplitude vertical array response in dB relative to its peak.

    Phase-steered so the response is 0 dB at ``elevation_deg == steer_deg``.
    """
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    el = np.radians(np.asarray(elevation_deg, dtype=float))
    delta = np.sin(el) - math.sin(math.radians(steer_deg))
    k = np.arange(n)
    phase = 2.0 * math.pi * spacing_wl * delta[..., None] * k
    mag = np.abs(np.exp(1j * phase).sum(axis=-1)) / n
    return 20.0 * np.log10(np.maximum(mag, 1e-300))


def _direction_in_cone(dir_az, dir_el, axis_az, axis_el, apex_full_angle):
    u = unit_from_az_el(dir_az, dir_el)
    axis = unit_from_az_el(axis_az, axis_el)
    cos_half = math.cos(math.radians(apex_full_angle / 2.0))
    return u @ axis >= cos_half


def composite_gain(direction_azimuth, direction_elevation, cell_boresight_azimuth,
                   config: AntennaConfig):
    """Full antenna gain in dBi toward the given direction(s).

    Array model: max gain + element pattern + array factor, offsets taken
    relative to the boresight azimuth and the tilt-steered elevation.
    Cone model: max gain inside the mainlobe cone, offset gain inside any
    sidelobe cone, the -300 dBi sentinel elsewhere.
    """
    steer_el = -config.electrical_tilt_deg
    if config.model == "array":
        az_off = (
            np.asarray(direction_azimuth, dtype=float) - cell_boresight_azimuth + 180.0
        ) % 360.0 - 180.0
        el_off = np.asarray(direction_elevation, dtype=float) - steer_el
        g = (
            config.max_gain_dbi
            + element_gain(az_off, el_off, config)
            + array_factor(direction_elevation, config.n_vertical_elements,
                           config.element_spacing_wl, steer_el)
        )
        return g if g.shape else float(g)

    az = np.asarray(direction_azimuth, dtype=float)
    el = np.asarray(direction_elevation, dtype=float)
    gain = np.full(np.broadcast(az, el).shape, CONE_FLOOR_DBI)
    for sl in reversed(config.sidelobes):
        inside = _direction_in_cone(az, el, cell_boresight_azimuth,
                                    sl.elevation_deg + steer_el, sl.apex_angle_deg)
        gain = np.where(inside, config.max_gain_dbi + sl.offset_db, gain)
    main = _direction_in_cone(az, el, cell_boresight_azimuth, steer_el,
                              config.mainlobe_apex_angle_deg)
    gain = np.where(main, config.max_gain_dbi, gain)
    return gain if gain.shape else float(gain)


def measure_hpbw(config: AntennaConfig, plane: str) -> float:
    """Numerically measured -3 dB full width of the composite pattern.

    Scans the requested principal plane at 0.01 degree resolution around the
    global peak.  The cone model defines its HPBW as the mainlobe cone angle.
    """
    if plane not in ("azimuth", "elevation"):
        raise InvalidParameterError(f"plane must be azimuth or elevation, got {plane!r}")
    if config.model == "cone":
        return float(config.mainlobe_apex_angle_deg)

    steer_el = -config.electrical_tilt_deg
    offsets = np.arange(-90.0, 90.0 + 1e-9, 0.01)
    if plane == "azimuth":
        gains = composite_gain(offsets, np.full_like(offsets, steer_el), 0.0, config)
    else:
        gains = composite_gain(np.zeros_like(offsets), steer_el + offsets, 0.0, config)
    gains = np.asarray(gains)
    peak_i = int(np.argmax(gains))
    peak = gains[peak_i]
    thresh = peak - 3.0

    def cross(direction):
        i = peak_i
        while 0 <= i + direction < len(offsets) and gains[i + direction] >= thresh:
            i += direction
        j = i + direction
        if j < 0 or j >= len(offsets):
            raise UnmeasurableError(
                f"no -3 dB crossing within +-90 degrees in the {plane} plane"
            )
        # linear interpolation between the last sample above and first below
        g0, g1 = gains[i], gains[j]
        frac = (g0 - thresh) / (g0 - g1)
        return offsets[i] + frac * (offsets[j] - offsets[i])

    return float(abs(cross(+1) - cross(-1)))


def cone_lobes(position: Point3, boresight_azimuth: float, config: AntennaConfig):
    """Cone-model lobes of an antenna as (kind, LobeCone) tuples.

    Used by the analytic geometry regardless of which gain backend the
    cell simulates with.
    """
    steer_el = -config.electrical_tilt_deg
    lobes = [
        (
            "mainlobe",
            LobeCone(position, boresight_azimuth, steer_el, config.mainlobe_apex_angle_deg),
        )
    ]
    for i, sl in enumerate(config.sidelobes):
        lobes.append(
            (
                f"sidelobe{i + 1}",
                LobeCone(position, boresight_azimuth, sl.elevation_deg + steer_el,
                         sl.apex_angle_deg),
            )
        )
    return lobes
