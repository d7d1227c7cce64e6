"""Pure line-of-sight link budget: Friis path loss, path gain and RSS.

Deterministic by design: no shadowing, no fading, no NLOS statistics.
At the heights this simulator cares about, geometry and antenna patterns
dominate, and every metric downstream is a signal-strength comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .antenna import composite_gain
from .errors import InvalidParameterError

__all__ = ["LinkBudgetConfig", "FSPL_CONSTANT_DB", "fspl", "path_gain", "rss"]

# 20*log10(4*pi/c) for SI units, as used by the Friis formula below.
FSPL_CONSTANT_DB = -147.55


@dataclass(frozen=True)
class LinkBudgetConfig:
    tx_power_dbm: float = 44.0
    noise_floor_dbm: float = -120.0
    min_distance_m: float = 10.0

    def __post_init__(self):
        if self.min_distance_m <= 0:
            raise InvalidParameterError("min_distance_m must be > 0")


def fspl(distance_m, frequency_hz, min_distance_m: float = 10.0):
    """Free-space path loss in dB, distance clamped to the near-field limit."""
    if frequency_hz <= 0:
        raise InvalidParameterError("frequency_hz must be > 0")
    if min_distance_m <= 0:
        raise InvalidParameterError("min_distance_m must be > 0")
    d = np.maximum(np.asarray(distance_m, dtype=float), min_distance_m)
    out = 20.0 * np.log10(d) + 20.0 * np.log10(frequency_hz) + FSPL_CONSTANT_DB
    return out if out.shape else float(out)


def path_gain(cell, points, link: LinkBudgetConfig | None = None):
    """Antenna gain minus free-space loss from a cell to 3D point(s), dB.

    ``points`` is (..., 3) in metres; directions are taken from the antenna
    phase center (site x, y at the antenna height).
    """
    link = link or LinkBudgetConfig()
    p = np.asarray(points, dtype=float)
    delta = p - cell.position.as_array()
    horiz = np.hypot(delta[..., 0], delta[..., 1])
    dist = np.sqrt(horiz * horiz + delta[..., 2] ** 2)
    az = np.degrees(np.arctan2(delta[..., 1], delta[..., 0]))
    el = np.degrees(np.arctan2(delta[..., 2], horiz))
    gain = composite_gain(az, el, cell.boresight_azimuth, cell.antenna)
    out = gain - fspl(dist, cell.antenna.carrier_frequency_hz, link.min_distance_m)
    return out if np.ndim(out) else float(out)


def rss(cell, points, link: LinkBudgetConfig | None = None):
    """Received signal strength in dBm: per-cell transmit power plus path
    gain.  Values below the noise floor are returned exactly; flooring is a
    reporting concern for whoever builds measurement reports."""
    return cell.tx_power_dbm + path_gain(cell, points, link)
