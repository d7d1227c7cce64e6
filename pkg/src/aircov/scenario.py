"""Scenario file parsing, validation and canonical serialization.

The JSON schema is documented key by key in SCHEMA.md; that document is
normative.  Two rules keep golden-file testing honest:

* unknown keys are hard errors with the full JSON path, so a typo in an
  antenna parameter can never silently corrupt a run;
* numbers are canonicalized to at most 9 significant digits at parse
  time, and serialization emits sorted keys with default-valued fields
  omitted, so ``parse(serialize(s)) == s`` and canonical bytes are stable
  across runs.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .antenna import AntennaConfig, SidelobeSpec
from .errors import (
    InvalidParameterError,
    ScenarioSemanticError,
    ScenarioSyntaxError,
)
from .geometry import Point3, circular_diff
from .mobility import Trajectory, UeConfig
from .network import (
    ROLES,
    AerialCoverageGroup,
    Cell,
    CellPair,
    Network,
    build_standard_network,
)
from .policy import HandoverPolicy
from .propagation import LinkBudgetConfig

__all__ = [
    "GridRequest",
    "FlightRequest",
    "Scenario",
    "parse_scenario",
    "serialize_scenario",
    "scenario_hash",
]

_DEF_ANTENNA = AntennaConfig()
_DEF_LINK = LinkBudgetConfig()
_DEF_UE = UeConfig()
_DEF_PREDEFINED_HEIGHT = 300.0
_DEF_BOUNDS = (-2500.0, -2500.0, 2500.0, 2500.0)
_DEF_RESOLUTION = 10.0
_DEF_SAMPLE_INTERVAL = 0.01

_BORESIGHT_TOLERANCE = 15.0
_ADJACENCY_FACTOR = 1.1


def canon_float(v: float) -> float:
    """Round-trip a number through the canonical 9-significant-digit form."""
    return float(format(float(v), ".9g"))


def _sem(path: str, message: str):
    raise ScenarioSemanticError(path, message)


def _obj(v, path) -> dict:
    if not isinstance(v, dict):
        _sem(path, "expected a JSON object")
    return v


def _arr(v, path) -> list:
    if not isinstance(v, list):
        _sem(path, "expected a JSON array")
    return v


def _num(v, path) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _sem(path, "expected a number")
    return canon_float(v)


def _int(v, path) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        _sem(path, "expected an integer")
    return v


def _str(v, path) -> str:
    if not isinstance(v, str):
        _sem(path, "expected a string")
    return v


def _check_keys(d: dict, allowed, path: str):
    for k in sorted(set(d) - set(allowed)):
        _sem(f"{path}.{k}" if path else k, "unknown key")


@dataclass(frozen=True)
class GridRequest:
    height_m: float
    bounds_m: tuple = _DEF_BOUNDS
    resolution_m: float = _DEF_RESOLUTION
    filter_cells: tuple | None = None
    filter_group: str | None = None


@dataclass(frozen=True)
class FlightRequest:
    trajectory: Trajectory
    initial_cell: int | None = None
    policy: HandoverPolicy | None = None  # overrides the scenario policy


@dataclass(frozen=True)
class Scenario:
    network: Network
    link: LinkBudgetConfig
    ue: UeConfig
    policy: HandoverPolicy
    grids: tuple = ()
    flights: tuple = ()
    # ungrouped pair declarations, validated by the CLI's validate command
    pairs: tuple = ()
    # ("standard", rings, isd, antenna_height) when built by the shorthand,
    # None for explicit cell lists; kept so serialization stays compact.
    standard: tuple | None = None


# ---------------------------------------------------------------- parsing


def _parse_sidelobes(raw, path):
    out = []
    for i, item in enumerate(_arr(raw, path)):
        p = f"{path}[{i}]"
        o = _obj(item, p)
        _check_keys(o, ("elevation_deg", "apex_angle_deg", "offset_db"), p)
        for key in ("elevation_deg", "apex_angle_deg", "offset_db"):
            if key not in o:
                _sem(f"{p}.{key}", "missing required key")
        out.append(
            SidelobeSpec(
                elevation_deg=_num(o["elevation_deg"], f"{p}.elevation_deg"),
                apex_angle_deg=_num(o["apex_angle_deg"], f"{p}.apex_angle_deg"),
                offset_db=_num(o["offset_db"], f"{p}.offset_db"),
            )
        )
    return tuple(out)


_ANTENNA_KEYS = (
    "model",
    "element_hpbw_az_deg",
    "element_hpbw_el_deg",
    "element_max_attenuation_db",
    "n_vertical_elements",
    "element_spacing_wl",
    "electrical_tilt_deg",
    "max_gain_dbi",
    "carrier_frequency_hz",
    "mainlobe_apex_angle_deg",
    "sidelobes",
)


def _parse_antenna(raw, path, base: AntennaConfig) -> AntennaConfig:
    o = _obj(raw, path)
    _check_keys(o, _ANTENNA_KEYS, path)
    kw = {}
    if "model" in o:
        kw["model"] = _str(o["model"], f"{path}.model")
    if "n_vertical_elements" in o:
        kw["n_vertical_elements"] = _int(o["n_vertical_elements"],
                                         f"{path}.n_vertical_elements")
    if "sidelobes" in o:
        kw["sidelobes"] = _parse_sidelobes(o["sidelobes"], f"{path}.sidelobes")
    for key in ("element_hpbw_az_deg", "element_hpbw_el_deg",
                "element_max_attenuation_db", "element_spacing_wl",
                "electrical_tilt_deg", "max_gain_dbi", "carrier_frequency_hz",
                "mainlobe_apex_angle_deg"):
        if key in o:
            kw[key] = _num(o[key], f"{path}.{key}")
    merged = {
        "model": base.model,
        "element_hpbw_az_deg": base.element_hpbw_az_deg,
        "element_hpbw_el_deg": base.element_hpbw_el_deg,
        "element_max_attenuation_db": base.element_max_attenuation_db,
        "n_vertical_elements": base.n_vertical_elements,
        "element_spacing_wl": base.element_spacing_wl,
        "electrical_tilt_deg": base.electrical_tilt_deg,
        "max_gain_dbi": base.max_gain_dbi,
        "carrier_frequency_hz": base.carrier_frequency_hz,
        "mainlobe_apex_angle_deg": base.mainlobe_apex_angle_deg,
        "sidelobes": base.sidelobes,
    }
    merged.update(kw)
    try:
        return AntennaConfig(**merged)
    except InvalidParameterError as exc:
        _sem(path, str(exc))


def _parse_link(raw, path) -> LinkBudgetConfig:
    o = _obj(raw, path)
    keys = ("tx_power_dbm", "noise_floor_dbm", "min_distance_m")
    _check_keys(o, keys, path)
    kw = {k: _num(o[k], f"{path}.{k}") for k in keys if k in o}
    try:
        return LinkBudgetConfig(**kw)
    except InvalidParameterError as exc:
        _sem(path, str(exc))


_UE_KEYS = (
    "a3_offset_db",
    "hysteresis_db",
    "time_to_trigger_s",
    "height_threshold_m",
    "rsrp_qout_dbm",
    "t310_s",
    "ho_execution_time_s",
    "report_interval_s",
)


def _parse_ue(raw, path, predefined_height: float) -> UeConfig:
    o = _obj(raw, path)
    _check_keys(o, _UE_KEYS, path)
    kw = {k: _num(o[k], f"{path}.{k}") for k in _UE_KEYS if k in o}
    kw.setdefault("height_threshold_m", canon_float(predefined_height))
    try:
        return UeConfig(**kw)
    except InvalidParameterError as exc:
        _sem(path, str(exc))


def _parse_policy(raw, path, group_ids) -> HandoverPolicy:
    o = _obj(raw, path)
    _check_keys(o, ("kind", "group_id"), path)
    kind = _str(o.get("kind", "baseline"), f"{path}.kind")
    group_id = o.get("group_id")
    if group_id is not None:
        group_id = _str(group_id, f"{path}.group_id")
        if group_id not in group_ids:
            _sem(f"{path}.group_id", f"unknown group {group_id!r}")
    try:
        return HandoverPolicy(kind=kind, group_id=group_id)
    except InvalidParameterError as exc:
        _sem(path, str(exc))


_CELL_KEYS = (
    "id",
    "site_id",
    "x_m",
    "y_m",
    "antenna_height_m",
    "boresight_azimuth_deg",
    "tx_power_dbm",
    "role",
    "antenna",
)


def _parse_cells(raw, path, default_antenna, default_tx):
    cells = []
    for i, item in enumerate(_arr(raw, path)):
        p = f"{path}[{i}]"
        o = _obj(item, p)
        _check_keys(o, _CELL_KEYS, p)
        for key in ("id", "site_id", "x_m", "y_m", "antenna_height_m",
                    "boresight_azimuth_deg"):
            if key not in o:
                _sem(f"{p}.{key}", "missing required key")
        role = _str(o.get("role", "conventional"), f"{p}.role")
        if role not in ROLES:
            _sem(f"{p}.role", f"must be one of {ROLES}")
        antenna = default_antenna
        if "antenna" in o:
            antenna = _parse_antenna(o["antenna"], f"{p}.antenna", default_antenna)
        cells.append(
            Cell(
                id=_int(o["id"], f"{p}.id"),
                site_id=_int(o["site_id"], f"{p}.site_id"),
                position=Point3(
                    _num(o["x_m"], f"{p}.x_m"),
                    _num(o["y_m"], f"{p}.y_m"),
                    _num(o["antenna_height_m"], f"{p}.antenna_height_m"),
                ),
                boresight_azimuth=_num(o["boresight_azimuth_deg"],
                                       f"{p}.boresight_azimuth_deg"),
                antenna=antenna,
                tx_power_dbm=_num(o.get("tx_power_dbm", default_tx),
                                  f"{p}.tx_power_dbm"),
                role=role,
            )
        )
    return tuple(cells)


def _parse_pair(raw, path) -> CellPair:
    o = _obj(raw, path)
    _check_keys(o, ("aerial_coverage_cell", "mainlobe_indication_cell"), path)
    for key in ("aerial_coverage_cell", "mainlobe_indication_cell"):
        if key not in o:
            _sem(f"{path}.{key}", "missing required key")
    return CellPair(
        aerial_coverage_cell=_int(o["aerial_coverage_cell"],
                                  f"{path}.aerial_coverage_cell"),
        mainlobe_indication_cell=_int(o["mainlobe_indication_cell"],
                                      f"{path}.mainlobe_indication_cell"),
    )


def _check_pair_structure(pair: CellPair, cells_by_id, isd, path):
    for key, cid in (("aerial_coverage_cell", pair.aerial_coverage_cell),
                     ("mainlobe_indication_cell", pair.mainlobe_indication_cell)):
        if cid not in cells_by_id:
            _sem(f"{path}.{key}", f"unknown cell id {cid}")
    a = cells_by_id[pair.aerial_coverage_cell]
    b = cells_by_id[pair.mainlobe_indication_cell]
    if a.site_id == b.site_id:
        _sem(path, "pair cells must belong to different sites")
    dist = ((a.position.x - b.position.x) ** 2 + (a.position.y - b.position.y) ** 2) ** 0.5
    if dist > _ADJACENCY_FACTOR * isd:
        _sem(path, f"pair sites are {dist:.1f} m apart, beyond the "
                   f"{_ADJACENCY_FACTOR:g} x isd adjacency limit")
    if circular_diff(a.boresight_azimuth, b.boresight_azimuth) > _BORESIGHT_TOLERANCE:
        _sem(path, "pair cells must have similar boresights "
                   f"(within {_BORESIGHT_TOLERANCE:g} deg)")


_TOP_KEYS = ("network", "predefined_height_m", "antenna", "link_budget", "ue",
             "pairs", "groups", "policy", "grids", "flights")


def parse_scenario(text) -> Scenario:
    """Parse UTF-8 JSON scenario bytes (or str) into a validated Scenario
    with every default filled in and every cross-reference resolved."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioSyntaxError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            line=exc.lineno,
            column=exc.colno,
        ) from None

    top = _obj(raw, "")
    _check_keys(top, _TOP_KEYS, "")
    if "network" not in top:
        _sem("network", "missing required key")

    predefined = _num(top.get("predefined_height_m", _DEF_PREDEFINED_HEIGHT),
                      "predefined_height_m")
    antenna = _DEF_ANTENNA
    if "antenna" in top:
        antenna = _parse_antenna(top["antenna"], "antenna", _DEF_ANTENNA)
    link = _parse_link(top.get("link_budget", {}), "link_budget")
    ue = _parse_ue(top.get("ue", {}), "ue", predefined)

    net_o = _obj(top["network"], "network")
    _check_keys(net_o, ("standard", "cells", "isd_m"), "network")
    standard = None
    if "standard" in net_o:
        if "cells" in net_o:
            _sem("network", "use either 'standard' or 'cells', not both")
        so = _obj(net_o["standard"], "network.standard")
        _check_keys(so, ("rings", "isd_m", "antenna_height_m"), "network.standard")
        for key in ("rings", "isd_m", "antenna_height_m"):
            if key not in so:
                _sem(f"network.standard.{key}", "missing required key")
        rings = _int(so["rings"], "network.standard.rings")
        isd = _num(so["isd_m"], "network.standard.isd_m")
        h = _num(so["antenna_height_m"], "network.standard.antenna_height_m")
        try:
            base_net = build_standard_network(rings, isd, h, antenna,
                                              tx_power_dbm=link.tx_power_dbm,
                                              predefined_height=predefined)
        except InvalidParameterError as exc:
            _sem("network.standard", str(exc))
        cells = base_net.cells
        standard = ("standard", rings, isd, h)
    elif "cells" in net_o:
        if "isd_m" not in net_o:
            _sem("network.isd_m", "missing required key (needed with explicit cells)")
        isd = _num(net_o["isd_m"], "network.isd_m")
        cells = _parse_cells(net_o["cells"], "network.cells", antenna,
                             link.tx_power_dbm)
    else:
        _sem("network", "needs either 'standard' or 'cells'")

    cells_by_id = {c.id: c for c in cells}
    if len(cells_by_id) != len(cells):
        _sem("network.cells", "cell ids must be unique")

    pairs = []
    for i, item in enumerate(_arr(top.get("pairs", []), "pairs")):
        p = f"pairs[{i}]"
        pair = _parse_pair(item, p)
        _check_pair_structure(pair, cells_by_id, isd, p)
        pairs.append(pair)

    groups = []
    for gi, item in enumerate(_arr(top.get("groups", []), "groups")):
        gp = f"groups[{gi}]"
        o = _obj(item, gp)
        _check_keys(o, ("group_id", "pairs", "qos_profile"), gp)
        if "group_id" not in o:
            _sem(f"{gp}.group_id", "missing required key")
        gid = _str(o["group_id"], f"{gp}.group_id")
        gpairs = []
        for pi, praw in enumerate(_arr(o.get("pairs", []), f"{gp}.pairs")):
            pp = f"{gp}.pairs[{pi}]"
            pair = _parse_pair(praw, pp)
            _check_pair_structure(pair, cells_by_id, isd, pp)
            gpairs.append(pair)
        qos = o.get("qos_profile", {})
        if not isinstance(qos, dict):
            _sem(f"{gp}.qos_profile", "expected a JSON object")
        try:
            groups.append(AerialCoverageGroup(group_id=gid, pairs=tuple(gpairs),
                                              qos_profile=qos))
        except InvalidParameterError as exc:
            _sem(f"{gp}.pairs", str(exc))

    group_ids = {g.group_id for g in groups}
    if len(group_ids) != len(groups):
        _sem("groups", "group ids must be unique")

    try:
        network = Network(cells=cells, groups=tuple(groups), isd=isd,
                          predefined_height=predefined)
    except InvalidParameterError as exc:
        _sem("predefined_height_m", str(exc))

    policy = _parse_policy(top.get("policy", {}), "policy", group_ids)

    grids = []
    for i, item in enumerate(_arr(top.get("grids", []), "grids")):
        p = f"grids[{i}]"
        o = _obj(item, p)
        _check_keys(o, ("height_m", "bounds_m", "resolution_m", "filter_cells",
                        "filter_group"), p)
        if "height_m" not in o:
            _sem(f"{p}.height_m", "missing required key")
        bounds = _DEF_BOUNDS
        if "bounds_m" in o:
            b = _arr(o["bounds_m"], f"{p}.bounds_m")
            if len(b) != 4:
                _sem(f"{p}.bounds_m", "expected [xmin, ymin, xmax, ymax]")
            bounds = tuple(_num(v, f"{p}.bounds_m[{k}]") for k, v in enumerate(b))
        fc = None
        if "filter_cells" in o:
            fc = tuple(
                _int(v, f"{p}.filter_cells[{k}]")
                for k, v in enumerate(_arr(o["filter_cells"], f"{p}.filter_cells"))
            )
            for k, cid in enumerate(fc):
                if cid not in cells_by_id:
                    _sem(f"{p}.filter_cells[{k}]", f"unknown cell id {cid}")
        fg = None
        if "filter_group" in o:
            fg = _str(o["filter_group"], f"{p}.filter_group")
            if fg not in group_ids:
                _sem(f"{p}.filter_group", f"unknown group {fg!r}")
        if fc is not None and fg is not None:
            _sem(p, "use either filter_cells or filter_group, not both")
        grids.append(GridRequest(
            height_m=_num(o["height_m"], f"{p}.height_m"),
            bounds_m=bounds,
            resolution_m=_num(o.get("resolution_m", _DEF_RESOLUTION),
                              f"{p}.resolution_m"),
            filter_cells=fc,
            filter_group=fg,
        ))

    flights = []
    for i, item in enumerate(_arr(top.get("flights", []), "flights")):
        p = f"flights[{i}]"
        o = _obj(item, p)
        _check_keys(o, ("waypoints_m", "speed_mps", "sample_interval_s",
                        "initial_cell", "policy"), p)
        for key in ("waypoints_m", "speed_mps"):
            if key not in o:
                _sem(f"{p}.{key}", "missing required key")
        wps = []
        for k, w in enumerate(_arr(o["waypoints_m"], f"{p}.waypoints_m")):
            wa = _arr(w, f"{p}.waypoints_m[{k}]")
            if len(wa) != 3:
                _sem(f"{p}.waypoints_m[{k}]", "expected [x, y, z]")
            wps.append(Point3(*(_num(v, f"{p}.waypoints_m[{k}][{j}]")
                                for j, v in enumerate(wa))))
        init = None
        if "initial_cell" in o and o["initial_cell"] is not None:
            init = _int(o["initial_cell"], f"{p}.initial_cell")
            if init not in cells_by_id:
                _sem(f"{p}.initial_cell", f"unknown cell id {init}")
        fpolicy = None
        if "policy" in o:
            fpolicy = _parse_policy(o["policy"], f"{p}.policy", group_ids)
        try:
            traj = Trajectory(
                waypoints=tuple(wps),
                speed_mps=_num(o["speed_mps"], f"{p}.speed_mps"),
                sample_interval_s=_num(o.get("sample_interval_s",
                                             _DEF_SAMPLE_INTERVAL),
                                       f"{p}.sample_interval_s"),
            )
        except InvalidParameterError as exc:
            _sem(p, str(exc))
        flights.append(FlightRequest(trajectory=traj, initial_cell=init,
                                     policy=fpolicy))

    return Scenario(
        network=network,
        link=link,
        ue=ue,
        policy=policy,
        grids=tuple(grids),
        flights=tuple(flights),
        pairs=tuple(pairs),
        standard=standard,
    )


# ------------------------------------------------------------ serialization


def _antenna_dict(a: AntennaConfig, base: AntennaConfig) -> dict:
    out = {}
    for key, attr in (
        ("model", "model"),
        ("element_hpbw_az_deg", "element_hpbw_az_deg"),
        ("element_hpbw_el_deg", "element_hpbw_el_deg"),
        ("element_max_attenuation_db", "element_max_attenuation_db"),
        ("n_vertical_elements", "n_vertical_elements"),
        ("element_spacing_wl", "element_spacing_wl"),
        ("electrical_tilt_deg", "electrical_tilt_deg"),
        ("max_gain_dbi", "max_gain_dbi"),
        ("carrier_frequency_hz", "carrier_frequency_hz"),
        ("mainlobe_apex_angle_deg", "mainlobe_apex_angle_deg"),
    ):
        v = getattr(a, attr)
        if v != getattr(base, attr):
            out[key] = v
    if a.sidelobes != base.sidelobes:
        out["sidelobes"] = [
            {"elevation_deg": s.elevation_deg, "apex_angle_deg": s.apex_angle_deg,
             "offset_db": s.offset_db}
            for s in a.sidelobes
        ]
    return out


def _pair_dict(p: CellPair) -> dict:
    return {
        "aerial_coverage_cell": p.aerial_coverage_cell,
        "mainlobe_indication_cell": p.mainlobe_indication_cell,
    }


def _policy_dict(p: HandoverPolicy) -> dict:
    out = {}
    if p.kind != "baseline":
        out["kind"] = p.kind
    if p.group_id is not None:
        out["group_id"] = p.group_id
    return out


def serialize_scenario(s: Scenario) -> bytes:
    """Canonical UTF-8 JSON: sorted keys, defaults omitted, numbers already
    canonicalized to 9 significant digits at parse time."""
    doc: dict = {}

    if s.standard is not None:
        _, rings, isd, h = s.standard
        doc["network"] = {"standard": {"rings": rings, "isd_m": isd,
                                       "antenna_height_m": h}}
        scenario_antenna = s.network.cells[0].antenna if s.network.cells else _DEF_ANTENNA
    else:
        counts: dict = {}
        for c in s.network.cells:
            key = id(c.antenna)
            counts[key] = (counts.get(key, (0, c.antenna))[0] + 1, c.antenna)
        scenario_antenna = (
            max(counts.values(), key=lambda t: t[0])[1] if counts else _DEF_ANTENNA
        )
        cell_rows = []
        for c in s.network.cells:
            row = {
                "id": c.id,
                "site_id": c.site_id,
                "x_m": c.position.x,
                "y_m": c.position.y,
                "antenna_height_m": c.position.z,
                "boresight_azimuth_deg": c.boresight_azimuth,
            }
            if c.tx_power_dbm != s.link.tx_power_dbm:
                row["tx_power_dbm"] = c.tx_power_dbm
            if c.role != "conventional":
                row["role"] = c.role
            if c.antenna != scenario_antenna:
                row["antenna"] = _antenna_dict(c.antenna, scenario_antenna)
            cell_rows.append(row)
        doc["network"] = {"cells": cell_rows, "isd_m": s.network.isd}

    if s.network.predefined_height != _DEF_PREDEFINED_HEIGHT:
        doc["predefined_height_m"] = s.network.predefined_height

    ant = _antenna_dict(scenario_antenna, _DEF_ANTENNA)
    if ant:
        doc["antenna"] = ant

    lb = {}
    for key in ("tx_power_dbm", "noise_floor_dbm", "min_distance_m"):
        v = getattr(s.link, key)
        if v != getattr(_DEF_LINK, key):
            lb[key] = v
    if lb:
        doc["link_budget"] = lb

    ue = {}
    for key in _UE_KEYS:
        v = getattr(s.ue, key)
        if key == "height_threshold_m":
            if v != s.network.predefined_height:
                ue[key] = v
        elif v != getattr(_DEF_UE, key):
            ue[key] = v
    if ue:
        doc["ue"] = ue

    if s.pairs:
        doc["pairs"] = [_pair_dict(p) for p in s.pairs]

    if s.network.groups:
        rows = []
        for g in s.network.groups:
            row = {"group_id": g.group_id,
                   "pairs": [_pair_dict(p) for p in g.pairs]}
            if g.qos_profile:
                row["qos_profile"] = g.qos_profile
            rows.append(row)
        doc["groups"] = rows

    pol = _policy_dict(s.policy)
    if pol:
        doc["policy"] = pol

    if s.grids:
        rows = []
        for g in s.grids:
            row = {"height_m": g.height_m}
            if tuple(g.bounds_m) != _DEF_BOUNDS:
                row["bounds_m"] = list(g.bounds_m)
            if g.resolution_m != _DEF_RESOLUTION:
                row["resolution_m"] = g.resolution_m
            if g.filter_cells is not None:
                row["filter_cells"] = list(g.filter_cells)
            if g.filter_group is not None:
                row["filter_group"] = g.filter_group
            rows.append(row)
        doc["grids"] = rows

    if s.flights:
        rows = []
        for f in s.flights:
            row = {
                "waypoints_m": [[p.x, p.y, p.z] for p in f.trajectory.waypoints],
                "speed_mps": f.trajectory.speed_mps,
            }
            if f.trajectory.sample_interval_s != _DEF_SAMPLE_INTERVAL:
                row["sample_interval_s"] = f.trajectory.sample_interval_s
            if f.initial_cell is not None:
                row["initial_cell"] = f.initial_cell
            if f.policy is not None:
                row["policy"] = _policy_dict(f.policy) or {"kind": "baseline"}
            rows.append(row)
        doc["flights"] = rows

    return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("utf-8")


def scenario_hash(s: Scenario) -> str:
    return hashlib.sha256(serialize_scenario(s)).hexdigest()
