"""Command-line frontend.

Subcommands: ``coverage`` (best-server / filtered grids), ``fly`` (flight
simulation), ``geometry`` (per-cell analytic geometry report) and
``validate`` (cell-pair checks).  All outputs are data files (CSV /
JSON / JSON-lines), never images, and identical scenario + flags produce
byte-identical data files.

Exit codes: 0 success, 1 input error, 2 computation error, 3 validation
failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass

from . import __version__
from .antenna import cone_lobes
from .coverage import (
    DEFAULT_BOUNDS,
    DEFAULT_RESOLUTION,
    best_server_grid,
    bcs_filtered_grid,
    fragmentation,
    grid_metadata,
    write_grid_csv,
)
from .errors import AircovError, NotFoundError, ScenarioError
from .geometry import bcs_min_range, conic_section, footprint_intervals
from .mobility import (
    mobility_metrics,
    simulate_flight,
    write_decisions_jsonl,
    write_series_csv,
    write_trace_jsonl,
)
from .network import validate_pair
from .policy import HandoverPolicy
from .scenario import parse_scenario, scenario_hash

__all__ = ["main", "entry", "RunManifest"]

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_COMPUTE = 2
EXIT_VALIDATION = 3


@dataclass
class RunManifest:
    scenario_hash: str
    tool_version: str
    outputs: list  # of (kind, path)
    wall_time: float

    def to_dict(self) -> dict:
        digests = {}
        for _, path in self.outputs:
            with open(path, "rb") as fh:
                digests[os.path.basename(path)] = hashlib.sha256(fh.read()).hexdigest()
        return {
            "scenario_hash": self.scenario_hash,
            "tool_version": self.tool_version,
            "outputs": [[kind, str(path)] for kind, path in self.outputs],
            "outputs_sha256": digests,
            "wall_time_s": self.wall_time,
        }


def _load_scenario(path):
    with open(path, "rb") as fh:
        return parse_scenario(fh.read())


def _parse_filter(spec: str):
    if spec.startswith("group:"):
        return ("group", spec[len("group:"):])
    if spec.startswith("cells:"):
        try:
            ids = tuple(int(v) for v in spec[len("cells:"):].split(",") if v)
        except ValueError:
            raise ScenarioError(f"bad cell list in filter {spec!r}") from None
        if not ids:
            raise ScenarioError(f"empty cell list in filter {spec!r}")
        return ("cells", ids)
    raise ScenarioError(f"filter must look like group:NAME or cells:1,2,3, got {spec!r}")


def _parse_policy_flag(spec: str, network) -> HandoverPolicy:
    if spec == "baseline":
        return HandoverPolicy("baseline")
    if spec.startswith("bcs:"):
        gid = spec[len("bcs:"):]
        network.group(gid)  # raises NotFoundError for unknown groups
        return HandoverPolicy("bcs", group_id=gid)
    raise ScenarioError(f"policy must be 'baseline' or 'bcs:GROUP', got {spec!r}")


def _write_manifest(out_dir, scenario, outputs, started):
    manifest = RunManifest(
        scenario_hash=scenario_hash(scenario),
        tool_version=__version__,
        outputs=outputs,
        wall_time=time.monotonic() - started,
    )
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_coverage(args) -> int:
    started = time.monotonic()
    scn = _load_scenario(args.scenario)
    bounds = tuple(args.bounds) if args.bounds else DEFAULT_BOUNDS
    if args.filter:
        kind, value = _parse_filter(args.filter)
        if kind == "group":
            grid = bcs_filtered_grid(scn.network, scn.network.group(value),
                                     args.height, bounds, args.resolution, scn.link)
        else:
            grid = best_server_grid(scn.network, args.height, bounds,
                                    args.resolution, set(value), scn.link)
    else:
        grid = best_server_grid(scn.network, args.height, bounds,
                                args.resolution, None, scn.link)
    frag = fragmentation(grid)

    os.makedirs(args.out, exist_ok=True)
    grid_csv = os.path.join(args.out, "grid.csv")
    meta_json = os.path.join(args.out, "grid_meta.json")
    frag_json = os.path.join(args.out, "fragmentation.json")
    write_grid_csv(grid, grid_csv)
    with open(meta_json, "w") as fh:
        json.dump(grid_metadata(grid, scn.link), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(frag_json, "w") as fh:
        json.dump(frag.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(args.out, scn,
                    [("grid_csv", grid_csv), ("grid_meta", meta_json),
                     ("fragmentation", frag_json)], started)
    return EXIT_OK


def cmd_fly(args) -> int:
    started = time.monotonic()
    scn = _load_scenario(args.scenario)
    try:
        flight = scn.flights[args.flight]
    except IndexError:
        raise ScenarioError(
            f"scenario has {len(scn.flights)} flights, no index {args.flight}"
        ) from None
    policy = flight.policy or scn.policy
    if args.policy:
        policy = _parse_policy_flag(args.policy, scn.network)
    trace = simulate_flight(scn.network, flight.trajectory, scn.ue, policy,
                            initial_cell=flight.initial_cell, link=scn.link)

    os.makedirs(args.out, exist_ok=True)
    trace_path = os.path.join(args.out, "trace.jsonl")
    series_path = os.path.join(args.out, "series.csv")
    decisions_path = os.path.join(args.out, "decisions.jsonl")
    metrics_path = os.path.join(args.out, "metrics.json")
    write_trace_jsonl(trace, trace_path)
    write_series_csv(trace, series_path)
    write_decisions_jsonl(trace, decisions_path)
    with open(metrics_path, "w") as fh:
        json.dump(mobility_metrics(trace), fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(args.out, scn,
                    [("trace", trace_path), ("series", series_path),
                     ("decisions", decisions_path), ("metrics", metrics_path)],
                    started)
    return EXIT_OK


def cmd_geometry(args) -> int:
    scn = _load_scenario(args.scenario)
    cell = scn.network.cell(args.cell)
    lobes = cone_lobes(cell.position, cell.boresight_azimuth, cell.antenna)
    mainlobe = lobes[0][1]
    report = {
        "cell": cell.id,
        "height_m": args.height,
        "bcs_min_range_m": bcs_min_range(cell.position.z, args.height,
                                         cell.antenna.mainlobe_apex_angle_deg),
        "conic_section": conic_section(mainlobe, args.height).to_dict(),
    }
    if args.ray is not None:
        tagged = [(cell.id, kind, lobe) for kind, lobe in lobes]
        fp = footprint_intervals(tagged, args.height, args.ray, args.max_range,
                                 origin=(cell.position.x, cell.position.y))
        report["footprint_intervals"] = fp.to_dict()
    json.dump(report, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return EXIT_OK


def cmd_validate(args) -> int:
    scn = _load_scenario(args.scenario)
    reports = []
    all_ok = True

    def run(pair, origin):
        nonlocal all_ok
        result = validate_pair(scn.network, pair)
        all_ok = all_ok and result.ok
        row = {
            "origin": origin,
            "aerial_coverage_cell": pair.aerial_coverage_cell,
            "mainlobe_indication_cell": pair.mainlobe_indication_cell,
        }
        row.update(result.to_dict())
        reports.append(row)

    for i, pair in enumerate(scn.pairs):
        run(pair, f"pairs[{i}]")
    notices = []
    for g in scn.network.groups:
        shared = {}
        for i, pair in enumerate(g.pairs):
            run(pair, f"groups[{g.group_id}].pairs[{i}]")
            shared.setdefault(pair.mainlobe_indication_cell, []).append(i)
        for cid, idxs in sorted(shared.items()):
            if len(idxs) > 1:
                notices.append(
                    f"group {g.group_id!r}: indication cell {cid} is shared by "
                    f"pairs {idxs}"
                )
    if not reports:
        notices.append("no pairs declared; nothing to validate")
    json.dump({"pairs": reports, "notices": notices, "ok": all_ok},
              sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return EXIT_OK if all_ok else EXIT_VALIDATION


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aircov",
        description="Deterministic simulator of cellular aerial coverage for UAVs",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    out_default = os.environ.get("AIRCOV_OUT", "out")

    p = sub.add_parser("coverage", help="compute a best-server or filtered grid")
    p.add_argument("scenario")
    p.add_argument("--height", type=float, required=True, help="grid height in m")
    p.add_argument("--filter", help="group:NAME or cells:1,2,3")
    p.add_argument("--bounds", type=float, nargs=4,
                   metavar=("XMIN", "YMIN", "XMAX", "YMAX"))
    p.add_argument("--resolution", type=float, default=DEFAULT_RESOLUTION)
    p.add_argument("--out", default=out_default)
    p.add_argument("--seed", type=int, help="reserved; the core is deterministic")
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("fly", help="simulate one flight")
    p.add_argument("scenario")
    p.add_argument("--flight", type=int, default=0, help="flight index")
    p.add_argument("--policy", help="baseline or bcs:GROUP (overrides scenario)")
    p.add_argument("--out", default=out_default)
    p.add_argument("--seed", type=int, help="reserved; the core is deterministic")
    p.set_defaults(func=cmd_fly)

    p = sub.add_parser("geometry", help="analytic geometry report for one cell")
    p.add_argument("scenario")
    p.add_argument("--cell", type=int, required=True)
    p.add_argument("--height", type=float, required=True)
    p.add_argument("--ray", type=float, help="azimuth of a footprint ray, deg")
    p.add_argument("--max-range", type=float, default=5000.0)
    p.set_defaults(func=cmd_geometry)

    p = sub.add_parser("validate", help="validate declared cell-pairs")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, FileNotFoundError, IsADirectoryError, NotFoundError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    except AircovError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


def entry() -> None:
    sys.exit(main())
