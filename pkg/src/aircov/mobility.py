"""Discrete-time UAV flight simulation.

Fixed-step loop: sample RSRP of every cell, run per-neighbor A3
time-to-trigger timers, hand triggered measurement reports to the policy,
execute handovers with a freeze window, and detect handover failures and
radio link failures.  The core contains no randomness; identical inputs
give identical traces.

Timing conventions (all quantized to the sample interval dt):

* An A3 condition that has been true at n consecutive samples counts as
  held for n*dt; the report fires at the first sample where n*dt reaches
  the time-to-trigger.
* After an ignored report the triggering neighbor's timer resets and may
  re-trigger; after a completed handover all timers reset.
* During handover execution the serving cell is frozen, A3 processing is
  suspended, and one below-qout sample is enough for a handover failure.
* Reattachment is instantaneous: strongest audible cell, preferring
  policy-eligible cells for a UE above the height threshold, falling back
  to any audible cell (flagged in the event) when no eligible one exists.
* Height-threshold crossings emit H1/H2 reports into the trace; they do
  not drive handover decisions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import CannotAttachError, InvalidParameterError, NotFoundError
from .network import Network
from .policy import HandoverPolicy, MeasurementReport, evaluate_mr
from .propagation import LinkBudgetConfig, rss

__all__ = [
    "Trajectory",
    "UeConfig",
    "MeasurementReport",
    "FlightSample",
    "FlightEvent",
    "FlightTrace",
    "simulate_flight",
    "mobility_metrics",
    "write_trace_jsonl",
    "write_series_csv",
    "write_decisions_jsonl",
]


@dataclass(frozen=True)
class Trajectory:
    """Piecewise-linear flight path traversed at constant speed."""

    waypoints: tuple
    speed_mps: float
    sample_interval_s: float = 0.01

    def __post_init__(self):
        object.__setattr__(self, "waypoints", tuple(self.waypoints))
        if len(self.waypoints) < 2:
            raise InvalidParameterError("trajectory needs at least 2 waypoints")
        if self.speed_mps <= 0:
            raise InvalidParameterError("speed_mps must be > 0")
        if self.sample_interval_s <= 0:
            raise InvalidParameterError("sample_interval_s must be > 0")

    def sample(self):
        """Times and positions at every sample instant, end point included."""
        wp = np.array([[p.x, p.y, p.z] for p in self.waypoints], dtype=float)
        seg = np.diff(wp, axis=0)
        seg_len = np.linalg.norm(seg, axis=1)
        cum = np.concatenate([[0.0], np.cumsum(seg_len)])
        total = cum[-1]
        duration = total / self.speed_mps
        n = int(np.floor(duration / self.sample_interval_s + 1e-9))
        times = self.sample_interval_s * np.arange(n + 1)
        s = np.minimum(self.speed_mps * times, total)
        idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(seg_len) - 1)
        safe = np.where(seg_len[idx] > 0, seg_len[idx], 1.0)
        frac = np.where(seg_len[idx] > 0, (s - cum[idx]) / safe, 0.0)
        pos = wp[idx] + frac[:, None] * seg[idx]
        return times, pos


@dataclass(frozen=True)
class UeConfig:
    a3_offset_db: float = 3.0
    hysteresis_db: float = 1.0
    time_to_trigger_s: float = 0.16
    height_threshold_m: float = 300.0
    rsrp_qout_dbm: float = -110.0
    t310_s: float = 1.0
    ho_execution_time_s: float = 0.15
    report_interval_s: float = 0.0  # 0 disables periodic (trace-only) reports

    def __post_init__(self):
        for name in ("time_to_trigger_s", "t310_s", "ho_execution_time_s",
                     "report_interval_s", "hysteresis_db"):
            if getattr(self, name) < 0:
                raise InvalidParameterError(f"{name} must be >= 0")
        if self.a3_offset_db < 0:
            raise InvalidParameterError("a3_offset_db must be >= 0")


@dataclass(frozen=True)
class FlightSample:
    time: float
    x: float
    y: float
    z: float
    serving_cell: int | None
    serving_rsrp: float
    strongest_neighbor_rsrp: float


@dataclass(frozen=True)
class FlightEvent:
    time: float
    kind: str  # MR | HO_DECISION | HO_COMPLETE | HOF | RLF | REATTACH
    details: dict = field(default_factory=dict)


@dataclass(frozen=True)
class FlightTrace:
    samples: tuple
    events: tuple
    sample_interval_s: float
    rsrp_qout_dbm: float

    def events_of(self, *kinds):
        return [e for e in self.events if e.kind in kinds]

    def decisions(self):
        return [e for e in self.events if e.kind == "MR" and e.details.get("trigger") == "A3"]


class _FlightState:
    def __init__(self, n_cells):
        self.serving: int | None = None  # index into the cell list
        self.timers = np.zeros(n_cells, dtype=int)
        self.exec_target: int | None = None
        self.exec_complete_t: float | None = None
        self.below_count = 0

    @property
    def in_execution(self) -> bool:
        return self.exec_target is not None

    def clear_execution(self):
        self.exec_target = None
        self.exec_complete_t = None

    def reset_timers(self):
        self.timers[:] = 0


def _eligible_mask(network, policy, ids, audible):
    """Cells a reattaching UE above the threshold may pick under the policy."""
    if policy.kind != "bcs":
        return audible.copy()
    group = network.group(policy.group_id)
    idx = {cid: k for k, cid in enumerate(ids)}
    mask = np.zeros_like(audible)
    for pair in group.pairs:
        ai = idx.get(pair.aerial_coverage_cell)
        ii = idx.get(pair.mainlobe_indication_cell)
        if ai is not None and ii is not None and audible[ai] and audible[ii]:
            mask[ai] = True
    return mask


def _pick_strongest(r, mask):
    if not mask.any():
        return None
    masked = np.where(mask, r, -np.inf)
    # lowest id wins ties; ids are sorted ascending in the cell list
    return int(np.argmax(masked))


def simulate_flight(
    network: Network,
    trajectory: Trajectory,
    ue: UeConfig,
    policy: HandoverPolicy,
    initial_cell: int | None = None,
    link: LinkBudgetConfig | None = None,
) -> FlightTrace:
    """Run one flight and return its sample series and event log."""
    link = link or LinkBudgetConfig()
    cells = sorted(network.cells, key=lambda c: c.id)
    ids = [c.id for c in cells]
    idx_of = {cid: k for k, cid in enumerate(ids)}
    times, pos = trajectory.sample()
    dt = trajectory.sample_interval_s

    rsrp = np.column_stack([np.asarray(rss(c, pos, link)) for c in cells])
    audible_all = rsrp >= link.noise_floor_dbm

    ttt_n = max(1, int(round(ue.time_to_trigger_s / dt)))
    t310_n = max(1, int(round(ue.t310_s / dt)))
    report_n = int(round(ue.report_interval_s / dt)) if ue.report_interval_s > 0 else 0

    st = _FlightState(len(cells))
    events: list[FlightEvent] = []
    samples: list[FlightSample] = []

    def above_at(k):
        return bool(pos[k, 2] >= ue.height_threshold_m)

    def build_report(k, t, trigger):
        r = rsrp[k]
        aud = audible_all[k]
        order = sorted(
            (i for i in range(len(cells)) if aud[i] and i != st.serving),
            key=lambda i: (-r[i], ids[i]),
        )
        return MeasurementReport(
            time=float(t),
            ue_height=float(pos[k, 2]),
            above_threshold=above_at(k),
            serving_cell=ids[st.serving],
            serving_rsrp=float(r[st.serving]),
            neighbors=tuple((ids[i], float(r[i])) for i in order),
            trigger=trigger,
        )

    def reattach(k, t, initial=False):
        aud = audible_all[k]
        eligible = _eligible_mask(network, policy, ids, aud) if above_at(k) else aud.copy()
        fallback = False
        choice = _pick_strongest(rsrp[k], eligible)
        if choice is None:
            choice = _pick_strongest(rsrp[k], aud)
            fallback = choice is not None
        st.serving = choice
        st.reset_timers()
        st.below_count = 0
        details = {"initial": initial, "fallback": fallback}
        details["cell"] = None if choice is None else ids[choice]
        events.append(FlightEvent(float(t), "REATTACH", details))

    # initial attach
    if initial_cell is not None:
        if initial_cell not in idx_of:
            raise NotFoundError(f"no cell with id {initial_cell}")
        if not audible_all[0, idx_of[initial_cell]]:
            raise CannotAttachError(
                f"initial cell {initial_cell} is not audible at the start point"
            )
        st.serving = idx_of[initial_cell]
        events.append(FlightEvent(0.0, "REATTACH",
                                  {"initial": True, "fallback": False,
                                   "cell": initial_cell}))
    else:
        if not audible_all[0].any():
            raise CannotAttachError("no audible cell at the start point")
        reattach(0, 0.0, initial=True)

    prev_above = above_at(0)

    for k, t in enumerate(times):
        t = float(t)
        now_above = above_at(k)
        if now_above != prev_above:
            kind = "H1" if now_above else "H2"
            if st.serving is not None:
                rep = build_report(k, t, kind)
                events.append(FlightEvent(t, "MR", {
                    "trigger": kind,
                    "serving": rep.serving_cell,
                    "above_threshold": rep.above_threshold,
                }))
            prev_above = now_above

        if st.serving is None:
            if audible_all[k].any():
                reattach(k, t)
        elif st.in_execution:
            if rsrp[k, st.serving] < ue.rsrp_qout_dbm:
                events.append(FlightEvent(t, "HOF", {
                    "serving": ids[st.serving],
                    "target": ids[st.exec_target],
                    "serving_rsrp": float(rsrp[k, st.serving]),
                }))
                st.clear_execution()
                reattach(k, t)
            elif t >= st.exec_complete_t - 1e-12:
                complete_t = st.exec_complete_t
                new_serving = st.exec_target
                events.append(FlightEvent(float(complete_t), "HO_COMPLETE", {
                    "source": ids[st.serving],
                    "target": ids[new_serving],
                }))
                st.serving = new_serving
                st.clear_execution()
                st.reset_timers()
                st.below_count = 0
        else:
            r = rsrp[k]
            if r[st.serving] < ue.rsrp_qout_dbm:
                st.below_count += 1
                if st.below_count >= t310_n:
                    events.append(FlightEvent(t, "RLF", {
                        "serving": ids[st.serving],
                        "serving_rsrp": float(r[st.serving]),
                    }))
                    reattach(k, t)
            else:
                st.below_count = 0

            if st.serving is not None and not st.in_execution:
                cond = audible_all[k] & (r > r[st.serving] + ue.a3_offset_db + ue.hysteresis_db)
                cond[st.serving] = False
                st.timers = np.where(cond, st.timers + 1, 0)
                fired = np.flatnonzero(st.timers >= ttt_n)
                if len(fired):
                    trig = min(fired, key=lambda i: (-r[i], ids[i]))
                    rep = build_report(k, t, "A3")
                    decision = evaluate_mr(rep, network, policy, link.noise_floor_dbm)
                    best = rep.best_neighbor
                    events.append(FlightEvent(t, "MR", {
                        "trigger": "A3",
                        "triggering_cell": ids[trig],
                        "serving": rep.serving_cell,
                        "serving_rsrp": rep.serving_rsrp,
                        "best": None if best is None else best[0],
                        "best_rsrp": None if best is None else best[1],
                        "above_threshold": rep.above_threshold,
                        "outcome": decision.outcome,
                        "target": decision.target,
                        "reason": decision.reason,
                    }))
                    if decision.outcome == "execute":
                        st.exec_target = idx_of[decision.target]
                        st.exec_complete_t = t + ue.ho_execution_time_s
                        st.reset_timers()
                        events.append(FlightEvent(t, "HO_DECISION", {
                            "serving": rep.serving_cell,
                            "target": decision.target,
                        }))
                    else:
                        st.timers[trig] = 0

        if report_n and k and k % report_n == 0 and st.serving is not None:
            rep = build_report(k, t, "periodic")
            events.append(FlightEvent(t, "MR", {
                "trigger": "periodic",
                "serving": rep.serving_cell,
                "serving_rsrp": rep.serving_rsrp,
                "above_threshold": rep.above_threshold,
            }))

        aud = audible_all[k]
        neigh_mask = aud.copy()
        if st.serving is not None:
            neigh_mask[st.serving] = False
        strongest = np.max(rsrp[k][neigh_mask]) if neigh_mask.any() else np.nan
        samples.append(FlightSample(
            time=t,
            x=float(pos[k, 0]), y=float(pos[k, 1]), z=float(pos[k, 2]),
            serving_cell=None if st.serving is None else ids[st.serving],
            serving_rsrp=float(rsrp[k, st.serving]) if st.serving is not None else np.nan,
            strongest_neighbor_rsrp=float(strongest),
        ))

    return FlightTrace(
        samples=tuple(samples),
        events=tuple(events),
        sample_interval_s=dt,
        rsrp_qout_dbm=ue.rsrp_qout_dbm,
    )


def mobility_metrics(trace: FlightTrace) -> dict:
    """Aggregate counters of one flight trace."""
    attempts = len(trace.events_of("HO_DECISION"))
    hof = len(trace.events_of("HOF"))
    outage = sum(
        1
        for s in trace.samples
        if s.serving_cell is None or (not np.isnan(s.serving_rsrp)
                                      and s.serving_rsrp < trace.rsrp_qout_dbm)
    )
    return {
        "handover_count": len(trace.events_of("HO_COMPLETE")),
        "handover_attempts": attempts,
        "hof_count": hof,
        "rlf_count": len(trace.events_of("RLF")),
        "hof_rate": hof / max(1, attempts),
        "time_in_outage": outage * trace.sample_interval_s,
    }


def _fmt(v) -> str:
    return "" if v is None or (isinstance(v, float) and np.isnan(v)) else format(v, ".9g")


def write_trace_jsonl(trace: FlightTrace, path) -> None:
    """One JSON object per event and per sample, in time order."""
    rows = [
        {"t": e.time, "kind": e.kind, **e.details} for e in trace.events
    ] + [
        {
            "t": s.time, "kind": "sample",
            "x": s.x, "y": s.y, "z": s.z,
            "serving_cell": s.serving_cell,
            "serving_rsrp": None if np.isnan(s.serving_rsrp) else s.serving_rsrp,
            "best_neighbor_rsrp": None if np.isnan(s.strongest_neighbor_rsrp)
            else s.strongest_neighbor_rsrp,
        }
        for s in trace.samples
    ]
    rows.sort(key=lambda row: (row["t"], 0 if row["kind"] != "sample" else 1))
    with open(path, "w") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def write_series_csv(trace: FlightTrace, path) -> None:
    with open(path, "w") as fh:
        fh.write("t_s,x_m,y_m,z_m,serving_cell,serving_rsrp_dbm,best_neighbor_rsrp_dbm\n")
        for s in trace.samples:
            cell = "" if s.serving_cell is None else str(s.serving_cell)
            fh.write(
                f"{_fmt(s.time)},{_fmt(s.x)},{_fmt(s.y)},{_fmt(s.z)},"
                f"{cell},{_fmt(s.serving_rsrp)},{_fmt(s.strongest_neighbor_rsrp)}\n"
            )


def write_decisions_jsonl(trace: FlightTrace, path) -> None:
    with open(path, "w") as fh:
        for e in trace.decisions():
            row = {
                "t": e.time,
                "serving": e.details.get("serving"),
                "best": e.details.get("best"),
                "outcome": e.details.get("outcome"),
                "target": e.details.get("target"),
                "reason": e.details.get("reason"),
            }
            fh.write(json.dumps(row, sort_keys=True) + "\n")
