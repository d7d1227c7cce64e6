"""Measurement-report evaluation: baseline strongest-cell handover versus
the stepwise cell-pair filtering algorithm.

The filtering rule, applied to a report from a UE above the height
threshold: the strongest reported neighbor must be an aerial-coverage-cell
of the policy's group AND its paired mainlobe-indication-cell must be
present in the same report (as a neighbor, or as the serving cell received
above the noise floor).  Everything else is ignored, however strong -
presence of the indication cell is what certifies that the UE sits in the
aerial cell's mainlobe rather than in one of its sidelobes, and the
sidelobes of the two paired cells never overlap.

Evaluation is stateless and uses only the ordering and presence of cells
in the report, never absolute levels, so decisions are invariant under a
report-wide RSRP offset.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidParameterError, NotFoundError
from .network import Network

__all__ = [
    "IGNORE_REASONS",
    "MeasurementReport",
    "HandoverPolicy",
    "HandoverDecision",
    "evaluate_mr",
    "eligible_targets",
]

IGNORE_REASONS = (
    "below-height-passthrough",
    "best-not-aerial-coverage-cell",
    "indication-cell-missing",
    "not-in-group",
    "serving-is-best",
)

DEFAULT_NOISE_FLOOR_DBM = -120.0


@dataclass(frozen=True)
class MeasurementReport:
    """A single UE measurement report.

    ``neighbors`` is a tuple of (cell_id, rsrp_dbm), strictly sorted by
    descending RSRP with ascending-id tie-break, excluding the serving
    cell; every listed value is at or above the reporting floor.
    """

    time: float
    ue_height: float
    above_threshold: bool
    serving_cell: int
    serving_rsrp: float
    neighbors: tuple
    trigger: str = "A3"  # A3 | H1 | H2 | periodic

    def __post_init__(self):
        object.__setattr__(self, "neighbors", tuple(tuple(n) for n in self.neighbors))
        ids = [cid for cid, _ in self.neighbors]
        if self.serving_cell in ids:
            raise InvalidParameterError("neighbors must exclude the serving cell")
        if len(ids) != len(set(ids)):
            raise InvalidParameterError("duplicate neighbor cell in report")
        keys = [(-r, cid) for cid, r in self.neighbors]
        if keys != sorted(keys):
            raise InvalidParameterError(
                "neighbors must be sorted by descending rsrp with id tie-break"
            )

    @property
    def best_neighbor(self):
        return self.neighbors[0] if self.neighbors else None

    def contains(self, cell_id: int, noise_floor_dbm: float) -> bool:
        """Whether a cell is 'included in the report': a listed neighbor, or
        the serving cell itself received at or above the floor."""
        if any(cid == cell_id for cid, _ in self.neighbors):
            return True
        return cell_id == self.serving_cell and self.serving_rsrp >= noise_floor_dbm


@dataclass(frozen=True)
class HandoverPolicy:
    kind: str = "baseline"  # baseline | bcs
    group_id: str | None = None
    predefined_height: float = 300.0

    def __post_init__(self):
        if self.kind not in ("baseline", "bcs"):
            raise InvalidParameterError(f"unknown policy kind {self.kind!r}")
        if self.kind == "bcs" and not self.group_id:
            raise InvalidParameterError("bcs policy requires a group_id")


@dataclass(frozen=True)
class HandoverDecision:
    outcome: str  # execute | ignore
    target: int | None = None
    reason: str | None = None

    def to_dict(self) -> dict:
        return {"outcome": self.outcome, "target": self.target, "reason": self.reason}


def _check_report_cells(report: MeasurementReport, network: Network) -> None:
    network.cell(report.serving_cell)
    for cid, _ in report.neighbors:
        network.cell(cid)


def _execute(target: int, serving: int, reason=None) -> HandoverDecision:
    if target == serving:
        raise InvalidParameterError("execute target must differ from the serving cell")
    return HandoverDecision("execute", target=target, reason=reason)


def evaluate_mr(
    report: MeasurementReport,
    network: Network,
    policy: HandoverPolicy,
    noise_floor_dbm: float = DEFAULT_NOISE_FLOOR_DBM,
) -> HandoverDecision:
    """Decide what to do with one measurement report; total over all
    well-formed reports."""
    _check_report_cells(report, network)

    if policy.kind == "baseline":
        if report.neighbors:
            return _execute(report.neighbors[0][0], report.serving_cell)
        return HandoverDecision("ignore", reason="serving-is-best")

    group = network.group(policy.group_id)

    if not report.above_threshold:
        # terrestrial UEs keep plain strongest-cell behavior
        if report.neighbors:
            return _execute(report.neighbors[0][0], report.serving_cell,
                            reason="below-height-passthrough")
        return HandoverDecision("ignore", reason="serving-is-best")

    if not report.neighbors:
        return HandoverDecision("ignore", reason="serving-is-best")

    best_id, _ = report.neighbors[0]
    if best_id not in group.aerial_cells:
        if best_id in network.aerial_cells_of_any_group():
            return HandoverDecision("ignore", reason="not-in-group")
        return HandoverDecision("ignore", reason="best-not-aerial-coverage-cell")

    indication = group.indication_for(best_id)
    if not report.contains(indication, noise_floor_dbm):
        return HandoverDecision("ignore", reason="indication-cell-missing")
    return _execute(best_id, report.serving_cell)


def eligible_targets(
    report: MeasurementReport,
    network: Network,
    policy: HandoverPolicy,
    noise_floor_dbm: float = DEFAULT_NOISE_FLOOR_DBM,
) -> list:
    """Neighbors that would yield an execute decision if they were the
    strongest, in descending RSRP order."""
    _check_report_cells(report, network)
    if policy.kind == "baseline" or not report.above_threshold:
        return [cid for cid, _ in report.neighbors]
    group = network.group(policy.group_id)
    out = []
    for cid, _ in report.neighbors:
        if cid not in group.aerial_cells:
            continue
        if report.contains(group.indication_for(cid), noise_floor_dbm):
            out.append(cid)
    return out
