"""Distributed per-sector mobility load balancing by hysteresis adaptation.

Each overloaded sector scales its handover hysteresis toward every neighbor
by a factor alpha that depends on how much of the neighbor's PRB pool is
free. Two ways of computing the middle-band factor are supported:

- mlb1: linear in the neighbor's free-resource ratio (literal or
  continuous slope, see `beta`)
- mlb2: fixed at one half
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Literal, Mapping, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from backend.simulation.handover_engine import HysteresisTable

logger = logging.getLogger(__name__)

Algorithm = Literal["none", "mlb1", "mlb2"]
BetaVariant = Literal["literal", "continuous"]
Phase = Literal["inactive", "active"]

MLB2_BETA = 0.5
HYSTERESIS_STEP = 0.5  # dB


class MlbThresholds(BaseModel):
    """Activation, acceptance and deactivation thresholds on the free-PRB ratio.

    th_pre may be 0, which disables activation entirely.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    th_pre: float = Field(0.2, ge=0, lt=1)
    th_avail: float = Field(0.3, gt=0, lt=1)
    th_post: float = Field(0.4, gt=0, lt=1)

    @model_validator(mode="after")
    def _ordered(self) -> "MlbThresholds":
        if not self.th_pre < self.th_avail < self.th_post:
            raise ValueError(
                f"thresholds must satisfy th_pre < th_avail < th_post, "
                f"got {self.th_pre}, {self.th_avail}, {self.th_post}"
            )
        return self


@dataclass(frozen=True)
class LoadReport:
    """Free and total PRBs of a sector over one MLB period."""

    sector_id: int
    v_ar: float
    v_tr: float

    def __post_init__(self):
        if self.v_tr <= 0:
            raise ValueError(f"Sector {self.sector_id}: total resources must be positive, got {self.v_tr}")
        if not 0 <= self.v_ar <= self.v_tr:
            raise ValueError(f"Sector {self.sector_id}: available resources {self.v_ar} outside [0, {self.v_tr}]")

    @property
    def ratio(self) -> float:
        return self.v_ar / self.v_tr


@dataclass
class MlbState:
    """Controller state of one sector."""

    sector_id: int
    algorithm: Algorithm = "none"
    beta_variant: BetaVariant = "literal"
    phase: Phase = "inactive"
    alpha: Dict[int, float] = field(default_factory=dict)


@dataclass(frozen=True)
class MeasurementControlMessage:
    """New per-neighbor hysteresis pushed to the UEs attached to a sector."""

    sector_id: int
    hysteresis: Dict[int, float]
    timestamp: float
    recipients: Tuple[int, ...] = ()


@dataclass(frozen=True)
class HysteresisUpdate:
    """One table entry to (re)write."""

    neighbor: int
    raw: float
    effective: float


def is_overloaded(report: LoadReport, th: MlbThresholds) -> bool:
    """Activation test: free ratio strictly below th_pre."""
    return report.ratio < th.th_pre


def should_deactivate(report: LoadReport, th: MlbThresholds) -> bool:
    """Deactivation test: free ratio strictly above th_post."""
    return report.ratio > th.th_post


def neighbor_eligible(report: LoadReport, th: MlbThresholds) -> bool:
    """Cooperation test: the neighbor's free ratio is strictly above th_avail."""
    return report.ratio > th.th_avail


def beta(ratio: float, th: MlbThresholds, algorithm: Algorithm, beta_variant: BetaVariant = "literal") -> float:
    """Middle-band scaling factor, clamped to [0, 1].

    The literal variant rises from 0 at th_avail to 1 at th_post; the
    continuous variant runs the other way so it meets the outer bands.
    """
    if algorithm == "mlb2":
        return MLB2_BETA
    if algorithm != "mlb1":
        raise ValueError(f"beta is undefined for algorithm '{algorithm}'")
    if th.th_avail == th.th_post:
        raise ValueError("th_avail and th_post must differ")

    if beta_variant == "literal":
        value = (th.th_avail - ratio) / (th.th_avail - th.th_post)
    elif beta_variant == "continuous":
        value = (th.th_post - ratio) / (th.th_post - th.th_avail)
    else:
        raise ValueError(f"Unknown beta variant: {beta_variant}")
    return min(max(value, 0.0), 1.0)


def alpha(ratio: float, th: MlbThresholds, algorithm: Algorithm, beta_variant: BetaVariant = "literal") -> float:
    """Hysteresis scaling factor toward a neighbor with free-resource ratio `ratio`.

    0 above th_post, beta within [th_avail, th_post], 1 below th_avail.
    """
    if ratio > th.th_post:
        return 0.0
    if ratio < th.th_avail:
        return 1.0
    return beta(ratio, th, algorithm, beta_variant)


def quantize_hysteresis(raw: float, step: float = HYSTERESIS_STEP) -> float:
    """Round to the nearest multiple of `step`; exact halves round toward zero."""
    units = math.ceil(round(raw / step, 9) - 0.5)
    return max(units, 0) * step


def effective_hysteresis(base: float, alpha_value: float, step: float = HYSTERESIS_STEP) -> float:
    """Scaled hysteresis alpha * base, quantized to the step grid and capped at base.

    A base that is not a multiple of `step` can round up past itself; the cap
    keeps the result inside the range the hysteresis table accepts.
    """
    if not 0.0 <= alpha_value <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha_value}")
    if base < 0:
        raise ValueError(f"base hysteresis must be non-negative, got {base}")
    return min(quantize_hysteresis(alpha_value * base, step), base)


def mlb_tick(
    state: MlbState,
    own_report: LoadReport,
    neighbor_reports: Mapping[int, LoadReport],
    neighbors: Sequence[int],
    th: MlbThresholds,
    base_hysteresis: float,
    current: Optional[Mapping[int, float]] = None,
    timestamp: float = 0.0,
    step: float = HYSTERESIS_STEP,
) -> Tuple[MlbState, List[HysteresisUpdate], Optional[MeasurementControlMessage]]:
    """One MLB period of a sector's controller.

    Args:
        state: Current controller state
        own_report: This sector's load report for the period
        neighbor_reports: Reports of the other sectors, keyed by sector_id
        neighbors: Neighbor sector ids
        th: MLB thresholds
        base_hysteresis: Default hysteresis in dB
        current: Effective hysteresis currently in force per neighbor (default everywhere if None)
        timestamp: Simulation time of the period boundary
        step: Hysteresis quantization step in dB

    Returns:
        Tuple of (new state, table updates, control message if any entry changes)
    """
    if state.algorithm == "none":
        return state, [], None

    current = current if current is not None else {}

    if state.phase == "active" and should_deactivate(own_report, th):
        new_state = replace(state, phase="inactive", alpha={})
        updates = [HysteresisUpdate(n, base_hysteresis, base_hysteresis) for n in neighbors]
        logger.debug(f"Sector {state.sector_id}: MLB deactivated at ratio {own_report.ratio:.3f}")
        return new_state, updates, _control_message(state.sector_id, updates, current, base_hysteresis, timestamp)

    phase = state.phase
    if phase == "inactive":
        if not is_overloaded(own_report, th):
            return state, [], None
        phase = "active"
        logger.debug(f"Sector {state.sector_id}: MLB activated at ratio {own_report.ratio:.3f}")

    alphas: Dict[int, float] = {}
    updates: List[HysteresisUpdate] = []
    for neighbor in neighbors:
        report = neighbor_reports.get(neighbor)
        if report is None:
            logger.warning(f"Sector {state.sector_id}: no load report from neighbor {neighbor}, treating as loaded")
            value = 1.0
        elif not neighbor_eligible(report, th):
            value = 1.0
        else:
            value = alpha(report.ratio, th, state.algorithm, state.beta_variant)
        alphas[neighbor] = value
        updates.append(
            HysteresisUpdate(neighbor, value * base_hysteresis, effective_hysteresis(base_hysteresis, value, step))
        )

    new_state = replace(state, phase=phase, alpha=alphas)
    return new_state, updates, _control_message(state.sector_id, updates, current, base_hysteresis, timestamp)


def _control_message(
    sector_id: int,
    updates: Sequence[HysteresisUpdate],
    current: Mapping[int, float],
    base_hysteresis: float,
    timestamp: float,
) -> Optional[MeasurementControlMessage]:
    """Message carrying the new table, only if some entry actually changes."""
    if all(u.effective == current.get(u.neighbor, base_hysteresis) for u in updates):
        return None
    return MeasurementControlMessage(
        sector_id=sector_id,
        hysteresis={u.neighbor: u.effective for u in updates},
        timestamp=timestamp,
    )


class MlbController:
    """Per-sector MLB controller applying its decisions to the shared hysteresis table."""

    def __init__(
        self,
        sector_id: int,
        neighbors: Sequence[int],
        thresholds: MlbThresholds,
        base_hysteresis: float,
        algorithm: Algorithm = "none",
        beta_variant: BetaVariant = "literal",
        step: float = HYSTERESIS_STEP,
    ):
        self.state = MlbState(sector_id=sector_id, algorithm=algorithm, beta_variant=beta_variant)
        self.neighbors = list(neighbors)
        self.thresholds = thresholds
        self.base_hysteresis = base_hysteresis
        self.step = step
        self.decisions: List[Dict] = []

    @property
    def sector_id(self) -> int:
        return self.state.sector_id

    def tick(
        self,
        own_report: LoadReport,
        neighbor_reports: Mapping[int, LoadReport],
        table: HysteresisTable,
        timestamp: float,
    ) -> Optional[MeasurementControlMessage]:
        """Run one MLB period and write the outcome into `table`.

        Returns:
            A MeasurementControlMessage if any table entry changed, else None
        """
        current = {n: table.get(self.sector_id, n) for n in self.neighbors}
        self.state, updates, message = mlb_tick(
            self.state,
            own_report,
            neighbor_reports,
            self.neighbors,
            self.thresholds,
            self.base_hysteresis,
            current=current,
            timestamp=timestamp,
            step=self.step,
        )

        for update in updates:
            table.set(self.sector_id, update.neighbor, update.effective, update.raw)

        self._log_decision(own_report, neighbor_reports, table, timestamp)
        return message

    def _log_decision(
        self,
        own_report: LoadReport,
        neighbor_reports: Mapping[int, LoadReport],
        table: HysteresisTable,
        timestamp: float,
    ) -> None:
        for neighbor in self.neighbors:
            report = neighbor_reports.get(neighbor)
            self.decisions.append(
                {
                    "timestamp": timestamp,
                    "sector": self.sector_id,
                    "phase": self.state.phase,
                    "own_ratio": own_report.ratio,
                    "neighbor": neighbor,
                    "neighbor_ratio": report.ratio if report is not None else None,
                    "alpha": self.state.alpha.get(neighbor),
                    "raw_hysteresis": float(table.raw[self.sector_id, neighbor]),
                    "effective_hysteresis": table.get(self.sector_id, neighbor),
                }
            )
