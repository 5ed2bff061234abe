"""A3-event handover evaluation with per-neighbor hysteresis and time-to-trigger."""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from backend.simulation.mobility import UeState
from backend.simulation.radio_model import Measurement

logger = logging.getLogger(__name__)

CAUSE_A3 = "a3"
CAUSE_MLB = "mlb-induced-a3"

# Slack on the TTT comparison so accumulated float ticks reach the threshold
TTT_EPSILON = 1e-9


class HandoverParams(BaseModel):
    """A3 hysteresis and time-to-trigger."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    default_hysteresis: float = Field(3.0, ge=0)  # dB
    ttt: float = Field(0.256, ge=0)  # s


@dataclass(frozen=True)
class HandoverEvent:
    """One executed (or to-be-executed) handover."""

    ue_id: int
    source: int
    target: int
    timestamp: float
    cause: str
    effective_hysteresis_used: float

    def __post_init__(self):
        if self.source == self.target:
            raise ValueError(f"Handover of UE {self.ue_id} has identical source and target {self.source}")


class HysteresisTable:
    """Effective hysteresis Th_Hys(serving, neighbor) for every sector pair.

    Rows are serving sectors, columns neighbors. The raw (unquantized) value
    written by the MLB controller is kept next to the effective one.
    """

    def __init__(self, num_sectors: int, default_hysteresis: float):
        self.num_sectors = num_sectors
        self.default = default_hysteresis
        self.values = np.full((num_sectors, num_sectors), default_hysteresis, dtype=float)
        self.raw = self.values.copy()

    def get(self, serving: int, neighbor: int) -> float:
        return float(self.values[serving, neighbor])

    def row(self, serving: int) -> np.ndarray:
        return self.values[serving].copy()

    def set(self, serving: int, neighbor: int, value: float, raw: Optional[float] = None) -> bool:
        """Write one entry; returns True if the effective value changed."""
        if serving == neighbor:
            raise ValueError(f"No hysteresis entry for a sector toward itself ({serving})")
        if not 0.0 <= value <= self.default:
            raise ValueError(f"Hysteresis {value} dB outside [0, {self.default}] dB")

        changed = self.values[serving, neighbor] != value
        self.values[serving, neighbor] = value
        self.raw[serving, neighbor] = value if raw is None else raw
        return bool(changed)

    def is_default(self, serving: int) -> bool:
        return bool(np.all(self.values[serving] == self.default))


class A3Timer:
    """Per (UE, neighbor) seconds the A3 condition has held continuously."""

    def __init__(self, num_ues: int, num_sectors: int):
        self.elapsed = np.zeros((num_ues, num_sectors), dtype=float)

    def reset(self, ue_id: int) -> None:
        self.elapsed[ue_id] = 0.0


def a3_condition(rsrp_serving, rsrp_neighbor, hysteresis):
    """A3 entry condition: neighbor exceeds serving by strictly more than the hysteresis.

    Works on scalars and numpy arrays alike.
    """
    return np.greater(np.subtract(rsrp_neighbor, rsrp_serving), hysteresis)


def _advance_timers(
    elapsed: np.ndarray,
    rsrp: np.ndarray,
    serving: np.ndarray,
    hysteresis: np.ndarray,
    ttt: float,
    dt: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """Accumulate or reset TTT timers for a batch of UEs.

    Args:
        elapsed: Timer rows (ues x sectors)
        rsrp: RSRP rows in dBm (ues x sectors)
        serving: Serving sector per UE
        hysteresis: Effective hysteresis rows toward each neighbor (ues x sectors)
        ttt: Time to trigger in seconds
        dt: Tick length in seconds

    Returns:
        Tuple of (updated timer rows, matured mask)
    """
    rows = np.arange(rsrp.shape[0])
    holds = a3_condition(rsrp[rows, serving][:, np.newaxis], rsrp, hysteresis)
    holds[rows, serving] = False

    matured = holds & (elapsed + dt >= ttt - TTT_EPSILON)
    updated = np.where(holds, np.minimum(elapsed + dt, ttt), 0.0)
    return updated, matured


def _pick_target(rsrp_row: np.ndarray, matured_row: np.ndarray) -> int:
    """Strongest matured neighbor; RSRP ties go to the lowest sector id."""
    candidates = np.where(matured_row, rsrp_row, -np.inf)
    return int(np.argmax(candidates))


def _make_event(
    ue_id: int, source: int, target: int, timestamp: float, hysteresis_used: float, params: HandoverParams
) -> HandoverEvent:
    cause = CAUSE_MLB if hysteresis_used < params.default_hysteresis else CAUSE_A3
    return HandoverEvent(
        ue_id=ue_id,
        source=source,
        target=target,
        timestamp=timestamp,
        cause=cause,
        effective_hysteresis_used=hysteresis_used,
    )


def update_a3(
    ue: UeState,
    measurement: Measurement,
    hys_table: HysteresisTable,
    params: HandoverParams,
    dt: float,
    timer: A3Timer,
) -> Optional[HandoverEvent]:
    """Advance one UE's TTT timers and emit a handover when one matures.

    Args:
        ue: UE state (ue_id indexes the timer; serving_sector is the source)
        measurement: Measurement of this tick covering every sector
        hys_table: Effective hysteresis table
        params: Handover parameters
        dt: Tick length in seconds
        timer: TTT accumulators

    Returns:
        HandoverEvent, or None if no neighbor matured this tick
    """
    ue_id, serving = ue.ue_id, ue.serving_sector
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if measurement.rsrp.shape[0] != hys_table.num_sectors:
        raise ValueError(f"Measurement of UE {ue_id} does not cover all {hys_table.num_sectors} sectors")

    updated, matured = _advance_timers(
        timer.elapsed[ue_id : ue_id + 1],
        measurement.rsrp[np.newaxis, :],
        np.array([serving]),
        hys_table.values[serving][np.newaxis, :],
        params.ttt,
        dt,
    )
    timer.elapsed[ue_id] = updated[0]

    if not matured[0].any():
        return None

    target = _pick_target(measurement.rsrp, matured[0])
    timer.reset(ue_id)
    return _make_event(ue_id, serving, target, measurement.timestamp, hys_table.get(serving, target), params)


def update_a3_all(
    rsrp: np.ndarray,
    serving: np.ndarray,
    hys_table: HysteresisTable,
    params: HandoverParams,
    dt: float,
    timer: A3Timer,
    timestamp: float,
) -> List[HandoverEvent]:
    """Batch form of update_a3 over every UE of the run (UE id = row index).

    Returns:
        Events in ue_id order
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")

    hysteresis = hys_table.values[serving]
    timer.elapsed, matured = _advance_timers(timer.elapsed, rsrp, serving, hysteresis, params.ttt, dt)

    events = []
    for ue_id in np.flatnonzero(matured.any(axis=1)):
        target = _pick_target(rsrp[ue_id], matured[ue_id])
        timer.reset(ue_id)
        events.append(
            _make_event(int(ue_id), int(serving[ue_id]), target, timestamp, float(hysteresis[ue_id, target]), params)
        )
    return events


def execute_handover(event: HandoverEvent, serving: np.ndarray, num_sectors: int) -> bool:
    """Apply a handover to the attachment vector.

    Args:
        event: Handover to execute
        serving: Serving sector per UE, updated in place
        num_sectors: Number of sectors in the scenario

    Returns:
        True if the handover was executed and counts as successful
    """
    if not 0 <= event.target < num_sectors:
        raise ValueError(f"Handover target {event.target} does not exist")
    if serving[event.ue_id] == event.target:
        logger.warning(f"Ignoring handover of UE {event.ue_id} to its own serving sector {event.target}")
        return False

    serving[event.ue_id] = event.target
    return True


def execute_handovers(
    events: Sequence[HandoverEvent], serving: np.ndarray, num_sectors: int
) -> List[HandoverEvent]:
    """Apply a tick's handovers serially in ue_id order; returns the executed ones."""
    return [e for e in sorted(events, key=lambda e: e.ue_id) if execute_handover(e, serving, num_sectors)]
