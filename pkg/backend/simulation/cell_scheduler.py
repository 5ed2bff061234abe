"""Per-sector downlink PRB scheduler with three-tier link adaptation."""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from backend.simulation.mlb_controller import LoadReport

logger = logging.getLogger(__name__)

# Total cell capacity for 5 MHz (25 PRBs) per modulation class
REFERENCE_PRBS = 25
MCS_CLASSES: Tuple[Tuple[str, int, int, float], ...] = (
    ("QPSK", 0, 9, 13.2),
    ("16QAM", 10, 16, 26.4),
    ("64QAM", 17, 28, 39.6),
)
MAX_MCS = 28


class SchedulerParams(BaseModel):
    """Traffic and link adaptation settings."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    traffic_rate_bps: float = Field(1e6, gt=0)  # constant offered load per UE
    sinr_thresholds: Tuple[float, float] = (5.0, 14.0)  # dB, QPSK|16QAM and 16QAM|64QAM
    tier_mcs: Tuple[int, int, int] = (5, 12, 20)

    @model_validator(mode="after")
    def _check_tiers(self) -> "SchedulerParams":
        low, high = self.sinr_thresholds
        if not low < high:
            raise ValueError(f"sinr_thresholds must be increasing, got {self.sinr_thresholds}")
        for expected, mcs in zip(("QPSK", "16QAM", "64QAM"), self.tier_mcs):
            if mcs_class(mcs) != expected:
                raise ValueError(f"tier_mcs value {mcs} is not a {expected} index")
        return self


@dataclass(frozen=True)
class Flow:
    """Constant-rate downlink flow of one UE."""

    ue_id: int
    offered_rate: float  # bit/s
    sector_id: int

    def __post_init__(self):
        if self.offered_rate <= 0:
            raise ValueError(f"Flow of UE {self.ue_id} must have a positive offered rate")


@dataclass
class AllocationResult:
    """Outcome of one sector's allocation for one tick."""

    sector_id: int
    granted: Dict[int, int] = field(default_factory=dict)
    served_bits: Dict[int, float] = field(default_factory=dict)
    lost_bits: Dict[int, float] = field(default_factory=dict)
    v_ar: int = REFERENCE_PRBS
    v_tr: int = REFERENCE_PRBS

    @property
    def total_granted(self) -> int:
        return sum(self.granted.values())

    @property
    def total_served(self) -> float:
        return sum(self.served_bits.values())

    @property
    def total_lost(self) -> float:
        return sum(self.lost_bits.values())

    @property
    def ratio(self) -> float:
        return self.v_ar / self.v_tr


def _class_row(mcs: int) -> Tuple[str, int, int, float]:
    for row in MCS_CLASSES:
        if row[1] <= mcs <= row[2]:
            return row
    raise ValueError(f"MCS index must be in 0..{MAX_MCS}, got {mcs}")


def mcs_class(mcs: int) -> str:
    """Modulation class of an MCS index."""
    return _class_row(mcs)[0]


def class_capacity_mbps(mcs: int) -> float:
    """Total 25-PRB cell capacity in Mbps for the class of `mcs`."""
    return _class_row(mcs)[3]


def prb_rate_bps(mcs: int) -> float:
    """Rate of one PRB in bit/s for the class of `mcs`."""
    return class_capacity_mbps(mcs) * 1e6 / REFERENCE_PRBS


def mcs_from_sinr(
    sinr: float, thresholds: Tuple[float, float] = (5.0, 14.0), tier_mcs: Tuple[int, int, int] = (5, 12, 20)
) -> int:
    """Pick the representative MCS of the tier the SINR falls in."""
    if not math.isfinite(sinr):
        raise ValueError(f"SINR must be finite, got {sinr}")
    if sinr < thresholds[0]:
        return tier_mcs[0]
    if sinr < thresholds[1]:
        return tier_mcs[1]
    return tier_mcs[2]


def prbs_required(flow: Flow, mcs: int, dt: float) -> int:
    """PRBs needed every tick to carry the flow's offered rate at `mcs`.

    The requirement is a rate ratio, so it does not depend on dt.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    return math.ceil(round(flow.offered_rate / prb_rate_bps(mcs), 9))


def allocate(
    sector_id: int,
    flows: Sequence[Flow],
    mcs: Sequence[int],
    dt: float,
    total_prbs: int = REFERENCE_PRBS,
) -> AllocationResult:
    """Round-robin PRB grant, one PRB per flow per round in ue_id order.

    Rounds continue until every requirement is met or the pool is empty.
    Unserved offered bits are lost immediately (no queueing).

    Args:
        sector_id: Sector being scheduled
        flows: Flows attached to the sector
        mcs: MCS index per flow (same order as flows)
        dt: Tick length in seconds
        total_prbs: PRB pool of the sector

    Returns:
        AllocationResult for the tick
    """
    order = sorted(range(len(flows)), key=lambda i: flows[i].ue_id)
    required = {flows[i].ue_id: prbs_required(flows[i], mcs[i], dt) for i in order}
    granted = {ue_id: 0 for ue_id in required}

    remaining = total_prbs
    pending = [ue_id for ue_id in required if required[ue_id] > 0]
    while remaining > 0 and pending:
        for ue_id in pending[:remaining]:
            granted[ue_id] += 1
        remaining -= min(remaining, len(pending))
        pending = [ue_id for ue_id in pending if granted[ue_id] < required[ue_id]]

    result = AllocationResult(sector_id=sector_id, v_tr=total_prbs)
    for i in order:
        flow = flows[i]
        offered = flow.offered_rate * dt
        share = min(granted[flow.ue_id], required[flow.ue_id]) / required[flow.ue_id]
        result.granted[flow.ue_id] = granted[flow.ue_id]
        result.served_bits[flow.ue_id] = share * offered
        result.lost_bits[flow.ue_id] = offered - share * offered
    result.v_ar = total_prbs - result.total_granted
    return result


class LoadMeter:
    """Averages each sector's free PRBs over an MLB period."""

    def __init__(self, num_sectors: int, total_prbs: int = REFERENCE_PRBS):
        self.total_prbs = total_prbs
        self._free = np.zeros(num_sectors, dtype=float)
        self._ticks = 0

    def record(self, free_prbs: Sequence[int]) -> None:
        self._free += np.asarray(free_prbs, dtype=float)
        self._ticks += 1

    def reports(self) -> List[LoadReport]:
        """Period-averaged load reports; starts a new period."""
        if self._ticks == 0:
            raise ValueError("No ticks recorded in this MLB period")
        mean_free = self._free / self._ticks
        reports = [
            LoadReport(sector_id=i, v_ar=float(min(value, self.total_prbs)), v_tr=float(self.total_prbs))
            for i, value in enumerate(mean_free)
        ]
        self._free[:] = 0.0
        self._ticks = 0
        return reports
