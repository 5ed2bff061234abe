"""Main simulation engine: the tick loop wiring radio, mobility, handover, scheduling and MLB."""

import logging
import time
from dataclasses import dataclass, field, replace
from typing import Dict, List

import numpy as np
import pandas as pd

from backend.config.scenario import ScenarioConfig
from backend.simulation.cell_scheduler import Flow, LoadMeter, allocate, mcs_from_sinr
from backend.simulation.handover_engine import (
    A3Timer,
    HandoverEvent,
    HysteresisTable,
    execute_handovers,
    update_a3_all,
)
from backend.simulation.mlb_controller import MeasurementControlMessage, MlbController
from backend.simulation.mobility import MobilityModel, init_ues, region_around_sites
from backend.simulation.radio_model import RadioModel, build_sectors

logger = logging.getLogger(__name__)

SECTOR_LOAD_COLUMNS = ["time", "sector", "offered_bits", "served_bits", "lost_bits", "granted_prbs", "v_ar", "ratio"]


@dataclass
class KpiRecord:
    """Run-level KPIs plus the per-tick series they are built from."""

    throughput_mbps: float
    sector_throughput_mbps: List[float]
    loss_ratio: float
    ho_count: int
    offered_bits: float
    served_bits: float
    lost_bits: float
    timeseries: pd.DataFrame = field(repr=False)


@dataclass
class SimulationResult:
    """Everything a run produces."""

    config: ScenarioConfig
    kpis: KpiRecord
    handovers: List[HandoverEvent]
    control_messages: List[MeasurementControlMessage]
    mlb_decisions: pd.DataFrame = field(repr=False)
    sector_load: pd.DataFrame = field(repr=False)
    trajectories: np.ndarray = field(repr=False)  # (mlb periods, ues, 2)
    ticks: int = 0
    execution_time_seconds: float = 0.0

    def summary(self) -> Dict:
        """Flat KPI summary used by the exporters, the API and the run store."""
        return {
            "scenario": self.config.name,
            "algorithm": self.config.algorithm,
            "beta_variant": self.config.beta_variant,
            "ue_count": self.config.ue_count,
            "seed": self.config.seed,
            "throughput_mbps": self.kpis.throughput_mbps,
            "loss_ratio": self.kpis.loss_ratio,
            "ho_count": self.kpis.ho_count,
            "sector_throughput_mbps": list(self.kpis.sector_throughput_mbps),
            "control_messages": len(self.control_messages),
            "ticks": self.ticks,
        }


class SimulationEngine:
    """Runs one scenario tick by tick.

    Order inside a tick: mobility, measurements, A3 timers and handovers,
    scheduling, KPI accounting. MLB runs after scheduling on period
    boundaries using that period's averaged loads. Flows follow a handover
    from the next tick on.
    """

    def __init__(self, config: ScenarioConfig):
        """Initialize simulation engine.

        Args:
            config: Validated scenario configuration
        """
        self.config = config
        radio_params = config.radio

        self.sectors = build_sectors(
            inter_site_distance=radio_params.inter_site_distance,
            first_azimuth=radio_params.first_azimuth,
            tx_power=radio_params.tx_power,
            total_prbs=radio_params.total_prbs,
        )
        self.num_sectors = len(self.sectors)
        self.region = region_around_sites(self.sectors, config.mobility.region_margin)
        self.radio = RadioModel(self.sectors, radio_params, config.ue_count, config.seed)

        ues = init_ues(config.ue_count, self.region, config.seed, self.radio, config.mobility.speed)
        self.mobility = MobilityModel(ues, self.region, config.mobility, config.seed)
        self.serving = np.array([ue.serving_sector for ue in ues], dtype=int)
        self.flows = [Flow(ue.ue_id, config.scheduler.traffic_rate_bps, ue.serving_sector) for ue in ues]

        self.table = HysteresisTable(self.num_sectors, config.handover.default_hysteresis)
        self.timer = A3Timer(config.ue_count, self.num_sectors)
        self.load_meter = LoadMeter(self.num_sectors, radio_params.total_prbs)
        self.controllers = [
            MlbController(
                sector_id=s.sector_id,
                neighbors=[n.sector_id for n in self.sectors if n.sector_id != s.sector_id],
                thresholds=config.thresholds,
                base_hysteresis=config.handover.default_hysteresis,
                algorithm=config.algorithm,
                beta_variant=config.beta_variant,
                step=config.hysteresis_step,
            )
            for s in self.sectors
        ]

        self.handovers: List[HandoverEvent] = []
        self.control_messages: List[MeasurementControlMessage] = []

    def run(self) -> SimulationResult:
        """Run the scenario to completion.

        Returns:
            SimulationResult with KPIs and logs
        """
        config = self.config
        dt = config.tick
        num_ticks = config.num_ticks
        per_period = config.ticks_per_mlb_period
        scheduler = config.scheduler
        total_prbs = config.radio.total_prbs

        logger.info(
            f"Running scenario '{config.name}': algorithm={config.algorithm} ({config.beta_variant}), "
            f"{config.ue_count} UEs, seed={config.seed}, {num_ticks} ticks"
        )
        started = time.perf_counter()

        offered = np.zeros((num_ticks, self.num_sectors))
        served = np.zeros((num_ticks, self.num_sectors))
        lost = np.zeros((num_ticks, self.num_sectors))
        granted = np.zeros((num_ticks, self.num_sectors), dtype=int)
        free = np.zeros((num_ticks, self.num_sectors), dtype=int)
        tick_handovers = np.zeros(num_ticks, dtype=int)
        trajectories = []

        for k in range(num_ticks):
            now = (k + 1) * dt

            self.mobility.advance(dt)
            positions = self.mobility.positions
            rsrp, sinr_values = self.radio.measure(positions, self.serving)

            events = update_a3_all(rsrp, self.serving, self.table, config.handover, dt, self.timer, now)
            executed = execute_handovers(events, self.serving, self.num_sectors)
            self.handovers.extend(executed)
            tick_handovers[k] = len(executed)

            mcs = [mcs_from_sinr(s, scheduler.sinr_thresholds, scheduler.tier_mcs) for s in sinr_values]
            members: Dict[int, List[int]] = {s: [] for s in range(self.num_sectors)}
            for ue_id, flow in enumerate(self.flows):
                members[flow.sector_id].append(ue_id)

            for sector_id, ue_ids in members.items():
                result = allocate(sector_id, [self.flows[i] for i in ue_ids], [mcs[i] for i in ue_ids], dt, total_prbs)
                offered[k, sector_id] = sum(self.flows[i].offered_rate for i in ue_ids) * dt
                served[k, sector_id] = result.total_served
                lost[k, sector_id] = result.total_lost
                granted[k, sector_id] = result.total_granted
                free[k, sector_id] = result.v_ar

            for event in executed:
                self.flows[event.ue_id] = replace(self.flows[event.ue_id], sector_id=event.target)

            self.load_meter.record(free[k])
            if (k + 1) % per_period == 0:
                self._run_mlb(now)
                trajectories.append(positions.copy())

        elapsed = time.perf_counter() - started
        kpis = self._kpis(offered, served, lost, tick_handovers, num_ticks * dt)
        logger.info(
            f"Scenario '{config.name}' finished in {elapsed:.1f}s: throughput {kpis.throughput_mbps:.3f} Mbps, "
            f"loss ratio {kpis.loss_ratio:.4f}, {kpis.ho_count} handovers"
        )

        return SimulationResult(
            config=config,
            kpis=kpis,
            handovers=self.handovers,
            control_messages=self.control_messages,
            mlb_decisions=self._decision_frame(),
            sector_load=self._sector_load_frame(offered, served, lost, granted, free, dt),
            trajectories=np.array(trajectories).reshape(-1, config.ue_count, 2),
            ticks=num_ticks,
            execution_time_seconds=elapsed,
        )

    def _run_mlb(self, now: float) -> None:
        """Exchange the period's load reports and run every controller in sector order."""
        reports = {r.sector_id: r for r in self.load_meter.reports()}
        for controller in self.controllers:
            neighbor_reports = {n: reports[n] for n in controller.neighbors}
            message = controller.tick(reports[controller.sector_id], neighbor_reports, self.table, now)
            if message is not None:
                recipients = tuple(int(u) for u in np.flatnonzero(self.serving == controller.sector_id))
                self.control_messages.append(replace(message, recipients=recipients))

            if controller.state.phase == "inactive" and not self.table.is_default(controller.sector_id):
                raise RuntimeError(f"Sector {controller.sector_id} is inactive but its hysteresis table is not default")

    def _kpis(
        self,
        offered: np.ndarray,
        served: np.ndarray,
        lost: np.ndarray,
        tick_handovers: np.ndarray,
        duration: float,
    ) -> KpiRecord:
        offered_total = float(offered.sum())
        served_total = float(served.sum())
        lost_total = float(lost.sum())
        timeseries = pd.DataFrame(
            {
                "time": (np.arange(offered.shape[0]) + 1) * self.config.tick,
                "offered_bits": offered.sum(axis=1),
                "served_bits": served.sum(axis=1),
                "lost_bits": lost.sum(axis=1),
                "handovers": tick_handovers,
            }
        )
        return KpiRecord(
            throughput_mbps=served_total / duration / 1e6,
            sector_throughput_mbps=(served.sum(axis=0) / duration / 1e6).tolist(),
            loss_ratio=lost_total / offered_total if offered_total > 0 else 0.0,
            ho_count=len(self.handovers),
            offered_bits=offered_total,
            served_bits=served_total,
            lost_bits=lost_total,
            timeseries=timeseries,
        )

    def _sector_load_frame(
        self,
        offered: np.ndarray,
        served: np.ndarray,
        lost: np.ndarray,
        granted: np.ndarray,
        free: np.ndarray,
        dt: float,
    ) -> pd.DataFrame:
        num_ticks, num_sectors = offered.shape
        total = self.config.radio.total_prbs
        return pd.DataFrame(
            {
                "time": np.repeat((np.arange(num_ticks) + 1) * dt, num_sectors),
                "sector": np.tile(np.arange(num_sectors), num_ticks),
                "offered_bits": offered.ravel(),
                "served_bits": served.ravel(),
                "lost_bits": lost.ravel(),
                "granted_prbs": granted.ravel(),
                "v_ar": free.ravel(),
                "ratio": free.ravel() / total,
            },
            columns=SECTOR_LOAD_COLUMNS,
        )

    def _decision_frame(self) -> pd.DataFrame:
        rows = [row for controller in self.controllers for row in controller.decisions]
        frame = pd.DataFrame(rows)
        if frame.empty:
            return frame
        return frame.sort_values(["timestamp", "sector", "neighbor"], kind="stable").reset_index(drop=True)


def run(config: ScenarioConfig) -> SimulationResult:
    """Run one scenario."""
    return SimulationEngine(config).run()
