"""Scenario run service: runs scenarios and keeps their KPI summaries in the database."""

import logging
from typing import Any, Dict, List, Optional

from sqlalchemy.orm import Session

from backend.config.scenario import ScenarioConfig
from backend.database.models import SimulationRun
from backend.scenarios.predefined_scenarios import preset_config
from backend.simulation.engine import SimulationResult, run

logger = logging.getLogger(__name__)


class ScenarioService:
    """Service for running and storing simulations."""

    def __init__(self, db: Session):
        """Initialize scenario service.

        Args:
            db: Database session
        """
        self.db = db

    def store(self, result: SimulationResult) -> SimulationRun:
        """Persist the KPI summary of a finished run."""
        summary = result.summary()
        record = SimulationRun(
            scenario=summary["scenario"],
            algorithm=summary["algorithm"],
            beta_variant=summary["beta_variant"],
            ue_count=summary["ue_count"],
            seed=summary["seed"],
            duration=result.config.duration,
            throughput_mbps=summary["throughput_mbps"],
            loss_ratio=summary["loss_ratio"],
            ho_count=summary["ho_count"],
            sector_throughput_mbps=summary["sector_throughput_mbps"],
            control_messages=summary["control_messages"],
            config=result.config.model_dump(mode="json"),
            execution_time_seconds=result.execution_time_seconds,
        )
        self.db.add(record)
        self.db.commit()
        self.db.refresh(record)

        logger.info(f"Stored run {record.id} ({record.scenario}, {record.algorithm}, {record.ue_count} UEs)")
        return record

    def run_and_store(self, config: ScenarioConfig) -> SimulationRun:
        """Run one scenario and persist its summary.

        Args:
            config: Validated scenario configuration

        Returns:
            Stored SimulationRun
        """
        return self.store(run(config))

    def run_preset(self, name: str, overrides: Optional[Dict[str, Any]] = None) -> SimulationRun:
        """Run a predefined scenario with optional overrides.

        Raises:
            ValueError: If the preset is unknown or the overrides are invalid
        """
        logger.info(f"Running preset scenario: {name}")
        return self.run_and_store(preset_config(name, **(overrides or {})))

    def list_runs(
        self, algorithm: Optional[str] = None, ue_count: Optional[int] = None, limit: int = 100
    ) -> List[SimulationRun]:
        """List stored runs, newest first.

        Args:
            algorithm: Optional algorithm filter
            ue_count: Optional UE count filter
            limit: Maximum number of runs to return

        Returns:
            List of SimulationRun objects
        """
        query = self.db.query(SimulationRun)

        if algorithm:
            query = query.filter(SimulationRun.algorithm == algorithm)
        if ue_count is not None:
            query = query.filter(SimulationRun.ue_count == ue_count)

        return query.order_by(SimulationRun.run_date.desc(), SimulationRun.id.desc()).limit(limit).all()

    def get_run(self, run_id: int) -> Optional[SimulationRun]:
        """Get a stored run by ID, or None if not found."""
        return self.db.query(SimulationRun).filter(SimulationRun.id == run_id).first()
