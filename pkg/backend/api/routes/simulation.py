"""Simulation API routes."""

import json
import logging
from typing import Any, Dict, List, Optional

from fastapi import APIRouter, Depends, HTTPException
from pydantic import BaseModel, Field
from sqlalchemy.orm import Session

from backend.config.scenario import build_scenario_config
from backend.database import get_db
from backend.scenarios.scenario_service import ScenarioService
from backend.simulation.scenario_matrix import evaluate_trends, run_matrix

logger = logging.getLogger(__name__)

router = APIRouter()


class SimulationRequest(BaseModel):
    """Request model for a single run: top-level shortcuts plus any nested config keys."""

    algorithm: Optional[str] = None
    beta_variant: Optional[str] = None
    ue_count: Optional[int] = None
    seed: Optional[int] = None
    duration: Optional[float] = None
    config: Dict[str, Any] = Field(default_factory=dict)

    def overrides(self) -> Dict[str, Any]:
        return self.model_dump(exclude={"config"}, exclude_none=True)


class MatrixRequest(BaseModel):
    """Request model for a scenario matrix."""

    algorithms: List[str] = Field(default_factory=lambda: ["none", "mlb1", "mlb2"], min_length=1)
    ue_counts: List[int] = Field(default_factory=lambda: [37, 56, 75], min_length=1)
    seeds: List[int] = Field(default_factory=lambda: [0], min_length=1)
    workers: int = Field(1, ge=1)
    config: Dict[str, Any] = Field(default_factory=dict)


class RunSummary(BaseModel):
    """Response model for a stored run."""

    id: int
    scenario: str
    algorithm: str
    beta_variant: str
    ue_count: int
    seed: int
    duration: float
    throughput_mbps: float
    loss_ratio: float
    ho_count: int
    sector_throughput_mbps: List[float]
    control_messages: int
    execution_time_seconds: Optional[float] = None


@router.post("/run", response_model=RunSummary)
def run_simulation(request: SimulationRequest, db: Session = Depends(get_db)):
    """Run one scenario and store its KPI summary.

    Args:
        request: Scenario overrides
        db: Database session

    Returns:
        KPI summary of the stored run
    """
    try:
        config = build_scenario_config(request.config, **request.overrides())
        logger.info(f"API run: {config.algorithm}, {config.ue_count} UEs, seed {config.seed}")
        record = ScenarioService(db).run_and_store(config)
        return RunSummary(**record.to_dict())

    except ValueError as e:
        logger.error(f"Rejected simulation request: {e}")
        raise HTTPException(status_code=422, detail=str(e))
    except Exception as e:
        logger.error(f"Simulation failed: {e}")
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/matrix")
def run_simulation_matrix(request: MatrixRequest):
    """Run algorithms x densities x paired seeds.

    Returns:
        Per-run rows, aggregate rows and the density-trend checks
    """
    try:
        base = build_scenario_config(request.config)
        matrix = run_matrix(base, request.algorithms, request.ue_counts, request.seeds, workers=request.workers)
        trends = evaluate_trends(matrix.runs)

        return {
            "runs": json.loads(matrix.runs.to_json(orient="records")),
            "aggregates": json.loads(matrix.aggregates.to_json(orient="records")),
            "trends": [
                {"claim": check.claim, "holds": check.holds, "detail": check.detail} for check in trends.checks
            ],
        }

    except ValueError as e:
        logger.error(f"Rejected matrix request: {e}")
        raise HTTPException(status_code=422, detail=str(e))
    except Exception as e:
        logger.error(f"Matrix failed: {e}")
        raise HTTPException(status_code=500, detail=str(e))
