"""Scenario API routes: density presets and stored runs."""

import logging
from typing import Any, Dict, List, Optional

from fastapi import APIRouter, Depends, HTTPException
from pydantic import BaseModel, Field
from sqlalchemy.orm import Session

from backend.api.routes.simulation import RunSummary
from backend.database import get_db
from backend.scenarios.predefined_scenarios import PredefinedScenarios
from backend.scenarios.scenario_service import ScenarioService

logger = logging.getLogger(__name__)

router = APIRouter()


class PresetRunRequest(BaseModel):
    """Overrides applied on top of a preset."""

    overrides: Dict[str, Any] = Field(default_factory=dict)


@router.get("/presets")
async def get_presets():
    """Get all predefined density scenarios.

    Returns:
        List of preset definitions
    """
    return PredefinedScenarios.get_all_scenarios()


@router.post("/presets/{name}/run", response_model=RunSummary)
def run_preset(name: str, request: Optional[PresetRunRequest] = None, db: Session = Depends(get_db)):
    """Run a preset and store its KPI summary.

    Args:
        name: Preset name
        request: Optional overrides
        db: Database session
    """
    try:
        PredefinedScenarios.get_scenario_by_name(name)
    except ValueError as e:
        raise HTTPException(status_code=404, detail=str(e))

    try:
        record = ScenarioService(db).run_preset(name, request.overrides if request else None)
        return RunSummary(**record.to_dict())

    except ValueError as e:
        logger.error(f"Rejected preset run: {e}")
        raise HTTPException(status_code=422, detail=str(e))
    except Exception as e:
        logger.error(f"Failed to run preset {name}: {e}")
        raise HTTPException(status_code=500, detail=str(e))


@router.get("/runs", response_model=List[RunSummary])
async def list_runs(
    algorithm: Optional[str] = None,
    ue_count: Optional[int] = None,
    limit: int = 100,
    db: Session = Depends(get_db),
):
    """List stored runs with optional filtering."""
    try:
        return [RunSummary(**run.to_dict()) for run in ScenarioService(db).list_runs(algorithm, ue_count, limit)]

    except Exception as e:
        logger.error(f"Failed to list runs: {e}")
        raise HTTPException(status_code=500, detail=str(e))


@router.get("/runs/{run_id}")
async def get_run(run_id: int, db: Session = Depends(get_db)):
    """Get one stored run including its full configuration.

    Args:
        run_id: Run ID
        db: Database session
    """
    record = ScenarioService(db).get_run(run_id)
    if record is None:
        raise HTTPException(status_code=404, detail=f"Run {run_id} not found")
    return record.to_dict()
