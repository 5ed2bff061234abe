"""Scenario configuration: one validated document per simulation run."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, ValidationInfo, field_validator

from backend.simulation.cell_scheduler import SchedulerParams
from backend.simulation.handover_engine import HandoverParams
from backend.simulation.mlb_controller import Algorithm, BetaVariant, MlbThresholds
from backend.simulation.mobility import MobilityParams
from backend.simulation.radio_model import RadioParams

logger = logging.getLogger(__name__)


class ScenarioConfig(BaseModel):
    """Everything a single simulation run depends on."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "default"
    duration: float = Field(100.0, gt=0)  # s
    tick: float = Field(0.01, gt=0)  # s
    mlb_period: float = Field(0.2, gt=0)  # s
    ue_count: int = Field(37, ge=1)
    algorithm: Algorithm = "none"
    beta_variant: BetaVariant = "literal"
    hysteresis_step: float = Field(0.5, gt=0)  # dB
    seed: int = Field(0, ge=0)

    thresholds: MlbThresholds = MlbThresholds()
    handover: HandoverParams = HandoverParams()
    radio: RadioParams = RadioParams()
    mobility: MobilityParams = MobilityParams()
    scheduler: SchedulerParams = SchedulerParams()

    @field_validator("mlb_period")
    @classmethod
    def _period_covers_tick(cls, value: float, info: ValidationInfo) -> float:
        tick = info.data.get("tick")
        if tick is not None and value < tick:
            raise ValueError(f"mlb_period ({value}) must be at least one tick ({tick})")
        return value

    @property
    def num_ticks(self) -> int:
        """Ticks in the run (duration / tick, rounded to the nearest integer)."""
        return max(1, int(round(self.duration / self.tick)))

    @property
    def ticks_per_mlb_period(self) -> int:
        return max(1, int(round(self.mlb_period / self.tick)))


def deep_merge(base: Dict[str, Any], overrides: Mapping[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, Mapping) and isinstance(merged.get(key), Mapping):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def build_scenario_config(data: Optional[Mapping[str, Any]] = None, **overrides: Any) -> ScenarioConfig:
    """Validate a configuration mapping with optional overrides on top.

    Args:
        data: Configuration document (keys mirror ScenarioConfig)
        **overrides: Values that win over `data`; None values are ignored

    Returns:
        Validated ScenarioConfig

    Raises:
        ValueError: naming the first offending dotted key
    """
    merged = deep_merge(dict(data or {}), overrides)
    try:
        return ScenarioConfig.model_validate(merged)
    except ValidationError as e:
        error = e.errors()[0]
        key = ".".join(str(part) for part in error["loc"]) or "<root>"
        raise ValueError(f"Invalid scenario config key '{key}': {error['msg']}") from e


def load_scenario_config(path: Optional[Union[str, Path]] = None, **overrides: Any) -> ScenarioConfig:
    """Load a JSON scenario file (if given) and apply overrides.

    Args:
        path: Optional path to a JSON document
        **overrides: Values that win over the file

    Returns:
        Validated ScenarioConfig
    """
    data: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except OSError as e:
            raise OSError(f"Cannot read scenario config {path}: {e}") from e
        except json.JSONDecodeError as e:
            raise ValueError(f"Scenario config {path} is not valid JSON: {e}") from e
        if not isinstance(data, dict):
            raise ValueError(f"Scenario config {path} must contain a JSON object")
        logger.info(f"Loaded scenario config from {path}")

    return build_scenario_config(data, **overrides)
