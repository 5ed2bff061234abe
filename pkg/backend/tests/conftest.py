"""Shared test fixtures for the backend test suite."""

import numpy as np
import pytest

from backend.config.scenario import build_scenario_config
from backend.simulation.handover_engine import HandoverParams, HysteresisTable
from backend.simulation.mlb_controller import LoadReport, MlbThresholds
from backend.simulation.mobility import Region, region_around_sites
from backend.simulation.radio_model import PathLossParams, RadioModel, RadioParams, build_sectors


@pytest.fixture
def sectors():
    """Default nine-sector layout."""
    return build_sectors()


@pytest.fixture
def path_loss_params():
    return PathLossParams()


@pytest.fixture
def radio_params():
    return RadioParams()


@pytest.fixture
def radio(sectors, radio_params):
    """Radio model for 40 UEs, seed 7."""
    return RadioModel(sectors, radio_params, num_ues=40, seed=7)


@pytest.fixture
def region(sectors):
    return region_around_sites(sectors)


@pytest.fixture
def square_region():
    """2 km square centred on the origin."""
    return Region(-1000.0, -1000.0, 1000.0, 1000.0)


@pytest.fixture
def thresholds():
    return MlbThresholds()


@pytest.fixture
def handover_params():
    return HandoverParams()


@pytest.fixture
def hysteresis_table():
    return HysteresisTable(num_sectors=9, default_hysteresis=3.0)


@pytest.fixture
def make_report():
    """Build a LoadReport for a given free-resource ratio on a 100-PRB pool."""

    def _make(sector_id: int, ratio: float) -> LoadReport:
        return LoadReport(sector_id=sector_id, v_ar=ratio * 100.0, v_tr=100.0)

    return _make


@pytest.fixture
def short_config():
    """Small, loaded scenario that finishes in well under a second."""
    return build_scenario_config(
        {
            "name": "short",
            "duration": 4.0,
            "ue_count": 30,
            "seed": 3,
            "scheduler": {"traffic_rate_bps": 6e6},
        }
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
