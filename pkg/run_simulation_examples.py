"""Example script demonstrating simulation engine usage."""

import logging
import sys
from pathlib import Path

# Add backend to path
sys.path.insert(0, str(Path(__file__).parent))

from backend.config.scenario import build_scenario_config  # noqa: E402
from backend.scenarios.predefined_scenarios import PredefinedScenarios, preset_config  # noqa: E402
from backend.simulation.engine import run  # noqa: E402
from backend.simulation.scenario_matrix import evaluate_trends, run_matrix  # noqa: E402

# Configure logging
logging.basicConfig(level=logging.INFO, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s")

logger = logging.getLogger(__name__)


def example_single_run():
    """Example: one loaded run with and without MLB on the same seed."""
    logger.info("=" * 60)
    logger.info("Example 1: Single run, paired seed")
    logger.info("=" * 60)

    for algorithm in ("none", "mlb1"):
        config = preset_config("low_density", duration=20.0, algorithm=algorithm, seed=1)
        kpis = run(config).kpis
        logger.info(
            f"{algorithm:>5}: throughput {kpis.throughput_mbps:.2f} Mbps, "
            f"loss ratio {kpis.loss_ratio:.4f}, {kpis.ho_count} handovers"
        )


def example_presets():
    """Example: list the density presets."""
    logger.info("=" * 60)
    logger.info("Example 2: Density presets")
    logger.info("=" * 60)

    for scenario in PredefinedScenarios.get_all_scenarios():
        logger.info(f"{scenario['name']:<16} {scenario['parameters']['ue_count']:>3} UEs  {scenario['description']}")


def example_matrix():
    """Example: a short matrix and its trend checks."""
    logger.info("=" * 60)
    logger.info("Example 3: Scenario matrix")
    logger.info("=" * 60)

    base = build_scenario_config({"duration": 10.0, "scheduler": {"traffic_rate_bps": 4e6}})
    matrix = run_matrix(base, ["none", "mlb1", "mlb2"], [37, 75], [0, 1])
    logger.info("\n" + matrix.aggregates.to_string(index=False))
    logger.info("\n" + evaluate_trends(matrix.runs).to_text())


if __name__ == "__main__":
    example_single_run()
    example_presets()
    example_matrix()
