"""Predefined load scenarios: the 37 / 56 / 75 UE density ladder."""

from typing import Any, Dict, List, Optional

from backend.config.scenario import ScenarioConfig, build_scenario_config, deep_merge

# Per-UE offered load of the presets. At the 1 Mbps default even 75 UEs leave
# the free-PRB ratio of most sectors above th_pre, so MLB would never engage.
PRESET_TRAFFIC_RATE_BPS = 4e6


class PredefinedScenarios:
    """Collection of predefined density scenarios."""

    @staticmethod
    def _density(name: str, ue_count: int, description: str) -> Dict:
        return {
            "name": name,
            "description": description,
            "category": "density",
            "parameters": {
                "name": name,
                "ue_count": ue_count,
                "scheduler": {"traffic_rate_bps": PRESET_TRAFFIC_RATE_BPS},
            },
            "tags": ["density", "ladder"],
            "is_predefined": True,
        }

    @staticmethod
    def get_low_density() -> Dict:
        """37 UEs: most sectors lightly loaded, MLB engages only in hot spots."""
        return PredefinedScenarios._density(
            "low_density", 37, "37 UEs over the three-site layout; light load with occasional hot sectors."
        )

    @staticmethod
    def get_medium_density() -> Dict:
        """56 UEs."""
        return PredefinedScenarios._density(
            "medium_density", 56, "56 UEs over the three-site layout; several sectors close to saturation."
        )

    @staticmethod
    def get_high_density() -> Dict:
        """75 UEs: few neighbors have spare resources, so MLB gains shrink."""
        return PredefinedScenarios._density(
            "high_density", 75, "75 UEs over the three-site layout; most sectors saturated."
        )

    @staticmethod
    def get_all_scenarios() -> List[Dict]:
        """Get all predefined scenarios, lowest density first."""
        return [
            PredefinedScenarios.get_low_density(),
            PredefinedScenarios.get_medium_density(),
            PredefinedScenarios.get_high_density(),
        ]

    @staticmethod
    def get_scenario_by_name(name: str) -> Dict:
        """Get a specific predefined scenario by name.

        Args:
            name: Scenario name

        Returns:
            Scenario dictionary

        Raises:
            ValueError: If scenario name not found
        """
        scenarios = {s["name"]: s for s in PredefinedScenarios.get_all_scenarios()}

        if name not in scenarios:
            available = ", ".join(scenarios.keys())
            raise ValueError(f"Scenario '{name}' not found. Available: {available}")

        return scenarios[name]


def preset_config(name: str, base: Optional[Dict[str, Any]] = None, **overrides: Any) -> ScenarioConfig:
    """ScenarioConfig for a preset; `base` sits underneath, overrides on top."""
    parameters = PredefinedScenarios.get_scenario_by_name(name)["parameters"]
    return build_scenario_config(deep_merge(dict(base or {}), parameters), **overrides)
