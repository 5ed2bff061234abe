"""Tests for the scenario matrix and the density-trend checks."""

import pandas as pd
import pytest

from backend.config.scenario import build_scenario_config
from backend.config.settings import settings
from backend.scenarios.predefined_scenarios import PRESET_TRAFFIC_RATE_BPS, PredefinedScenarios
from backend.simulation.scenario_matrix import (
    RUN_COLUMNS,
    aggregate_runs,
    default_seeds,
    evaluate_trends,
    matrix_configs,
    run_matrix,
    summaries_to_matrix,
)


@pytest.fixture
def tiny_config():
    return build_scenario_config({"name": "tiny", "duration": 1.0, "ue_count": 10})


def _runs(rows):
    return pd.DataFrame(
        [dict(zip(["algorithm", "ue_count", "seed", "throughput_mbps", "loss_ratio", "ho_count"], r)) for r in rows]
    ).assign(scenario="synthetic")[RUN_COLUMNS]


def _ladder(swap_low_handovers=False):
    """Synthetic matrix that satisfies every density trend."""
    rows = []
    for seed in (0, 1):
        jitter = 0.01 * seed
        rows += [
            ("none", 37, seed, 30.0 + jitter, 0.05, 10),
            ("none", 75, seed, 50.0 + jitter, 0.30, 20),
            ("mlb1", 37, seed, 33.0 + jitter, 0.02, 14),
            ("mlb1", 75, seed, 51.0 + jitter, 0.28, 25),
            ("mlb2", 37, seed, 33.5 + jitter, 0.02, 10 if swap_low_handovers else 16),
            ("mlb2", 75, seed, 51.0 + jitter, 0.27, 26),
        ]
    return _runs(rows)


class TestMatrixConfigs:
    """Test matrix expansion."""

    def test_cardinality_and_order(self, tiny_config):
        configs = matrix_configs(tiny_config, ["none", "mlb1"], [10, 20], [0, 1, 2])
        assert len(configs) == 12
        assert [(c.algorithm, c.ue_count, c.seed) for c in configs[:4]] == [
            ("none", 10, 0),
            ("none", 10, 1),
            ("none", 10, 2),
            ("none", 20, 0),
        ]
        assert all(c.duration == 1.0 for c in configs)

    def test_full_ladder(self, tiny_config):
        configs = matrix_configs(tiny_config, ["none", "mlb1", "mlb2"], [37, 56, 75], default_seeds(5))
        assert len(configs) == 45
        assert len({(c.algorithm, c.ue_count) for c in configs}) == 9

    @pytest.mark.parametrize("axes", [([], [10], [0]), (["none"], [], [0]), (["none"], [10], [])])
    def test_empty_axis_rejected(self, tiny_config, axes):
        with pytest.raises(ValueError):
            matrix_configs(tiny_config, *axes)

    def test_unknown_algorithm_rejected(self, tiny_config):
        with pytest.raises(ValueError):
            matrix_configs(tiny_config, ["mlb3"], [10], [0])

    def test_default_seeds(self):
        assert default_seeds(3) == [0, 1, 2]


class TestRunMatrix:
    """Test matrix execution on short runs."""

    def test_runs_every_cell(self, tiny_config):
        result = run_matrix(tiny_config, ["none", "mlb2"], [8, 12], [0, 1])
        assert result.num_runs == 8
        assert list(result.runs.columns) == RUN_COLUMNS
        assert len(result.aggregates) == 4
        assert len(result.sector_throughput) == 8 * 9

    def test_parallel_matches_serial(self, tiny_config):
        """Test that worker processes produce the same runs as a serial loop."""
        serial = run_matrix(tiny_config, ["none", "mlb1"], [8], [0, 1])
        parallel = run_matrix(tiny_config, ["none", "mlb1"], [8], [0, 1], workers=2)
        pd.testing.assert_frame_equal(serial.runs, parallel.runs)

    def test_seeds_are_paired(self, tiny_config):
        """Test that every algorithm runs on the same seeds."""
        result = run_matrix(tiny_config, ["none"], [8], [5, 5])
        first, second = result.runs.iloc[0], result.runs.iloc[1]
        assert first["throughput_mbps"] == second["throughput_mbps"]
        assert first["ho_count"] == second["ho_count"]
        assert result.aggregates["throughput_mbps_std"].iloc[0] == 0.0


class TestAggregateRuns:
    """Test per-cell mean and standard deviation."""

    def test_mean_and_std(self):
        runs = _runs([("none", 37, 0, 10.0, 0.1, 4), ("none", 37, 1, 14.0, 0.3, 6)])
        aggregates = aggregate_runs(runs)
        row = aggregates.iloc[0]
        assert row["throughput_mbps"] == pytest.approx(12.0)
        assert row["throughput_mbps_std"] == pytest.approx(2.8284, abs=1e-4)
        assert row["ho_count"] == pytest.approx(5.0)

    def test_single_seed_has_zero_std(self):
        aggregates = aggregate_runs(_runs([("mlb1", 56, 0, 10.0, 0.1, 4)]))
        assert aggregates["loss_ratio_std"].iloc[0] == 0.0

    def test_empty(self):
        aggregates = aggregate_runs(pd.DataFrame(columns=RUN_COLUMNS))
        assert aggregates.empty
        assert "throughput_mbps_std" in aggregates.columns

    def test_empty_summaries(self):
        result = summaries_to_matrix([])
        assert result.num_runs == 0
        assert result.sector_throughput.empty


class TestEvaluateTrends:
    """Test density-trend checks on synthetic matrices."""

    def test_all_hold_on_consistent_ladder(self):
        report = evaluate_trends(_ladder())
        assert report.all_hold, report.to_text()

    def test_mlb2_handover_ordering(self):
        """Test that the mlb2 handover check fails when mlb1 hands over more."""
        report = evaluate_trends(_ladder(swap_low_handovers=True))
        failed = [c.claim for c in report.checks if not c.holds]
        assert "mlb2 handovers > mlb1 at 37 UEs" in failed
        assert not report.all_hold

    def test_loss_must_increase(self):
        runs = _ladder()
        runs.loc[(runs["algorithm"] == "none") & (runs["ue_count"] == 75), "loss_ratio"] = 0.01
        report = evaluate_trends(runs)
        claims = {c.claim: c.holds for c in report.checks}
        assert claims["none loss ratio increases with density"] is False

    def test_sign_counts(self):
        """Test per-seed win counts against the baseline."""
        report = evaluate_trends(_ladder())
        counts = report.sign_counts
        assert len(counts) == 2 * 3 * 2
        assert (counts["wins"] == counts["seeds"]).all()
        assert "Per-seed sign counts" in report.to_text()

    def test_baseline_only(self):
        report = evaluate_trends(_ladder().query("algorithm == 'none'"))
        assert [c.claim for c in report.checks] == ["none loss ratio increases with density"]
        assert report.sign_counts.empty

    def test_empty(self):
        report = evaluate_trends(pd.DataFrame(columns=RUN_COLUMNS))
        assert report.checks == []
        assert report.all_hold


@pytest.mark.slow
class TestDensityLadderTrends:
    """Directional trends on real runs: 3 algorithms x 37/56/75 UEs x 5 paired seeds, 100 s each."""

    def test_trends_hold(self):
        base = build_scenario_config({"scheduler": {"traffic_rate_bps": PRESET_TRAFFIC_RATE_BPS}})
        ue_counts = [s["parameters"]["ue_count"] for s in PredefinedScenarios.get_all_scenarios()]
        matrix = run_matrix(
            base, ["none", "mlb1", "mlb2"], ue_counts, default_seeds(5), workers=settings.matrix_workers
        )

        assert matrix.num_runs == 45
        report = evaluate_trends(matrix.runs)
        assert report.all_hold, report.to_text()
        assert len(report.sign_counts) == 2 * 3 * 3
