"""Tests for the command-line interface and chart rendering."""

import pandas as pd
import pytest

from backend.cli import build_parser, main
from backend.simulation.kpi_export import KPI_CSV_COLUMNS


class TestParser:
    """Test command-line parsing."""

    def test_run_flags(self):
        args = build_parser().parse_args(["run", "--algorithm", "mlb2", "--ues", "56", "--traffic-rate", "4"])
        assert args.command == "run"
        assert args.algorithm == "mlb2"
        assert args.ues == 56
        assert args.traffic_rate == 4.0

    def test_matrix_lists(self):
        args = build_parser().parse_args(["matrix", "--algorithms", "none,mlb1", "--ue-counts", "37,75"])
        assert args.algorithms == ["none", "mlb1"]
        assert args.ue_counts == [37, 75]

    def test_unknown_algorithm(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["matrix", "--algorithms", "mlb9"])


class TestMain:
    """Test CLI commands end to end."""

    def test_run_writes_csvs(self, tmp_path, capsys):
        code = main(["run", "--ues", "6", "--duration", "0.5", "--out", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "kpi.csv").exists()
        assert (tmp_path / "handovers.csv").exists()
        assert "throughput=" in capsys.readouterr().out

    def test_matrix_with_charts(self, tmp_path, capsys):
        """Test the matrix command with CSV export and SVG charts."""
        code = main(
            [
                "matrix",
                "--algorithms",
                "none,mlb1",
                "--ue-counts",
                "5,8",
                "--seeds",
                "0,1",
                "--duration",
                "0.5",
                "--out",
                str(tmp_path),
                "--svg",
            ]
        )
        assert code == 0
        kpi = pd.read_csv(tmp_path / "kpi.csv")
        assert list(kpi.columns) == KPI_CSV_COLUMNS
        assert len(kpi) == 8 + 4
        for name in ("throughput_vs_density.svg", "loss_vs_density.svg", "handovers_vs_density.svg"):
            assert (tmp_path / name).read_text().lstrip().startswith("<?xml")
        assert (tmp_path / "sector_throughput.svg").exists()
        assert "loss ratio increases with density" in capsys.readouterr().out

    def test_plot_subcommand(self, tmp_path):
        argv = ["matrix", "--algorithms", "none", "--ue-counts", "5", "--seeds", "0", "--duration", "0.5"]
        assert main(argv + ["--out", str(tmp_path)]) == 0
        charts = tmp_path / "charts"
        assert main(["plot", str(tmp_path / "kpi.csv"), "--out", str(charts)]) == 0
        assert (charts / "throughput_vs_density.svg").exists()

    def test_invalid_config_returns_2(self, tmp_path, capsys):
        """Test that a bad config exits with status 2."""
        path = tmp_path / "bad.json"
        path.write_text('{"ue_count": -1}')
        assert main(["run", "--config", str(path)]) == 2
        assert "ue_count" in capsys.readouterr().err

    def test_missing_kpi_csv_returns_2(self, tmp_path):
        assert main(["plot", str(tmp_path / "absent.csv")]) == 2
