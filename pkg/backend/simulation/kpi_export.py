"""CSV export of run and matrix results."""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Union

import pandas as pd

from backend.simulation.engine import SECTOR_LOAD_COLUMNS, SimulationResult
from backend.simulation.scenario_matrix import KPI_COLUMNS, RUN_COLUMNS, MatrixResult, summaries_to_matrix

logger = logging.getLogger(__name__)

KPI_CSV_COLUMNS = RUN_COLUMNS + ["aggregate"] + [f"{kpi}_std" for kpi in KPI_COLUMNS]
HANDOVER_COLUMNS = ["timestamp", "ue_id", "source", "target", "cause", "effective_hysteresis_used"]
DECISION_COLUMNS = [
    "timestamp",
    "sector",
    "phase",
    "own_ratio",
    "neighbor",
    "neighbor_ratio",
    "alpha",
    "raw_hysteresis",
    "effective_hysteresis",
]
SECTOR_THROUGHPUT_COLUMNS = ["scenario", "algorithm", "ue_count", "seed", "sector", "throughput_mbps"]

# Fixed float formatting keeps repeated runs byte-identical
FLOAT_FORMAT = "%.9g"


def _prepare_dir(out_dir: Union[str, Path]) -> Path:
    path = Path(out_dir)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OSError(f"Cannot create output directory {path}: {e}") from e
    return path


def _write_csv(frame: pd.DataFrame, path: Path) -> Path:
    try:
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as e:
        raise OSError(f"Cannot write {path}: {e}") from e
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def kpi_frame(matrix: MatrixResult) -> pd.DataFrame:
    """Per-run rows followed by one aggregate row per matrix cell.

    Aggregate rows carry the cell means in the KPI columns, an empty seed,
    aggregate=true and the standard deviations in the *_std columns.
    """
    runs = matrix.runs.copy()
    runs["aggregate"] = "false"

    aggregates = matrix.aggregates.copy()
    aggregates["seed"] = pd.NA
    aggregates["aggregate"] = "true"

    frames = [f for f in (runs, aggregates) if not f.empty]
    if not frames:
        return pd.DataFrame(columns=KPI_CSV_COLUMNS)
    return pd.concat(frames, ignore_index=True).reindex(columns=KPI_CSV_COLUMNS)


def handover_frame(result: SimulationResult) -> pd.DataFrame:
    rows = [{column: getattr(event, column) for column in HANDOVER_COLUMNS} for event in result.handovers]
    return pd.DataFrame(rows, columns=HANDOVER_COLUMNS)


def export_matrix(matrix: MatrixResult, out_dir: Union[str, Path]) -> Dict[str, Path]:
    """Write kpi.csv and sector_throughput.csv for a matrix.

    Args:
        matrix: Matrix result (may be empty)
        out_dir: Output directory, created if missing

    Returns:
        Mapping of file kind to written path
    """
    path = _prepare_dir(out_dir)
    return {
        "kpi": _write_csv(kpi_frame(matrix), path / "kpi.csv"),
        "sector_throughput": _write_csv(
            matrix.sector_throughput.reindex(columns=SECTOR_THROUGHPUT_COLUMNS), path / "sector_throughput.csv"
        ),
    }


def export_run(result: SimulationResult, out_dir: Union[str, Path]) -> Dict[str, Path]:
    """Write every CSV of a single run.

    Files: kpi.csv (one run row plus its aggregate row), handovers.csv,
    mlb_decisions.csv, sector_load.csv, sector_throughput.csv.
    """
    files = export_matrix(summaries_to_matrix([result.summary()]), out_dir)
    path = Path(out_dir)
    files["handovers"] = _write_csv(handover_frame(result), path / "handovers.csv")
    files["mlb_decisions"] = _write_csv(
        result.mlb_decisions.reindex(columns=DECISION_COLUMNS), path / "mlb_decisions.csv"
    )
    files["sector_load"] = _write_csv(result.sector_load.reindex(columns=SECTOR_LOAD_COLUMNS), path / "sector_load.csv")
    return files


def export(
    results: Union[SimulationResult, MatrixResult],
    out_dir: Union[str, Path],
    formats: Optional[List[str]] = None,
) -> Dict[str, Path]:
    """Export a run or a matrix; CSV always, SVG charts when 'svg' is requested.

    Raises:
        OSError: naming the path when the output location is not writable
    """
    formats = formats or ["csv"]
    if isinstance(results, SimulationResult):
        files = export_run(results, out_dir)
    else:
        files = export_matrix(results, out_dir)

    if "svg" in formats:
        from backend.simulation.plotting import plot_kpi_csv

        files.update(plot_kpi_csv(files["kpi"], out_dir))
    return files


def read_kpi_csv(path: Union[str, Path]) -> pd.DataFrame:
    """Load a kpi.csv written by export."""
    path = Path(path)
    try:
        frame = pd.read_csv(path)
    except OSError as e:
        raise OSError(f"Cannot read {path}: {e}") from e
    missing = set(KPI_CSV_COLUMNS) - set(frame.columns)
    if missing:
        raise ValueError(f"{path} is missing KPI columns: {sorted(missing)}")
    return frame
