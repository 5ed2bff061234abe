"""Static SVG charts of matrix KPIs against UE density."""

import logging
from pathlib import Path
from typing import Dict, Optional, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from backend.simulation.kpi_export import read_kpi_csv  # noqa: E402

logger = logging.getLogger(__name__)

DENSITY_CHARTS = {
    "throughput_mbps": ("Global downlink throughput", "Throughput (Mbps)", "throughput_vs_density.svg"),
    "loss_ratio": ("Relative loss ratio", "Lost bits / offered bits", "loss_vs_density.svg"),
    "ho_count": ("Successful handovers", "Handovers per run", "handovers_vs_density.svg"),
}
ALGORITHM_LABELS = {"none": "No MLB", "mlb1": "MLB1", "mlb2": "MLB2"}

# No timestamp in the SVG so identical inputs give identical files
SVG_METADATA = {"Date": None}


def _save(fig, path: Path) -> Path:
    try:
        fig.savefig(path, format="svg", bbox_inches="tight", metadata=SVG_METADATA)
    except OSError as e:
        raise OSError(f"Cannot write {path}: {e}") from e
    finally:
        plt.close(fig)
    logger.info(f"Wrote chart {path}")
    return path


def plot_density_chart(aggregates: pd.DataFrame, kpi: str, path: Union[str, Path]) -> Path:
    """Line chart of one KPI against UE count, one series per algorithm, std as error bars.

    Args:
        aggregates: Aggregate rows (algorithm, ue_count, <kpi>, <kpi>_std)
        kpi: KPI column to plot
        path: SVG file to write
    """
    title, ylabel, _ = DENSITY_CHARTS[kpi]
    fig, ax = plt.subplots(figsize=(7, 4.5))

    for algorithm, group in aggregates.groupby("algorithm", sort=False):
        group = group.sort_values("ue_count")
        std = group.get(f"{kpi}_std")
        ax.errorbar(
            group["ue_count"],
            group[kpi],
            yerr=None if std is None else std.fillna(0.0),
            marker="o",
            capsize=3,
            label=ALGORITHM_LABELS.get(algorithm, algorithm),
        )

    ax.set_xlabel("UEs")
    ax.set_ylabel(ylabel)
    ax.set_title(f"{title} vs UE density")
    ax.set_xticks(sorted(aggregates["ue_count"].unique()))
    ax.grid(True, alpha=0.3)
    ax.legend()
    return _save(fig, Path(path))


def plot_sector_throughput(sector_throughput: pd.DataFrame, path: Union[str, Path]) -> Path:
    """Grouped bars of mean throughput per sector, one group per (algorithm, density)."""
    means = (
        sector_throughput.groupby(["algorithm", "ue_count", "sector"], sort=False)["throughput_mbps"]
        .mean()
        .unstack(["algorithm", "ue_count"])
        .sort_index()
    )
    fig, ax = plt.subplots(figsize=(10, 4.5))
    width = 0.8 / max(len(means.columns), 1)
    for i, (algorithm, ue_count) in enumerate(means.columns):
        ax.bar(
            means.index + i * width,
            means[(algorithm, ue_count)],
            width=width,
            label=f"{ALGORITHM_LABELS.get(algorithm, algorithm)}, {ue_count} UEs",
        )

    ax.set_xlabel("Sector")
    ax.set_ylabel("Throughput (Mbps)")
    ax.set_title("Average throughput per sector")
    ax.set_xticks(means.index + 0.4 - width / 2)
    ax.set_xticklabels([str(s) for s in means.index])
    ax.grid(True, axis="y", alpha=0.3)
    ax.legend(fontsize=8, ncol=3)
    return _save(fig, Path(path))


def plot_kpi_csv(
    kpi_csv: Union[str, Path],
    out_dir: Optional[Union[str, Path]] = None,
    sector_csv: Optional[Union[str, Path]] = None,
) -> Dict[str, Path]:
    """Render every density chart from a kpi.csv, plus the per-sector chart when its CSV exists.

    Args:
        kpi_csv: kpi.csv written by the exporter
        out_dir: Chart directory (defaults to the CSV's directory)
        sector_csv: sector_throughput.csv (defaults to the one next to kpi_csv)

    Returns:
        Mapping of chart name to written path
    """
    kpi_csv = Path(kpi_csv)
    out = Path(out_dir) if out_dir is not None else kpi_csv.parent
    out.mkdir(parents=True, exist_ok=True)

    frame = read_kpi_csv(kpi_csv)
    aggregates = frame[frame["aggregate"].astype(str).str.lower() == "true"]
    charts: Dict[str, Path] = {}
    if aggregates.empty:
        logger.warning(f"{kpi_csv} has no aggregate rows, skipping density charts")
    else:
        for kpi, (_, _, filename) in DENSITY_CHARTS.items():
            charts[kpi] = plot_density_chart(aggregates, kpi, out / filename)

    sector_csv = Path(sector_csv) if sector_csv is not None else kpi_csv.parent / "sector_throughput.csv"
    if sector_csv.exists():
        sectors = pd.read_csv(sector_csv)
        if not sectors.empty:
            charts["sector_throughput"] = plot_sector_throughput(sectors, out / "sector_throughput.svg")
    return charts
