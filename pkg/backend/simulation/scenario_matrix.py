"""Scenario matrix: run algorithms x UE densities x paired seeds and aggregate KPIs.

Seeds are shared across algorithms, so every comparison between algorithms
is paired: the same seed yields the same UE placement, trajectories and
shadowing whatever the MLB algorithm.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Sequence

import pandas as pd

from backend.config.scenario import ScenarioConfig
from backend.config.settings import settings
from backend.simulation.engine import run

logger = logging.getLogger(__name__)

KPI_COLUMNS = ["throughput_mbps", "loss_ratio", "ho_count"]
RUN_COLUMNS = ["scenario", "algorithm", "ue_count", "seed", *KPI_COLUMNS]
BASELINE = "none"


@dataclass
class MatrixResult:
    """Per-run rows, per-cell aggregates and per-sector throughput of a matrix."""

    runs: pd.DataFrame
    aggregates: pd.DataFrame
    sector_throughput: pd.DataFrame

    @property
    def num_runs(self) -> int:
        return len(self.runs)


@dataclass
class TrendCheck:
    """One directional claim evaluated on seed-averaged means."""

    claim: str
    holds: bool
    detail: str = ""


@dataclass
class TrendReport:
    """Outcome of the density-trend checks on a matrix."""

    checks: List[TrendCheck] = field(default_factory=list)
    sign_counts: pd.DataFrame = field(default_factory=pd.DataFrame)

    @property
    def all_hold(self) -> bool:
        return all(check.holds for check in self.checks)

    def to_text(self) -> str:
        lines = [f"[{'PASS' if c.holds else 'FAIL'}] {c.claim}{': ' + c.detail if c.detail else ''}" for c in self.checks]
        if not self.sign_counts.empty:
            lines.append("")
            lines.append("Per-seed sign counts (seeds where the claim holds / seeds):")
            lines.append(self.sign_counts.to_string(index=False))
        return "\n".join(lines)


def matrix_configs(
    base_config: ScenarioConfig,
    algorithms: Sequence[str],
    ue_counts: Sequence[int],
    seeds: Sequence[int],
) -> List[ScenarioConfig]:
    """Cartesian product of the matrix axes, in (algorithm, ue_count, seed) order."""
    if not algorithms or not ue_counts or not seeds:
        raise ValueError("algorithms, ue_counts and seeds must all be non-empty")

    configs = []
    for algorithm, ue_count, seed in product(algorithms, ue_counts, seeds):
        data = base_config.model_dump()
        data.update(algorithm=algorithm, ue_count=ue_count, seed=seed)
        configs.append(ScenarioConfig.model_validate(data))
    return configs


def _run_one(config: ScenarioConfig) -> Dict:
    return run(config).summary()


def run_matrix(
    base_config: ScenarioConfig,
    algorithms: Sequence[str],
    ue_counts: Sequence[int],
    seeds: Sequence[int],
    workers: int = 1,
) -> MatrixResult:
    """Run every (algorithm, ue_count, seed) combination.

    Args:
        base_config: Configuration every run starts from
        algorithms: MLB algorithms to compare
        ue_counts: UE densities
        seeds: Seeds, shared across algorithms
        workers: Worker processes; results are ordered by matrix index either way

    Returns:
        MatrixResult with per-run rows and mean/std aggregates per cell
    """
    configs = matrix_configs(base_config, algorithms, ue_counts, seeds)
    logger.info(
        f"Running matrix of {len(configs)} runs: {len(algorithms)} algorithms x "
        f"{len(ue_counts)} densities x {len(seeds)} seeds ({workers} workers)"
    )

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            summaries = list(pool.map(_run_one, configs))
    else:
        summaries = [_run_one(config) for config in configs]

    result = summaries_to_matrix(summaries)
    logger.info(f"Matrix complete: {result.num_runs} runs, {len(result.aggregates)} cells")
    return result


def summaries_to_matrix(summaries: Sequence[Dict]) -> MatrixResult:
    """Build the matrix tables from run summaries (see SimulationResult.summary)."""
    runs = pd.DataFrame([{key: s[key] for key in RUN_COLUMNS} for s in summaries], columns=RUN_COLUMNS)
    return MatrixResult(
        runs=runs,
        aggregates=aggregate_runs(runs),
        sector_throughput=_sector_rows(summaries),
    )


def aggregate_runs(runs: pd.DataFrame) -> pd.DataFrame:
    """Mean and standard deviation of each KPI per (scenario, algorithm, ue_count) cell."""
    keys = ["scenario", "algorithm", "ue_count"]
    columns = keys + [f"{kpi}{suffix}" for kpi in KPI_COLUMNS for suffix in ("", "_std")]
    if runs.empty:
        return pd.DataFrame(columns=columns)

    grouped = runs.groupby(keys, sort=False)[KPI_COLUMNS]
    means = grouped.mean()
    stds = grouped.std(ddof=1).fillna(0.0).add_suffix("_std")
    return means.join(stds).reset_index()[columns]


def _sector_rows(summaries: Sequence[Dict]) -> pd.DataFrame:
    rows = [
        {
            "scenario": s["scenario"],
            "algorithm": s["algorithm"],
            "ue_count": s["ue_count"],
            "seed": s["seed"],
            "sector": sector,
            "throughput_mbps": value,
        }
        for s in summaries
        for sector, value in enumerate(s["sector_throughput_mbps"])
    ]
    return pd.DataFrame(rows, columns=["scenario", "algorithm", "ue_count", "seed", "sector", "throughput_mbps"])


def _cell_means(runs: pd.DataFrame) -> pd.DataFrame:
    return runs.groupby(["algorithm", "ue_count"])[KPI_COLUMNS].mean()


def _paired(runs: pd.DataFrame, algorithm: str, kpi: str) -> pd.DataFrame:
    """KPI of `algorithm` against the baseline, one row per (ue_count, seed)."""
    pivot = runs.pivot_table(index=["ue_count", "seed"], columns="algorithm", values=kpi, aggfunc="mean")
    return pivot[[algorithm, BASELINE]].dropna()


def evaluate_trends(runs: pd.DataFrame) -> TrendReport:
    """Check the directional density trends on seed-averaged means.

    - throughput: each MLB algorithm at or above the baseline at every
      density, with a smaller relative gain at the highest density than at
      the lowest
    - loss ratio: strictly increasing in density for every algorithm, and
      below the baseline for each MLB algorithm at every density
    - handovers: each MLB algorithm above the baseline at every density, and
      mlb2 above mlb1 at the lowest density

    Claims whose algorithms are absent from the matrix are skipped.
    """
    report = TrendReport()
    if runs.empty:
        return report

    means = _cell_means(runs)
    algorithms = list(dict.fromkeys(runs["algorithm"]))
    densities = sorted(runs["ue_count"].unique())
    low, high = densities[0], densities[-1]
    mlb_algorithms = [a for a in algorithms if a != BASELINE]
    has_baseline = BASELINE in algorithms

    def mean(algorithm: str, ue_count: int, kpi: str) -> float:
        return float(means.loc[(algorithm, ue_count), kpi])

    for algorithm in algorithms:
        losses = [mean(algorithm, n, "loss_ratio") for n in densities]
        increasing = all(a < b for a, b in zip(losses, losses[1:]))
        detail = ", ".join(f"{n}: {v:.4f}" for n, v in zip(densities, losses))
        report.checks.append(TrendCheck(f"{algorithm} loss ratio increases with density", increasing, detail))

    sign_rows = []
    if has_baseline:
        for algorithm in mlb_algorithms:
            gains = {}
            for n in densities:
                ours, base = mean(algorithm, n, "throughput_mbps"), mean(BASELINE, n, "throughput_mbps")
                gains[n] = (ours - base) / base if base > 0 else 0.0
                report.checks.append(
                    TrendCheck(f"{algorithm} throughput >= baseline at {n} UEs", ours >= base, f"{ours:.3f} vs {base:.3f}")
                )
                ours, base = mean(algorithm, n, "loss_ratio"), mean(BASELINE, n, "loss_ratio")
                report.checks.append(
                    TrendCheck(f"{algorithm} loss ratio < baseline at {n} UEs", ours < base, f"{ours:.4f} vs {base:.4f}")
                )
                ours, base = mean(algorithm, n, "ho_count"), mean(BASELINE, n, "ho_count")
                report.checks.append(
                    TrendCheck(f"{algorithm} handovers > baseline at {n} UEs", ours > base, f"{ours:.1f} vs {base:.1f}")
                )
            if low != high:
                report.checks.append(
                    TrendCheck(
                        f"{algorithm} throughput gain smaller at {high} than at {low} UEs",
                        gains[high] < gains[low],
                        f"{gains[high]:+.2%} vs {gains[low]:+.2%}",
                    )
                )

            for kpi, better in (("throughput_mbps", "ge"), ("loss_ratio", "lt"), ("ho_count", "gt")):
                paired = _paired(runs, algorithm, kpi)
                for n, group in paired.groupby(level="ue_count"):
                    if better == "ge":
                        wins = (group[algorithm] >= group[BASELINE]).sum()
                    elif better == "lt":
                        wins = (group[algorithm] < group[BASELINE]).sum()
                    else:
                        wins = (group[algorithm] > group[BASELINE]).sum()
                    sign_rows.append(
                        {"algorithm": algorithm, "kpi": kpi, "ue_count": n, "wins": int(wins), "seeds": len(group)}
                    )

    if "mlb1" in algorithms and "mlb2" in algorithms:
        ho1, ho2 = mean("mlb1", low, "ho_count"), mean("mlb2", low, "ho_count")
        report.checks.append(TrendCheck(f"mlb2 handovers > mlb1 at {low} UEs", ho2 > ho1, f"{ho2:.1f} vs {ho1:.1f}"))

    report.sign_counts = pd.DataFrame(sign_rows, columns=["algorithm", "kpi", "ue_count", "wins", "seeds"])
    return report


def default_seeds(count: Optional[int] = None) -> List[int]:
    """Seeds 0..count-1; the count defaults to the configured matrix seed count."""
    return list(range(count if count is not None else settings.default_seed_count))
