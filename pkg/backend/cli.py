"""Command-line entry point: run, matrix, plot."""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from backend.config import settings
from backend.config.scenario import load_scenario_config
from backend.scenarios.predefined_scenarios import PredefinedScenarios, preset_config
from backend.simulation.engine import run
from backend.simulation.kpi_export import export
from backend.simulation.plotting import plot_kpi_csv
from backend.simulation.scenario_matrix import default_seeds, evaluate_trends, run_matrix

logger = logging.getLogger(__name__)

ALGORITHMS = ["none", "mlb1", "mlb2"]
BETA_VARIANTS = ["literal", "continuous"]


def _int_list(value: str) -> List[int]:
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{value}'") from e


def _algorithm_list(value: str) -> List[str]:
    algorithms = [v.strip() for v in value.split(",") if v.strip()]
    unknown = [a for a in algorithms if a not in ALGORITHMS]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown algorithms {unknown}; choose from {ALGORITHMS}")
    return algorithms


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON scenario file; flags override its values")
    parser.add_argument(
        "--preset", choices=[s["name"] for s in PredefinedScenarios.get_all_scenarios()], help="density preset"
    )
    parser.add_argument("--beta-variant", choices=BETA_VARIANTS, help="mlb1 middle-band slope")
    parser.add_argument("--duration", type=float, help="simulated seconds")
    parser.add_argument("--traffic-rate", type=float, help="offered load per UE in Mbps")
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    parser.add_argument("--svg", action="store_true", help="also write SVG charts")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lte-mlb-sim", description=settings.app_name)
    parser.add_argument("--log-level", default=None, help="overrides LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="run a single scenario")
    _add_common(run_parser)
    run_parser.add_argument("--algorithm", choices=ALGORITHMS)
    run_parser.add_argument("--ues", type=int, help="number of UEs")
    run_parser.add_argument("--seed", type=int)

    matrix_parser = sub.add_parser("matrix", help="run algorithms x densities x paired seeds")
    _add_common(matrix_parser)
    matrix_parser.add_argument("--algorithms", type=_algorithm_list, default=ALGORITHMS)
    matrix_parser.add_argument("--ue-counts", type=_int_list, default=[37, 56, 75])
    matrix_parser.add_argument("--seeds", type=_int_list, default=None, help="defaults to 0..DEFAULT_SEED_COUNT-1")
    matrix_parser.add_argument("--workers", type=int, default=None, help="worker processes")

    plot_parser = sub.add_parser("plot", help="render SVG charts from a matrix kpi.csv")
    plot_parser.add_argument("kpi_csv", type=Path)
    plot_parser.add_argument("--out", type=Path, default=None)
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {
        "algorithm": getattr(args, "algorithm", None),
        "beta_variant": args.beta_variant,
        "ue_count": getattr(args, "ues", None),
        "seed": getattr(args, "seed", None),
        "duration": args.duration,
    }
    if args.traffic_rate is not None:
        overrides["scheduler"] = {"traffic_rate_bps": args.traffic_rate * 1e6}
    return overrides


def _load_config(args: argparse.Namespace):
    overrides = _overrides(args)
    if args.preset:
        base = load_scenario_config(args.config).model_dump() if args.config else None
        return preset_config(args.preset, base, **overrides)
    return load_scenario_config(args.config, **overrides)


def cmd_run(args: argparse.Namespace) -> int:
    config = _load_config(args)
    result = run(config)
    out = args.out or settings.output_path / config.name
    files = export(result, out, ["csv", "svg"] if args.svg else ["csv"])

    kpis = result.kpis
    print(
        f"{config.name}: algorithm={config.algorithm} ues={config.ue_count} seed={config.seed} "
        f"throughput={kpis.throughput_mbps:.3f} Mbps loss_ratio={kpis.loss_ratio:.4f} handovers={kpis.ho_count}"
    )
    for kind, path in files.items():
        print(f"  {kind}: {path}")
    return 0


def cmd_matrix(args: argparse.Namespace) -> int:
    config = _load_config(args)
    seeds = args.seeds if args.seeds is not None else default_seeds()
    workers = args.workers if args.workers is not None else settings.matrix_workers

    matrix = run_matrix(config, args.algorithms, args.ue_counts, seeds, workers=workers)
    out = args.out or settings.output_path / "matrix"
    files = export(matrix, out, ["csv", "svg"] if args.svg else ["csv"])

    print(matrix.aggregates.to_string(index=False))
    print()
    print(evaluate_trends(matrix.runs).to_text())
    for kind, path in files.items():
        print(f"  {kind}: {path}")
    return 0


def cmd_plot(args: argparse.Namespace) -> int:
    charts = plot_kpi_csv(args.kpi_csv, args.out)
    for name, path in charts.items():
        print(f"  {name}: {path}")
    return 0


COMMANDS = {"run": cmd_run, "matrix": cmd_matrix, "plot": cmd_plot}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, (args.log_level or settings.log_level).upper()),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )

    try:
        return COMMANDS[args.command](args)
    except (ValueError, OSError) as e:
        logger.error(str(e))
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
