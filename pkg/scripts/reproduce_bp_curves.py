"""
Distortion-vs-rate curves of the BP encoder for three source biases.

Protocol: p in {0.2, 0.5, 0.8}, rates 0.1..0.7, N=1000 (N=500 when R <= 0.2),
100 trials per rate, 35 BP sweeps. Writes one detail/aggregate CSV pair per bias,
a combined aggregate CSV and an SVG with the rate-distortion bounds overlaid.
"""
import argparse
import logging
from datetime import datetime
from pathlib import Path

import pandas as pd
from dotenv import load_dotenv

from app.config import get_settings
from app.harness.experiment import ExperimentConfig, run_experiment, write_table
from app.harness.plotting import plot_distortion_curve
from app.logging_config import setup_logging

load_dotenv()
logger = logging.getLogger(__name__)

BIASES = [0.2, 0.5, 0.8]
RATES = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7]


def main():
    """Run the three-bias study and write tables and plot."""
    settings = get_settings()
    parser = argparse.ArgumentParser(
        description="Reproduce BP distortion-vs-rate curves for p = 0.2, 0.5, 0.8",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Full protocol (slow)
  python -m scripts.reproduce_bp_curves

  # Quick look with fewer trials and a smaller N
  python -m scripts.reproduce_bp_curves --trials 10 --N 200 --small-rate-n 100 --workers 4
        """
    )
    parser.add_argument("--trials", type=int, default=100, help="Trials per rate (default: 100)")
    parser.add_argument("--N", type=int, default=1000, help="Compressed length (default: 1000)")
    parser.add_argument("--small-rate-n", type=int, default=500,
                        help="Compressed length for R <= 0.2 (default: 500)")
    parser.add_argument("--iters", type=int, default=35, help="BP sweeps (default: 35)")
    parser.add_argument("--gamma", type=float, default=0.4, help="Inertia (default: 0.4)")
    parser.add_argument("--beta", type=float, default=5.0, help="Inverse temperature (default: 5)")
    parser.add_argument("--master-seed", type=int, default=2024)
    parser.add_argument("--workers", type=int, default=settings.workers,
                        help="Worker processes (default: PLC_WORKERS or 1)")
    parser.add_argument("--results-dir", default=settings.results_dir,
                        help="Output directory (default: PLC_RESULTS_DIR or results)")
    parser.add_argument("--log-level", type=str,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help="Logging level (default: LOG_LEVEL env var or INFO)")
    args = parser.parse_args()

    # Precedence: CLI arg > env var > default
    log_level = args.log_level or settings.log_level

    old_log = Path("logs/reproduce_bp_curves.log")
    if old_log.exists():
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        old_log.rename(f"logs/reproduce_bp_curves_{timestamp}.log")
    setup_logging(level=log_level, log_file="logs/reproduce_bp_curves.log")

    out_dir = Path(args.results_dir)
    aggregates = []
    for p in BIASES:
        cfg = ExperimentConfig(
            p=p, rates=RATES, N=args.N, small_rate_n=args.small_rate_n, trials=args.trials,
            max_iters=args.iters, gamma=args.gamma, beta=args.beta, master_seed=args.master_seed,
            workers=args.workers, output=str(out_dir / f"bp_curve_p{p:g}"),
        )
        logger.info(f"=== p={p} ===")
        aggregates.append(run_experiment(cfg).aggregate)

    combined = pd.concat(aggregates, ignore_index=True)
    write_table(combined, out_dir / "bp_curves_aggregate.csv", "aggregate")
    plot_distortion_curve(combined, out_dir / "bp_curves.svg")

    for _, row in combined.iterrows():
        logger.info(f"p={row['p']:.1f} R={row['R']:.1f}: D={row['mean_D']:.4f} (RDF {row['rdf_D']:.4f})")
    logger.info(f"Results in {out_dir}/")


if __name__ == "__main__":
    main()
