"""
Command-line interface.

    python -m app.main compress   --input data.txt --output data.plc --rate 0.5 [--k --beta --gamma --iters --seed]
    python -m app.main decompress --input data.plc --output restored.txt [--original data.txt]
    python -m app.main rdcurve    --p 0.5
    python -m app.main experiment [--config study.cfg] [--p --rates --N --trials ...]
    python -m app.main sweep      --axis gamma --grid 0,0.2,0.4 [experiment flags]
    python -m app.main exponent   --p 0.5 --rate 0.5 --distortion 0.3 --m-list 8,12,16,20 --trials 2000

Exit status: 0 on success, 2 on usage errors, 1 on runtime errors.
Tables go to stdout, logs to stderr.
"""
import argparse
import math
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from app.codec.container import decode_blob, pack_blob, read_blob, write_blob
from app.codec.perceptron import hamming_distortion
from app.config import get_settings, load_config_file, parse_float_list
from app.encoding.bp_encoder import encode_bp
from app.encoding.oracle import estimate_tail_probability
from app.exceptions import CodecError, ConfigError, InvalidSymbolError
from app.harness.experiment import SWEEP_AXES, ExperimentConfig, run_experiment, sweep
from app.harness.rng import MASK64, rng_from_seed
from app.logging_config import get_logger, setup_logging
from app.models import BinarySeq, Codebook, CodecParams, SourceModel
from app.reference.rate_distortion import DEFAULT_BETA, DEFAULT_GAMMA, DEFAULT_CURVE_POINTS, default_threshold, rd_curve

logger = get_logger(__name__)

FORMATS = ("bits", "bytes")
LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]


# argparse types: a bad value is a usage error (exit 2)

def _number(kind: Callable, check: Callable[[float], bool], domain: str):
    def parse(text: str):
        try:
            value = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid number {text!r}")
        if isinstance(value, float) and not math.isfinite(value):
            raise argparse.ArgumentTypeError(f"{text!r} is not finite")
        if not check(value):
            raise argparse.ArgumentTypeError(f"{text!r} must be {domain}")
        return value
    return parse


def _number_list(item: Callable):
    def parse(text: str):
        return [item(part.strip()) for part in text.split(",") if part.strip()]
    return parse


open_unit = _number(float, lambda v: 0.0 < v < 1.0, "in (0, 1)")
rate_value = _number(float, lambda v: 0.0 < v <= 1.0, "in (0, 1]")
distortion_value = _number(float, lambda v: 0.0 < v <= 1.0, "in (0, 1]")
nonneg_float = _number(float, lambda v: v >= 0.0, ">= 0")
positive_float = _number(float, lambda v: v > 0.0, "> 0")
gamma_value = _number(float, lambda v: 0.0 <= v < 1.0, "in [0, 1)")
positive_int = _number(int, lambda v: v >= 1, ">= 1")
nonneg_int = _number(int, lambda v: v >= 0, ">= 0")
u64_value = _number(int, lambda v: 0 <= v <= MASK64, "an unsigned 64-bit integer")


# data files

def read_symbols(path: str, fmt: str) -> BinarySeq:
    """'bits': text of 0/1 characters (whitespace ignored); 'bytes': raw bytes, MSB first. Bit 1 is +1."""
    if fmt == "bits":
        text = "".join(Path(path).read_text().split())
        if not text or set(text) - {"0", "1"}:
            raise InvalidSymbolError(f"{path}: a bits file holds only 0/1 characters")
        bits = np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")
    else:
        raw = Path(path).read_bytes()
        if not raw:
            raise InvalidSymbolError(f"{path}: empty input")
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="big")
    return BinarySeq.from_bits(bits)


def write_symbols(path: str, seq: BinarySeq, fmt: str) -> None:
    if fmt == "bits":
        Path(path).write_text("".join("1" if v == 1 else "0" for v in seq.values) + "\n")
    else:
        Path(path).write_bytes(np.packbits(seq.to_bits(), bitorder="big").tobytes())


def _estimated_bias(y: BinarySeq) -> float:
    # add-half estimate keeps the bias inside (0, 1) for constant inputs
    return (np.count_nonzero(y.values == 1) + 0.5) / (y.length + 1.0)


def _print_pairs(pairs: Dict) -> None:
    for key, value in pairs.items():
        print(f"{key}={value}")


# subcommands

def cmd_compress(args) -> int:
    y = read_symbols(args.input, args.format)
    M = y.length
    N = max(1, int(math.floor(args.rate * M + 0.5)))
    k = args.k if args.k is not None else default_threshold(_estimated_bias(y))
    params = CodecParams(k=k, beta=args.beta, gamma=args.gamma, max_iters=max(1, args.iters),
                         init_amplitude=args.init_amplitude, best_iterate=args.best_iterate)

    rng = rng_from_seed(args.seed)
    codebook = Codebook.from_seed(rng.next_u64(), M, N)
    logger.info(f"Compressing {args.input}: M={M} N={N} k={k:.4f} beta={args.beta} gamma={args.gamma}")
    encoding = encode_bp(y, codebook, params, rng, iters=args.iters)

    blob, _ = pack_blob(encoding.codeword, codebook, k)
    written = write_blob(args.output, blob)
    logger.info(f"Wrote {written} bytes to {args.output} (distortion {encoding.distortion}/{M})")
    _print_pairs({
        "M": M, "N": N, "rate": f"{blob.rate:.6f}", "k": repr(k),
        "iters": len(encoding.trace), "converged": encoding.trace.converged,
        "distortion_bits": encoding.distortion, "distortion_per_bit": f"{encoding.distortion / M:.6f}",
    })
    return 0


def cmd_decompress(args) -> int:
    blob = read_blob(args.input)
    restored = decode_blob(blob)
    logger.info(f"Decompressed {args.input}: M={blob.M} N={blob.N}")
    if args.output:
        write_symbols(args.output, restored, args.format)
    pairs = {"M": blob.M, "N": blob.N, "rate": f"{blob.rate:.6f}"}
    if args.original:
        original = read_symbols(args.original, args.format)
        d = hamming_distortion(original, restored)
        pairs.update({"distortion_bits": d, "distortion_per_bit": f"{d / blob.M:.6f}"})
    _print_pairs(pairs)
    return 0


def cmd_rdcurve(args) -> int:
    rd_curve(args.p, points=args.points).to_frame().to_csv(sys.stdout, index=False, lineterminator="\n")
    return 0


EXPERIMENT_FLAGS = ("p", "rates", "N", "trials", "k", "beta", "gamma", "max_iters", "init_amplitude",
                    "best_iterate", "master_seed", "output", "workers", "small_rate_n")


def build_experiment_config(args) -> ExperimentConfig:
    """Environment defaults < config file < flags."""
    settings = get_settings()
    values: Dict = {"workers": settings.workers}
    if args.config:
        file_values = load_config_file(args.config)
        for list_key in ("rates", "grid"):
            if list_key in file_values:
                file_values[list_key] = parse_float_list(file_values[list_key])
        if "iters" in file_values:
            file_values["max_iters"] = file_values.pop("iters")
        if "seed" in file_values:
            file_values["master_seed"] = file_values.pop("seed")
        values.update(file_values)
    for name in EXPERIMENT_FLAGS:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    if "p" not in values or "rates" not in values:
        raise ConfigError("experiment needs --p and --rates (flags or config file)")
    values.pop("grid", None)
    values.pop("axis", None)
    return ExperimentConfig(**values)


def _maybe_plot(args, aggregate: pd.DataFrame) -> None:
    if args.plot:
        from app.harness.plotting import plot_distortion_curve
        plot_distortion_curve(aggregate, args.plot)


def cmd_experiment(args) -> int:
    cfg = build_experiment_config(args)
    result = run_experiment(cfg)
    result.aggregate.to_csv(sys.stdout, index=False, lineterminator="\n")
    _maybe_plot(args, result.aggregate)
    return 0


def cmd_sweep(args) -> int:
    cfg = build_experiment_config(args)
    axis, grid = args.axis, args.grid
    if args.config and (axis is None or grid is None):
        file_values = load_config_file(args.config)
        axis = axis or file_values.get("axis")
        if grid is None and "grid" in file_values:
            grid = parse_float_list(file_values["grid"])
    if axis is None or not grid:
        raise ConfigError("sweep needs --axis and --grid (flags or config file)")
    result = sweep(cfg, axis, grid)
    result.aggregate.to_csv(sys.stdout, index=False, lineterminator="\n")
    sys.stdout.write("\n")
    result.best.to_csv(sys.stdout, index=False, lineterminator="\n")
    return 0


def cmd_exponent(args) -> int:
    source = SourceModel(args.p)
    k = args.k if args.k is not None else default_threshold(args.p)
    rng = rng_from_seed(args.seed)
    rows = []
    for M in args.m_list:
        est = estimate_tail_probability(source, M, args.rate, args.distortion, k, args.trials, rng,
                                        regime=args.regime)
        rows.append({
            "M": est.M, "R": est.R, "D": est.D, "trials": est.trials, "p_hat": est.p_hat,
            "rate_estimate": est.rate_estimate if est.rate_estimate is not None else float("nan"),
            "regime": est.regime, "r_c": est.r_c, "boundary_rule": est.boundary_rule,
        })
    pd.DataFrame(rows).to_csv(sys.stdout, index=False, lineterminator="\n")
    return 0


def _add_experiment_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value file; flags override its values")
    parser.add_argument("--p", type=open_unit, help="source bias P(y=+1)")
    parser.add_argument("--rates", type=_number_list(rate_value), help="comma-separated rates in (0, 1]")
    parser.add_argument("--N", type=positive_int, help="compressed length (default 1000)")
    parser.add_argument("--small-rate-n", type=positive_int, help="N used for rates <= 0.2")
    parser.add_argument("--trials", type=positive_int, help="trials per rate (default 100)")
    parser.add_argument("--k", type=nonneg_float,
                        help="threshold (default: heuristic fit to p, not replica-optimal)")
    parser.add_argument("--beta", type=positive_float,
                        help=f"inverse temperature (default {DEFAULT_BETA}, a heuristic placeholder)")
    parser.add_argument("--gamma", type=gamma_value,
                        help=f"reinforcement in [0, 1) (default {DEFAULT_GAMMA}, a heuristic placeholder)")
    parser.add_argument("--iters", dest="max_iters", type=positive_int, help="BP sweeps (default 35)")
    parser.add_argument("--init-amplitude", type=gamma_value)
    parser.add_argument("--best-iterate", action="store_true", default=None)
    parser.add_argument("--master-seed", type=u64_value)
    parser.add_argument("--output", help="output stem for the CSV files")
    parser.add_argument("--workers", type=positive_int, help="worker processes (default PLC_WORKERS or 1)")
    parser.add_argument("--plot", help="also write an SVG plot to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m app.main",
        description="Perceptron-based lossy compression of binary sources",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Compress at rate 0.5, then restore and report the distortion
  python -m app.main compress --input y.txt --output y.plc --rate 0.5 --seed 7
  python -m app.main decompress --input y.plc --output y_hat.txt --original y.txt

  # Rate-distortion function of a p=0.8 source
  python -m app.main rdcurve --p 0.8 > rdf.csv
        """
    )
    parser.add_argument("--log-level", choices=LOG_LEVELS,
                        help="Logging level (default: LOG_LEVEL env var or INFO)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compress", help="encode a binary file into a container")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--format", choices=FORMATS, default="bits")
    p.add_argument("--rate", type=rate_value, required=True, help="R = N/M in (0, 1]")
    p.add_argument("--k", type=nonneg_float,
                   help="threshold (default: heuristic fit to the input's bias, not replica-optimal)")
    p.add_argument("--beta", type=positive_float, default=DEFAULT_BETA,
                   help="inverse temperature (default %(default)s, a heuristic placeholder)")
    p.add_argument("--gamma", type=gamma_value, default=DEFAULT_GAMMA,
                   help="reinforcement in [0, 1) (default %(default)s, a heuristic placeholder)")
    p.add_argument("--iters", type=nonneg_int, default=35)
    p.add_argument("--init-amplitude", type=gamma_value, default=0.1)
    p.add_argument("--best-iterate", action="store_true")
    p.add_argument("--seed", type=u64_value, default=0)
    p.set_defaults(handler=cmd_compress)

    p = sub.add_parser("decompress", help="restore the representative vector from a container")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.add_argument("--format", choices=FORMATS, default="bits")
    p.add_argument("--original", help="original data, to report the distortion")
    p.set_defaults(handler=cmd_decompress)

    p = sub.add_parser("rdcurve", help="print the rate-distortion function as CSV")
    p.add_argument("--p", type=open_unit, required=True)
    p.add_argument("--points", type=_number(int, lambda v: v >= 2, ">= 2"), default=DEFAULT_CURVE_POINTS)
    p.set_defaults(handler=cmd_rdcurve)

    p = sub.add_parser("experiment", help="distortion vs rate study")
    _add_experiment_flags(p)
    p.set_defaults(handler=cmd_experiment)

    p = sub.add_parser("sweep", help="experiment repeated over a parameter grid")
    _add_experiment_flags(p)
    p.add_argument("--axis", choices=SWEEP_AXES)
    p.add_argument("--grid", type=_number_list(nonneg_float), help="comma-separated values")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("exponent", help="Monte Carlo tail probabilities with the exhaustive oracle")
    p.add_argument("--p", type=open_unit, required=True)
    p.add_argument("--rate", type=rate_value, required=True)
    p.add_argument("--distortion", type=distortion_value, required=True)
    p.add_argument("--m-list", type=_number_list(positive_int), required=True)
    p.add_argument("--trials", type=positive_int, default=1000)
    p.add_argument("--k", type=nonneg_float)
    p.add_argument("--regime", choices=["auto", "failure", "success"], default="auto")
    p.add_argument("--seed", type=u64_value, default=0)
    p.set_defaults(handler=cmd_exponent)

    return parser


def cli(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else 2

    settings = get_settings()
    setup_logging(level=args.log_level or settings.log_level, log_file=settings.log_file)

    try:
        return args.handler(args)
    except (CodecError, OSError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}")
        return 1
