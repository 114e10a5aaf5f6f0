"""
Experiment runner: distortion of the BP encoder as a function of the rate.

For every rate R the data length is M = round(N / R) (half-up), and `trials`
independent instances are encoded. Each trial owns a child seed drawn from the
master stream in (rate, trial) order; the trial regenerates its instance and
its BP initialization from that seed alone, so results do not depend on how
trials are scheduled across workers.

Tables (pandas DataFrames, written as CSV with a leading schema line that names
the columns added to the published layout, here `error` and `failed`):

    detail:    p,R,N,M,trial,seed,iters,converged,distortion_bits,distortion_per_bit,error
    aggregate: p,R,N,M,trials,mean_D,stderr_D,rdf_D,k,beta,gamma,failed
"""
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.core.mathutil import binary_entropy
from app.encoding.bp_encoder import encode_bp
from app.exceptions import InvalidParameterError
from app.harness.instances import gen_instance
from app.harness.rng import MASK64, rng_from_seed
from app.logging_config import get_logger
from app.models import CodecParams
from app.reference.rate_distortion import DEFAULT_BETA, DEFAULT_GAMMA, default_threshold, rdf_inverse

logger = get_logger(__name__)

SCHEMA_VERSION = "v1"
DETAIL_COLUMNS = ["p", "R", "N", "M", "trial", "seed", "iters", "converged",
                  "distortion_bits", "distortion_per_bit", "error"]
AGGREGATE_COLUMNS = ["p", "R", "N", "M", "trials", "mean_D", "stderr_D", "rdf_D",
                     "k", "beta", "gamma", "failed"]
BEST_COLUMNS = ["p", "R", "axis", "best_value", "mean_D"]
# published column sets; columns beyond these are named on the schema line
BASE_COLUMNS = {
    "detail": DETAIL_COLUMNS[:-1],
    "aggregate": AGGREGATE_COLUMNS[:-1],
    "sweep_detail": DETAIL_COLUMNS[:-1],
    "sweep_aggregate": AGGREGATE_COLUMNS[:-1],
    "sweep_best": BEST_COLUMNS,
}
SWEEP_AXES = ("gamma", "beta", "k")
SMALL_RATE_CUTOFF = 0.2


class ExperimentConfig(BaseModel):
    """One distortion-vs-rate study. k=None picks default_threshold(p)."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    p: float = Field(..., gt=0.0, lt=1.0)
    rates: List[float] = Field(..., min_length=1)
    N: int = Field(1000, ge=1)
    trials: int = Field(100, ge=1)
    k: Optional[float] = Field(None, ge=0.0, allow_inf_nan=False)
    beta: float = Field(DEFAULT_BETA, gt=0.0, allow_inf_nan=False)
    gamma: float = Field(DEFAULT_GAMMA, ge=0.0, lt=1.0)
    max_iters: int = Field(35, ge=1)
    init_amplitude: float = Field(0.1, ge=0.0, lt=1.0)
    epsilon_q: float = Field(1e-12, gt=0.0, lt=1.0)
    best_iterate: bool = False
    master_seed: int = Field(0, ge=0, le=MASK64)
    output: Optional[str] = None
    workers: int = Field(1, ge=1)
    small_rate_n: Optional[int] = Field(None, ge=1)

    @field_validator("rates")
    @classmethod
    def validate_rates(cls, v):
        for r in v:
            if not (0.0 < r <= 1.0):
                raise ValueError(f"rates must lie in (0, 1], got {r}")
        return v

    def n_for_rate(self, R: float) -> int:
        if self.small_rate_n is not None and R <= SMALL_RATE_CUTOFF:
            return self.small_rate_n
        return self.N

    def m_for_rate(self, R: float) -> int:
        # half-up rounding of N / R
        return max(1, int(math.floor(self.n_for_rate(R) / R + 0.5)))

    def threshold(self) -> float:
        return self.k if self.k is not None else default_threshold(self.p)

    def codec_params(self) -> CodecParams:
        return CodecParams(
            k=self.threshold(),
            beta=self.beta,
            gamma=self.gamma,
            max_iters=self.max_iters,
            init_amplitude=self.init_amplitude,
            epsilon_q=self.epsilon_q,
            best_iterate=self.best_iterate,
        )


@dataclass(frozen=True)
class TrialJob:
    p: float
    R: float
    N: int
    M: int
    trial: int
    seed: int
    params: CodecParams


@dataclass
class ExperimentResult:
    detail: pd.DataFrame
    aggregate: pd.DataFrame


@dataclass
class SweepResult:
    aggregate: pd.DataFrame
    detail: pd.DataFrame
    best: pd.DataFrame


def run_trial(job: TrialJob) -> Dict:
    """Encode one instance. Failures are reported in the row, never raised."""
    row = {"p": job.p, "R": job.R, "N": job.N, "M": job.M, "trial": job.trial, "seed": job.seed}
    try:
        rng = rng_from_seed(job.seed)
        y, codebook = gen_instance(job.p, job.M, job.N, rng)
        encoding = encode_bp(y, codebook, job.params, rng)
        row.update({
            "iters": len(encoding.trace),
            "converged": encoding.trace.converged,
            "distortion_bits": encoding.distortion,
            "distortion_per_bit": encoding.distortion / job.M,
            "error": "",
        })
    except Exception as e:
        row.update({
            "iters": 0,
            "converged": False,
            "distortion_bits": -1,
            "distortion_per_bit": float("nan"),
            "error": f"{type(e).__name__}: {e}",
        })
    return row


def build_jobs(cfg: ExperimentConfig) -> List[TrialJob]:
    """Trial jobs in (rate, trial) order with distinct child seeds."""
    params = cfg.codec_params()
    master = rng_from_seed(cfg.master_seed)
    seen = set()
    jobs = []
    for R in cfg.rates:
        for trial in range(cfg.trials):
            seed = master.next_u64()
            while seed in seen:
                seed = master.next_u64()
            seen.add(seed)
            jobs.append(TrialJob(p=cfg.p, R=float(R), N=cfg.n_for_rate(R), M=cfg.m_for_rate(R),
                                 trial=trial, seed=seed, params=params))
    return jobs


def _reference_distortion(p: float, R: float) -> float:
    h = float(binary_entropy(p))
    return 0.0 if R >= h else rdf_inverse(p, R)


def aggregate_rows(detail: pd.DataFrame, cfg: ExperimentConfig) -> pd.DataFrame:
    params = cfg.codec_params()
    rows = []
    for R in cfg.rates:
        group = detail[detail["R"] == float(R)]
        ok = group[group["error"] == ""]
        values = ok["distortion_per_bit"].to_numpy(dtype=np.float64)
        n_ok = int(values.size)
        mean = float(values.mean()) if n_ok else float("nan")
        stderr = float(values.std(ddof=1) / math.sqrt(n_ok)) if n_ok > 1 else 0.0
        rows.append({
            "p": cfg.p, "R": float(R), "N": cfg.n_for_rate(R), "M": cfg.m_for_rate(R),
            "trials": n_ok, "mean_D": mean, "stderr_D": stderr,
            "rdf_D": _reference_distortion(cfg.p, float(R)),
            "k": params.k, "beta": params.beta, "gamma": params.gamma,
            "failed": int(len(group) - n_ok),
        })
    return pd.DataFrame(rows, columns=AGGREGATE_COLUMNS)


def schema_line(df: pd.DataFrame, kind: str) -> str:
    """`# schema: <kind>/v1`, plus `; extra: a,b` when df carries columns outside the kind's base set."""
    line = f"# schema: {kind}/{SCHEMA_VERSION}"
    base = BASE_COLUMNS.get(kind)
    if base is not None:
        extra = [c for c in df.columns if c not in base]
        if extra:
            line += f"; extra: {','.join(extra)}"
    return line


def write_table(df: pd.DataFrame, path: Union[str, Path], kind: str) -> Path:
    """CSV whose first line is schema_line(df, kind)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        f.write(schema_line(df, kind) + "\n")
        df.to_csv(f, index=False, lineterminator="\n")
    return path


def read_table(path: Union[str, Path]) -> pd.DataFrame:
    df = pd.read_csv(path, comment="#", keep_default_na=False, na_values=["nan", "NaN"])
    if "error" in df.columns:
        df["error"] = df["error"].astype(str)
    return df


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    jobs = build_jobs(cfg)
    logger.info(f"Experiment p={cfg.p} rates={cfg.rates} trials={cfg.trials} "
                f"({len(jobs)} jobs, {cfg.workers} workers)")

    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as executor:
            rows = list(executor.map(run_trial, jobs, chunksize=max(1, len(jobs) // (4 * cfg.workers))))
    else:
        rows = [run_trial(job) for job in jobs]

    for row in rows:
        if row["error"]:
            logger.warning(f"Trial R={row['R']} #{row['trial']} (seed {row['seed']}) failed: {row['error']}")

    detail = pd.DataFrame(rows, columns=DETAIL_COLUMNS)
    aggregate = aggregate_rows(detail, cfg)
    for _, agg in aggregate.iterrows():
        logger.info(f"R={agg['R']:.3f} M={agg['M']}: mean D={agg['mean_D']:.4f} "
                    f"(+/- {agg['stderr_D']:.4f}, RDF {agg['rdf_D']:.4f}, failed {agg['failed']})")

    if cfg.output:
        stem = Path(cfg.output)
        write_table(detail, f"{stem}_detail.csv", "detail")
        write_table(aggregate, f"{stem}_aggregate.csv", "aggregate")
        logger.info(f"Wrote {stem}_detail.csv and {stem}_aggregate.csv")

    return ExperimentResult(detail=detail, aggregate=aggregate)


def sweep(cfg: ExperimentConfig, axis: str, grid: List[float]) -> SweepResult:
    """run_experiment once per grid value with `axis` overridden, same master seed each time."""
    if axis not in SWEEP_AXES:
        raise InvalidParameterError(f"sweep axis must be one of {SWEEP_AXES}, got {axis!r}")
    if not grid:
        raise InvalidParameterError("sweep grid must be nonempty")

    key = f"sweep_{axis}"
    aggregates, details = [], []
    for value in grid:
        point = ExperimentConfig(**{**cfg.model_dump(), axis: float(value), "output": None})
        logger.info(f"Sweep {axis}={value}")
        result = run_experiment(point)
        aggregates.append(result.aggregate.assign(**{key: float(value)}))
        details.append(result.detail.assign(**{key: float(value)}))

    aggregate = pd.concat(aggregates, ignore_index=True)
    aggregate = aggregate[[key] + AGGREGATE_COLUMNS]
    detail = pd.concat(details, ignore_index=True)
    detail = detail[[key] + DETAIL_COLUMNS]

    best_rows = []
    for R in cfg.rates:
        group = aggregate[aggregate["R"] == float(R)].dropna(subset=["mean_D"])
        if group.empty:
            continue
        winner = group.loc[group["mean_D"].idxmin()]
        best_rows.append({"p": cfg.p, "R": float(R), "axis": axis,
                          "best_value": float(winner[key]), "mean_D": float(winner["mean_D"])})
    best = pd.DataFrame(best_rows, columns=BEST_COLUMNS)

    if cfg.output:
        stem = Path(cfg.output)
        write_table(aggregate, f"{stem}_sweep_aggregate.csv", "sweep_aggregate")
        write_table(detail, f"{stem}_sweep_detail.csv", "sweep_detail")
        write_table(best, f"{stem}_sweep_best.csv", "sweep_best")

    return SweepResult(aggregate=aggregate, detail=detail, best=best)
