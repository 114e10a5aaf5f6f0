"""
Ground-truth and baseline encoders, plus Monte Carlo tail probabilities.

encode_exhaustive enumerates the half cube s_1 = +1 in Gray-code order. decode is
even in s, so the mirror half holds the same distortions and the lexicographically
smallest minimizer (+1 before -1, s_1 most significant) always lies in this half.

Words are carried as integers: bit (N-1-i) set means s_i = -1, so comparing the
integers compares the words lexicographically.
"""
import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional, Tuple

import numpy as np

from app.codec.perceptron import decode, hamming_distortion, local_fields, output_fk
from app.exceptions import InstanceTooLargeError, InvalidParameterError
from app.harness.instances import gen_instance
from app.harness.rng import RngStream
from app.logging_config import get_logger
from app.models import BinarySeq, Codebook, SourceModel, validate_instance
from app.reference.rate_distortion import rdf

logger = get_logger(__name__)

EXHAUSTIVE_MAX_N = 24
BOLTZMANN_MAX_N = 20
CHUNK_SIZE = 4096
REGIMES = ("auto", "failure", "success")
BOUNDARY_RULE = "failure iff lambda >= D"


class OracleEncoding(NamedTuple):
    codeword: BinarySeq
    distortion: int


@dataclass(frozen=True)
class ExponentEstimate:
    """Empirical P_F (regime "failure") or P_S (regime "success") at one (M, R, D)."""
    M: int
    R: float
    D: float
    trials: int
    p_hat: float
    rate_estimate: Optional[float]
    regime: str
    r_c: float
    boundary_rule: str = BOUNDARY_RULE

    def __post_init__(self):
        if not (0.0 <= self.p_hat <= 1.0):
            raise InvalidParameterError(f"p_hat must lie in [0, 1], got {self.p_hat}")
        if (self.rate_estimate is None) != (self.p_hat == 0.0):
            raise InvalidParameterError("rate_estimate is defined exactly when p_hat > 0")


def _words_from_ints(codes: np.ndarray, n: int) -> np.ndarray:
    """Integer codes -> (len(codes), n) array of +1/-1, s_1 from the top bit."""
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    bits = (np.asarray(codes, dtype=np.int64)[:, None] >> shifts) & 1
    return (1 - 2 * bits).astype(np.int8)


def _lowest_set_bit(i: np.ndarray) -> np.ndarray:
    # i & -i is a power of two, frexp gives its exponent + 1
    return np.frexp((i & -i).astype(np.float64))[1].astype(np.int64) - 1


def _gray_distortions(y: BinarySeq, codebook: Codebook, k: float, free_bits: int,
                      chunk_size: int = CHUNK_SIZE) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """
    Yield (codes, distortions) chunk by chunk over the 2^free_bits words whose top
    N - free_bits positions are +1, in Gray-code order.

    Each chunk anchors its fields with one direct product and then walks the code
    with single-column updates u <- u - 2 s_p x_p / sqrt(N).
    """
    n = codebook.N
    columns = codebook.entries.T / math.sqrt(n)
    target_inside = y.values == 1
    total = 1 << free_bits

    for start in range(0, total, chunk_size):
        idx = np.arange(start, min(start + chunk_size, total), dtype=np.int64)
        codes = idx ^ (idx >> 1)

        fields = np.empty((idx.size, codebook.M))
        anchor = BinarySeq(_words_from_ints(codes[:1], n)[0])
        fields[0] = local_fields(anchor, codebook)
        if idx.size > 1:
            flipped = _lowest_set_bit(idx[1:])
            now_negative = (codes[1:] >> flipped) & 1
            step = np.where(now_negative == 1, -2.0, 2.0)
            deltas = step[:, None] * columns[n - 1 - flipped]
            fields[1:] = fields[0] + np.cumsum(deltas, axis=0)

        inside = np.abs(fields) < k
        distortions = np.count_nonzero(inside != target_inside, axis=1)
        yield codes, distortions


def _check_threshold(k: float):
    if not (k >= 0.0 and math.isfinite(k)):
        raise InvalidParameterError(f"threshold k must be finite and >= 0, got {k}")


def encode_exhaustive(y: BinarySeq, codebook: Codebook, k: float) -> OracleEncoding:
    """Exact argmin of the distortion over all 2^N words, lexicographically first on ties."""
    validate_instance(y, codebook)
    _check_threshold(k)
    n = codebook.N
    if n > EXHAUSTIVE_MAX_N:
        raise InstanceTooLargeError(n, EXHAUSTIVE_MAX_N)

    best_key = None
    for codes, distortions in _gray_distortions(y, codebook, k, free_bits=n - 1):
        # distortion dominates, the word code breaks ties
        keys = distortions.astype(np.int64) * (1 << n) + codes
        chunk_best = int(keys.min())
        if best_key is None or chunk_best < best_key:
            best_key = chunk_best

    best_code = best_key & ((1 << n) - 1)
    s = BinarySeq(_words_from_ints(np.array([best_code]), n)[0])
    distortion = hamming_distortion(y, decode(s, codebook, k))
    logger.debug(f"Exhaustive search N={n} M={codebook.M}: min distortion {distortion}")
    return OracleEncoding(s, distortion)


def encode_greedy(y: BinarySeq, codebook: Codebook, k: float, max_passes: int,
                  rng: RngStream) -> OracleEncoding:
    """Single-flip descent from a random word; positions visited in a fresh random order per pass."""
    validate_instance(y, codebook)
    _check_threshold(k)
    if max_passes < 1:
        raise InvalidParameterError(f"max_passes must be >= 1, got {max_passes}")

    n = codebook.N
    columns = codebook.entries.T / math.sqrt(n)
    s = np.where(rng.uniforms(n) < 0.5, 1, -1).astype(np.int8)
    fields = local_fields(BinarySeq(s), codebook)
    current = hamming_distortion(y, BinarySeq(output_fk(fields, k)))

    for sweep in range(max_passes):
        improved = False
        for pos in rng.permutation(n):
            trial = fields - 2.0 * s[pos] * columns[pos]
            d = int(np.count_nonzero(output_fk(trial, k) != y.values))
            if d < current:
                s[pos] = -s[pos]
                fields = local_fields(BinarySeq(s), codebook)
                current = hamming_distortion(y, BinarySeq(output_fk(fields, k)))
                improved = True
        if not improved:
            logger.debug(f"Greedy descent stable after {sweep + 1} passes, distortion {current}")
            break

    word = BinarySeq(s)
    return OracleEncoding(word, hamming_distortion(y, decode(word, codebook, k)))


def boltzmann_magnetizations(y: BinarySeq, codebook: Codebook, k: float, beta: float,
                             break_symmetry: bool = False) -> np.ndarray:
    """
    Exact <s_i> under P(s) ~ exp(-beta * distortion) by enumeration.

    The full-cube measure is mirror symmetric, so its magnetizations vanish.
    break_symmetry restricts the measure to s_1 = +1.
    """
    validate_instance(y, codebook)
    _check_threshold(k)
    if not (beta > 0.0 and math.isfinite(beta)):
        raise InvalidParameterError(f"beta must be finite and > 0, got {beta}")
    n = codebook.N
    if n > BOLTZMANN_MAX_N:
        raise InstanceTooLargeError(n, BOLTZMANN_MAX_N)

    free_bits = n - 1 if break_symmetry else n
    chunks = list(_gray_distortions(y, codebook, k, free_bits=free_bits))
    d_min = min(int(d.min()) for _, d in chunks)

    partition = 0.0
    weighted = np.zeros(n)
    for codes, distortions in chunks:
        w = np.exp(-beta * (distortions - d_min))
        partition += float(w.sum())
        weighted += w @ _words_from_ints(codes, n).astype(np.float64)
    return weighted / partition


def estimate_tail_probability(source: SourceModel, M: int, R: float, D: float, k: float,
                              trials: int, rng: RngStream, regime: str = "auto") -> ExponentEstimate:
    """
    Fraction of random instances whose optimal per-bit distortion lambda breaks
    (regime "failure": lambda >= D) or meets (regime "success": lambda < D) the
    fidelity D. "auto" picks failure when R > R_c(D), success otherwise.
    """
    if trials < 1:
        raise InvalidParameterError(f"trials must be >= 1, got {trials}")
    if M < 1:
        raise InvalidParameterError(f"M must be positive, got {M}")
    if not (0.0 < R <= 1.0):
        raise InvalidParameterError(f"rate must lie in (0, 1], got {R}")
    if not (0.0 < D <= 1.0):
        raise InvalidParameterError(f"distortion D must lie in (0, 1], got {D}")
    if regime not in REGIMES:
        raise InvalidParameterError(f"regime must be one of {REGIMES}, got {regime!r}")

    n = max(1, int(math.floor(R * M + 0.5)))
    if n > EXHAUSTIVE_MAX_N:
        raise InstanceTooLargeError(n, EXHAUSTIVE_MAX_N)

    r_c = rdf(source.p, D)
    if regime == "auto":
        regime = "failure" if R > r_c else "success"

    hits = 0
    for _ in range(trials):
        y, codebook = gen_instance(source.p, M, n, rng)
        lam = encode_exhaustive(y, codebook, k).distortion / M
        hits += (lam >= D) if regime == "failure" else (lam < D)

    p_hat = hits / trials
    rate_estimate = max(0.0, -math.log(p_hat) / M) if p_hat > 0.0 else None
    logger.info(f"Tail estimate M={M} N={n} D={D}: regime={regime} p_hat={p_hat:.4f} ({hits}/{trials})")
    return ExponentEstimate(M=M, R=R, D=D, trials=trials, p_hat=p_hat, rate_estimate=rate_estimate,
                            regime=regime, r_c=r_c)
