"""
Belief-propagation encoder for the perceptron code.

Approximates the marginals of the Boltzmann distribution
P(s) ~ exp[-beta * distortion(y, decode(s))] with the Gaussian-reduced message
passing (TAP form) and reads the codeword off the signs of the magnetizations.

One sweep, in this fixed order:

    1. Delta_mu = sum_i x_i^mu m_i / sqrt(N)
    2. q        = sum_i m_i^2 / N
    3. per factor, closed-form integrals at U_mu = Delta_mu - (1-q) a_mu + sqrt(1-q) z
       a_mu <- i1 / i0
       G    <- sum_mu [ i2/i0 - (i1/i0)^2 ]
    4. m_l  <- tanh[ sum_mu x_l^mu a_mu / sqrt(N) - (G/N) m_l + atanh(gamma m_l) ]

The zero magnetization is a fixed point (Xi is even in U), so the state starts
from a small random m and the inertia term atanh(gamma m) amplifies the asymmetry.
"""
import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional

import numpy as np

from app.codec.perceptron import decode, hamming_distortion
from app.core.mathutil import xi_integrals
from app.exceptions import ChannelDegeneracyError, DimensionMismatchError, InvalidParameterError, NumericOverflowError
from app.harness.rng import RngStream
from app.logging_config import get_logger
from app.models import BinarySeq, Codebook, CodecParams, validate_instance

logger = get_logger(__name__)

I0_FLOOR = 1e-300
CONVERGENCE_TOL = 1e-8
M_LIMIT = np.nextafter(1.0, 0.0)  # largest double below 1


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.float64, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class BpState:
    """Encoder state after `t` sweeps."""
    m: np.ndarray   # posterior magnetizations, length N
    a: np.ndarray   # cavity ratios, length M
    g: float        # Onsager coefficient
    q: float        # overlap sum(m^2)/N
    t: int = 0

    def __post_init__(self):
        object.__setattr__(self, "m", _readonly(self.m))
        object.__setattr__(self, "a", _readonly(self.a))


@dataclass(frozen=True)
class BpTraceRecord:
    iteration: int
    q: float
    mean_abs_m: float
    distortion: int
    max_delta_m: float


@dataclass
class BpTrace:
    records: List[BpTraceRecord] = field(default_factory=list)
    best_iterate: bool = False
    selected_iteration: int = 0

    @property
    def converged(self) -> bool:
        return bool(self.records) and self.records[-1].max_delta_m < CONVERGENCE_TOL

    def __len__(self) -> int:
        return len(self.records)


class BpEncoding(NamedTuple):
    codeword: BinarySeq
    distortion: int
    trace: BpTrace


def _overlap(m: np.ndarray) -> float:
    return float(np.dot(m, m) / m.size)


def init_state(N: int, M: int, delta: float, rng: RngStream) -> BpState:
    """m_l i.i.d. uniform on [-delta, delta]; a = 0, g = 0, t = 0."""
    if not (0.0 <= delta < 1.0):
        raise InvalidParameterError(f"init amplitude must lie in [0, 1), got {delta}")
    if N < 1 or M < 1:
        raise InvalidParameterError(f"dimensions must be positive, got N={N}, M={M}")
    m = delta * (2.0 * rng.uniforms(N) - 1.0)
    return BpState(m=m, a=np.zeros(M), g=0.0, q=_overlap(m), t=0)


def bp_step(state: BpState, y: BinarySeq, codebook: Codebook, params: CodecParams) -> BpState:
    """One parallel sweep; returns a new state and leaves the inputs untouched."""
    validate_instance(y, codebook)
    if state.m.size != codebook.N or state.a.size != codebook.M:
        raise DimensionMismatchError("state vs codebook", codebook.N, state.m.size)

    x = codebook.entries
    n = codebook.N
    sqrt_n = math.sqrt(n)
    m = state.m

    delta = x @ m / sqrt_n
    q = _overlap(m)

    try:
        integrals = xi_integrals(
            y.values, delta, state.a, q, params.k, params.beta, epsilon_q=params.epsilon_q
        )
    except NumericOverflowError as e:
        raise e.at_iteration(state.t + 1) from e

    i0 = np.asarray(integrals.i0)
    low = np.flatnonzero(i0 < I0_FLOOR)
    if low.size:
        raise ChannelDegeneracyError(iteration=state.t + 1, factor=int(low[0]), i0=float(i0[low[0]]))

    a_new = np.asarray(integrals.i1) / i0
    # fsum is exactly rounded, so G does not depend on summation order
    g_new = math.fsum((np.asarray(integrals.i2) / i0 - a_new * a_new).tolist())

    field_ = x.T @ a_new / sqrt_n - (g_new / n) * m + np.arctanh(params.gamma * m)
    m_new = np.clip(np.tanh(field_), -M_LIMIT, M_LIMIT)

    return BpState(m=m_new, a=a_new, g=g_new, q=_overlap(m_new), t=state.t + 1)


def readout(state: BpState) -> BinarySeq:
    """s_l = sgn(m_l), with m_l == 0 resolved to +1."""
    return BinarySeq(np.where(state.m < 0.0, -1, 1))


def encode_bp(y: BinarySeq, codebook: Codebook, params: CodecParams, rng: RngStream,
              iters: Optional[int] = None) -> BpEncoding:
    """
    Run `iters` sweeps (default params.max_iters) from a random start and read out the codeword.

    The final iterate is returned unless params.best_iterate is set, in which case the
    readout with the lowest distortion over the initialization and all sweeps wins
    (earliest on ties, so a start that no sweep improves on is kept).
    """
    validate_instance(y, codebook)
    n_iters = params.max_iters if iters is None else int(iters)
    if n_iters < 0:
        raise InvalidParameterError(f"iteration count must be >= 0, got {n_iters}")

    state = init_state(codebook.N, codebook.M, params.init_amplitude, rng)
    trace = BpTrace(best_iterate=params.best_iterate)

    word = readout(state)
    distortion = hamming_distortion(y, decode(word, codebook, params.k))
    best = (word, distortion, state.t)

    for _ in range(n_iters):
        new_state = bp_step(state, y, codebook, params)
        word = readout(new_state)
        distortion = hamming_distortion(y, decode(word, codebook, params.k))
        record = BpTraceRecord(
            iteration=new_state.t,
            q=new_state.q,
            mean_abs_m=float(np.mean(np.abs(new_state.m))),
            distortion=distortion,
            max_delta_m=float(np.max(np.abs(new_state.m - state.m))),
        )
        trace.records.append(record)
        logger.debug(
            f"BP t={record.iteration}: q={record.q:.4f} <|m|>={record.mean_abs_m:.4f} "
            f"D={distortion} max|dm|={record.max_delta_m:.2e}"
        )
        if distortion < best[1]:
            best = (word, distortion, new_state.t)
        state = new_state

    if params.best_iterate:
        trace.selected_iteration = best[2]
        return BpEncoding(best[0], best[1], trace)

    trace.selected_iteration = state.t
    return BpEncoding(word, distortion, trace)
