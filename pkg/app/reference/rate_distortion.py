"""
Rate-distortion references for a Bernoulli(p) source under Hamming distortion.

The binary rate-distortion function is the textbook result

    R_c(D) = H2(p) - H2(D)   for 0 <= D < min(p, 1-p)
    R_c(D) = 0               for D >= min(p, 1-p)

in bits per source symbol. Rates of the perceptron code are R = N/M, so the
curve is directly comparable with measured (R, distortion per bit) pairs.
"""
from dataclasses import dataclass
from typing import List

import numpy as np
import pandas as pd

from app.core.mathutil import binary_entropy, inv_binary_entropy, inv_gaussian_tail
from app.exceptions import InvalidParameterError
from app.models import RdPoint

DEFAULT_CURVE_POINTS = 512
DEFAULT_BETA = 5.0
DEFAULT_GAMMA = 0.4
MAX_THRESHOLD_BIAS = 1.0 - 1e-6
RATE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class RdCurve:
    """
    RDF samples on a D-grid. Rates are kept as an array because the curve
    reaches R = 0, which an RdPoint (a code's N/M) cannot hold.
    """
    p: float
    distortions: np.ndarray
    rates: np.ndarray

    def points(self) -> List[RdPoint]:
        """The positive-rate part of the curve as RdPoints."""
        return [RdPoint(rate=float(r), distortion=float(d))
                for d, r in zip(self.distortions, self.rates) if r > 0.0]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"D": self.distortions, "R": self.rates})


def _check_bias(p: float):
    if not (0.0 < p < 1.0):
        raise InvalidParameterError(f"source bias p must lie in (0, 1), got {p}")


def rdf(p: float, D: float) -> float:
    """R_c(D) in bits per source symbol."""
    _check_bias(p)
    if not (0.0 <= D <= 1.0):
        raise InvalidParameterError(f"distortion D must lie in [0, 1], got {D}")
    if D >= min(p, 1.0 - p):
        return 0.0
    return max(binary_entropy(p) - binary_entropy(D), 0.0)


def rdf_inverse(p: float, R: float) -> float:
    """The distortion D in [0, min(p, 1-p)] with rdf(p, D) = R."""
    _check_bias(p)
    h_p = binary_entropy(p)
    if R < 0.0 or R > h_p + RATE_TOL:
        raise InvalidParameterError(f"rate must lie in [0, H2(p)={h_p:.6f}], got {R}")
    if R >= h_p:
        return 0.0
    return min(inv_binary_entropy(h_p - R), min(p, 1.0 - p))


def rd_curve(p: float, points: int = DEFAULT_CURVE_POINTS) -> RdCurve:
    """RDF sampled on a uniform D-grid over [0, min(p, 1-p)]."""
    _check_bias(p)
    if points < 2:
        raise InvalidParameterError("an RD curve needs at least 2 points")
    grid = np.linspace(0.0, min(p, 1.0 - p), points)
    rates = np.array([rdf(p, float(d)) for d in grid])
    return RdCurve(p=p, distortions=grid, rates=rates)


def default_threshold(p: float) -> float:
    """
    Threshold k with P(|z| < k) = p for standard normal z, i.e.
    1 - 2 H(k) = p. A random codeword then yields +1 outputs at the source rate.
    Heuristic stand-in for replica-optimal thresholds.
    """
    _check_bias(p)
    if p > MAX_THRESHOLD_BIAS:
        raise InvalidParameterError(f"default threshold undefined for p > {MAX_THRESHOLD_BIAS}")
    return inv_gaussian_tail((1.0 - p) / 2.0)
