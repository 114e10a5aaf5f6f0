"""
The deterministic side of the perceptron code.

Decoder map: y_hat^mu = f_k( sum_i x_i^mu s_i / sqrt(N) ), with the two-threshold
output function f_k(u) = +1 for |u| < k and -1 otherwise. Distortion is the
Hamming distance between y and y_hat.
"""
from typing import Union

import numpy as np

from app.exceptions import DimensionMismatchError, InvalidParameterError
from app.models import BinarySeq, Codebook


def output_fk(u: Union[float, np.ndarray], k: float) -> Union[int, np.ndarray]:
    """+1 iff |u| < k, else -1. The boundary |u| == k maps to -1."""
    if k < 0:
        raise InvalidParameterError(f"threshold k must be >= 0, got {k}")
    out = np.where(np.abs(u) < k, 1, -1).astype(np.int8)
    return int(out) if out.ndim == 0 else out


def local_fields(s: BinarySeq, codebook: Codebook) -> np.ndarray:
    """u^mu = (x^mu . s) / sqrt(N) for every mu."""
    if s.length != codebook.N:
        raise DimensionMismatchError("codeword vs codebook columns", codebook.N, s.length)
    return codebook.entries @ s.values.astype(np.float64) / np.sqrt(codebook.N)


def decode(s: BinarySeq, codebook: Codebook, k: float) -> BinarySeq:
    """Map a compressed word of length N to its representative vector of length M."""
    return BinarySeq(output_fk(local_fields(s, codebook), k))


def hamming_distortion(y: BinarySeq, y_hat: BinarySeq) -> int:
    """Number of positions where y and y_hat disagree, sum (1 - y y_hat) / 2."""
    if y.length != y_hat.length:
        raise DimensionMismatchError("distortion operands", y.length, y_hat.length)
    return int(np.count_nonzero(y.values != y_hat.values))
