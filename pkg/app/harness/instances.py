"""
Random problem instances: a Bernoulli(p) source word and a Gaussian codebook.

Draw order is part of the reproducibility contract:
  1. M uniforms, y_mu = +1 iff u_mu < p
  2. one u64 child seed
  3. the codebook regenerated from the child seed (see Codebook.from_seed)
"""
from typing import NamedTuple

import numpy as np

from app.exceptions import InvalidParameterError
from app.harness.rng import RngStream
from app.models import BinarySeq, Codebook


class Instance(NamedTuple):
    y: BinarySeq
    codebook: Codebook


def gen_source(p: float, M: int, rng: RngStream) -> BinarySeq:
    """M i.i.d. symbols with P(+1) = p, one uniform per symbol."""
    if not (0.0 <= p <= 1.0):
        raise InvalidParameterError(f"source bias p must lie in [0, 1], got {p}")
    if M < 1:
        raise InvalidParameterError(f"M must be positive, got {M}")
    u = rng.uniforms(M)
    return BinarySeq(np.where(u < p, 1, -1))


def gen_instance(p: float, M: int, N: int, rng: RngStream) -> Instance:
    if N < 1:
        raise InvalidParameterError(f"N must be positive, got {N}")
    y = gen_source(p, M, rng)
    child_seed = rng.next_u64()
    return Instance(y=y, codebook=Codebook.from_seed(child_seed, M, N))
