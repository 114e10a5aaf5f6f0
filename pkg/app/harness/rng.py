"""
Seeded random number contract shared by encoder and decoder.

The codebook is never stored; both ends regenerate it from a 64-bit seed, so the
generator is fixed bit-for-bit:

- seeding: the 64-bit seed is expanded through SplitMix64 (four outputs) into the
  256-bit xoshiro256** state. An all-zero state is rejected by re-seeding with
  seed+1.
- stream: xoshiro256** (Blackman & Vigna), one u64 per step.
- uniforms: u = (x >> 11) * 2^-53 in [0, 1). Box-Muller maps u == 0 to 2^-53 so
  its inputs lie in (0, 1].
- normals: Box-Muller on consecutive uniform pairs (u1, u2):
  z = sqrt(-2 ln u1) cos(2 pi u2); the companion sine value is returned by the
  next call.

Everything here is plain Python integer arithmetic and `math` so the stream does
not depend on numpy's SIMD code paths.
"""
import math
from typing import List, Optional, Tuple

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF

SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
SPLITMIX_MUL1 = 0xBF58476D1CE4E5B9
SPLITMIX_MUL2 = 0x94D049BB133111EB

TWO_NEG_53 = 1.0 / (1 << 53)
TWO_PI = 2.0 * math.pi


def splitmix64(state: int) -> Tuple[int, int]:
    """One SplitMix64 step. Returns (new_state, output)."""
    state = (state + SPLITMIX_GAMMA) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * SPLITMIX_MUL1) & MASK64
    z = ((z ^ (z >> 27)) * SPLITMIX_MUL2) & MASK64
    return state, z ^ (z >> 31)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class RngStream:
    """xoshiro256** stream with the uniform and Gaussian contracts above."""

    def __init__(self, state: Tuple[int, int, int, int], seed: Optional[int] = None):
        if len(state) != 4 or not any(state):
            raise ValueError("xoshiro256** state must be four u64 words, not all zero")
        self._s0, self._s1, self._s2, self._s3 = (int(w) & MASK64 for w in state)
        self._spare: Optional[float] = None
        self.seed = seed

    @property
    def state(self) -> Tuple[int, int, int, int]:
        return (self._s0, self._s1, self._s2, self._s3)

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s0, self._s1, self._s2, self._s3
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s0, self._s1, self._s2, self._s3 = s0, s1, s2, s3
        return result

    def next_uniform(self) -> float:
        """Uniform on [0, 1) with 53-bit resolution."""
        return (self.next_u64() >> 11) * TWO_NEG_53

    def _next_uniform_open(self) -> float:
        """Uniform on (0, 1]: zero is replaced by 2^-53."""
        u = (self.next_u64() >> 11) * TWO_NEG_53
        return u if u > 0.0 else TWO_NEG_53

    def next_gaussian(self) -> float:
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        u1 = self._next_uniform_open()
        u2 = self._next_uniform_open()
        radius = math.sqrt(-2.0 * math.log(u1))
        angle = TWO_PI * u2
        self._spare = radius * math.sin(angle)
        return radius * math.cos(angle)

    def normals(self, count: int) -> np.ndarray:
        """`count` draws, identical to calling next_gaussian() `count` times."""
        out: List[float] = []
        append = out.append
        if count > 0 and self._spare is not None:
            append(self._spare)
            self._spare = None
        sqrt, log, sin, cos = math.sqrt, math.log, math.sin, math.cos
        uniform = self._next_uniform_open
        while len(out) < count:
            radius = sqrt(-2.0 * log(uniform()))
            angle = TWO_PI * uniform()
            append(radius * cos(angle))
            spare = radius * sin(angle)
            if len(out) < count:
                append(spare)
            else:
                self._spare = spare
        return np.asarray(out, dtype=np.float64)

    def uniforms(self, count: int) -> np.ndarray:
        """`count` draws of next_uniform()."""
        return np.asarray([self.next_uniform() for _ in range(count)], dtype=np.float64)

    def next_below(self, n: int) -> int:
        """Integer in [0, n) by multiply-shift on one u64."""
        if n <= 0:
            raise ValueError("n must be positive")
        return (self.next_u64() * n) >> 64

    def permutation(self, n: int) -> List[int]:
        """Fisher-Yates shuffle of range(n)."""
        order = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.next_below(i + 1)
            order[i], order[j] = order[j], order[i]
        return order

    def split(self) -> "RngStream":
        """Child stream seeded by one u64 drawn from this stream."""
        return rng_from_seed(self.next_u64())


def seed_state(seed: int) -> Tuple[int, int, int, int]:
    """Expand a 64-bit seed into a xoshiro256** state through SplitMix64."""
    state = seed & MASK64
    words = []
    for _ in range(4):
        state, out = splitmix64(state)
        words.append(out)
    return tuple(words)


def rng_from_seed(seed: int) -> RngStream:
    """Build the stream for `seed`; the all-zero state re-seeds with seed+1."""
    if seed < 0:
        raise ValueError("seed must be an unsigned 64-bit integer")
    seed &= MASK64
    state = seed_state(seed)
    while not any(state):
        seed = (seed + 1) & MASK64
        state = seed_state(seed)
    return RngStream(state, seed=seed)
