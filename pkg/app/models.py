"""
Core data models for the perceptron lossy codec.

These models represent the primary data structures shared by the decoder, the
encoders, the oracles and the experiment harness. All of them are immutable
after construction (numpy buffers are marked read-only), so they can be shared
across workers.
"""
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.exceptions import DimensionMismatchError, InvalidParameterError, InvalidSymbolError
from app.harness.rng import MASK64, rng_from_seed


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class BinarySeq:
    """
    A nonempty sequence of +1/-1 symbols.

    Used for original data y (length M), the representative vector y_hat
    (length M) and the compressed word s (length N). Symbols are stored as
    signed units, not bits.
    """
    values: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.values)
        if raw.ndim != 1 or raw.size == 0:
            raise InvalidSymbolError("a binary sequence must be a nonempty 1-D sequence")
        if not np.all((raw == 1) | (raw == -1)):
            bad = raw[(raw != 1) & (raw != -1)][:5]
            raise InvalidSymbolError(f"symbols must be +1 or -1, found {bad.tolist()}")
        object.__setattr__(self, "values", _readonly(raw.astype(np.int8)))

    @classmethod
    def from_bytes(cls, raw: bytes) -> "BinarySeq":
        """One signed byte per symbol: 0x01 is +1, 0xFF is -1."""
        return cls(np.frombuffer(bytes(raw), dtype=np.int8))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BinarySeq":
        """Bit 1 maps to +1, bit 0 to -1."""
        b = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits)
        if b.size and not np.all((b == 0) | (b == 1)):
            raise InvalidSymbolError("bits must be 0 or 1")
        return cls(np.where(b == 1, 1, -1))

    def to_bits(self) -> np.ndarray:
        return (self.values == 1).astype(np.uint8)

    @property
    def length(self) -> int:
        return int(self.values.size)

    def fraction_positive(self) -> float:
        return float(np.mean(self.values == 1))

    def __len__(self) -> int:
        return self.length

    def __neg__(self) -> "BinarySeq":
        return BinarySeq(-self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinarySeq):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash(self.values.tobytes())

    def __repr__(self) -> str:
        head = "".join("+" if v == 1 else "-" for v in self.values[:32])
        tail = "..." if self.length > 32 else ""
        return f"BinarySeq(length={self.length}, {head}{tail})"


@dataclass(frozen=True)
class SourceModel:
    """Binary memoryless source with P(y = +1) = p."""
    p: float

    def __post_init__(self):
        if not (0.0 < self.p < 1.0):
            raise InvalidParameterError(f"source bias p must lie in (0, 1), got {self.p}")


@dataclass(frozen=True, eq=False)
class Codebook:
    """
    The M x N matrix of Gaussian vectors x^mu shared by encoder and decoder.

    Entries are standard normals drawn row-major from the stream of `seed`
    (see app.harness.rng). Persisted artifacts carry only the seed.
    """
    seed: int
    rows: int
    cols: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not (0 <= self.seed <= MASK64):
            raise InvalidParameterError(f"codebook seed must be a u64, got {self.seed}")
        if self.rows < 1 or self.cols < 1:
            raise InvalidParameterError(f"codebook dimensions must be positive, got {self.rows}x{self.cols}")
        entries = np.asarray(self.entries, dtype=np.float64)
        if entries.shape != (self.rows, self.cols):
            raise DimensionMismatchError("codebook entries", self.rows * self.cols, entries.size)
        object.__setattr__(self, "entries", _readonly(entries))

    @classmethod
    def from_seed(cls, seed: int, rows: int, cols: int) -> "Codebook":
        if rows < 1 or cols < 1:
            raise InvalidParameterError(f"codebook dimensions must be positive, got {rows}x{cols}")
        rng = rng_from_seed(seed)
        entries = rng.normals(rows * cols).reshape(rows, cols)
        return cls(seed=seed, rows=rows, cols=cols, entries=entries)

    @property
    def M(self) -> int:
        return self.rows

    @property
    def N(self) -> int:
        return self.cols

    def verify(self) -> bool:
        """True iff regenerating from (seed, M, N) reproduces the stored entries bit for bit."""
        regenerated = Codebook.from_seed(self.seed, self.rows, self.cols)
        return np.array_equal(regenerated.entries, self.entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Codebook):
            return NotImplemented
        return (self.seed, self.rows, self.cols) == (other.seed, other.rows, other.cols) \
            and np.array_equal(self.entries, other.entries)

    __hash__ = None


class CodecParams(BaseModel):
    """
    Encoder parameters: threshold k, inverse temperature beta, inertia gamma,
    iteration budget T, initialization amplitude delta and the 1-q clamp.
    """
    model_config = ConfigDict(frozen=True)

    k: float = Field(..., ge=0.0, allow_inf_nan=False)
    beta: float = Field(5.0, gt=0.0, allow_inf_nan=False)
    gamma: float = Field(0.4, ge=0.0, le=1.0)
    max_iters: int = Field(35, ge=1)
    init_amplitude: float = Field(0.1, ge=0.0, lt=1.0)
    epsilon_q: float = Field(1e-12, gt=0.0, lt=1.0)
    best_iterate: bool = False

    @field_validator("gamma")
    @classmethod
    def validate_gamma(cls, v):
        # atanh(gamma * m) diverges as |m| -> 1 when gamma == 1
        if v >= 1.0:
            raise ValueError("gamma must be < 1 (gamma = 1 makes atanh(gamma*m) unbounded)")
        return v


@dataclass(frozen=True)
class RdPoint:
    """A (rate, distortion) pair."""
    rate: float
    distortion: float

    def __post_init__(self):
        if not self.rate > 0.0:
            raise InvalidParameterError(f"rate must be positive, got {self.rate}")
        if not (0.0 <= self.distortion <= 1.0):
            raise InvalidParameterError(f"distortion must lie in [0, 1], got {self.distortion}")


def validate_instance(y: BinarySeq, codebook: Codebook) -> None:
    """Check that the data length matches the codebook's M."""
    if y.length != codebook.M:
        raise DimensionMismatchError("data vs codebook rows", codebook.M, y.length)


def as_binary_seq(values: Union[BinarySeq, Sequence[int], np.ndarray]) -> BinarySeq:
    return values if isinstance(values, BinarySeq) else BinarySeq(np.asarray(values))


__all__: List[str] = [
    "BinarySeq", "SourceModel", "Codebook", "CodecParams", "RdPoint",
    "validate_instance", "as_binary_seq",
]
