"""
Compressed container format ("PLC1").

Byte layout, multi-byte integers little-endian:

    offset  size  field
    0       4     magic b"PLC1"
    4       1     format version (1)
    5       8     codebook seed (u64)
    13      8     M (u64)
    21      8     N (u64)
    29      8     k (IEEE-754 binary64)
    37      ...   ceil(N/8) payload bytes; bit s_i at byte (i-1)//8, MSB first,
                  bit 1 <=> s_i = +1, padding bits zero

The codebook itself is never stored: the decoder regenerates it from the seed.
"""
import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple, Union

import numpy as np

from app.codec.perceptron import decode
from app.exceptions import (
    BadMagicError,
    ContainerError,
    ContainerIOError,
    DimensionMismatchError,
    NonzeroPaddingError,
    TrailingDataError,
    TruncatedContainerError,
    UnsupportedVersionError,
)
from app.logging_config import get_logger
from app.models import BinarySeq, Codebook

logger = get_logger(__name__)

MAGIC = b"PLC1"
FORMAT_VERSION = 1
HEADER = struct.Struct("<4sBQQQd")
HEADER_SIZE = HEADER.size  # 37


@dataclass(frozen=True)
class CompressedBlob:
    seed: int
    M: int
    N: int
    k: float
    payload: BinarySeq

    @property
    def rate(self) -> float:
        return self.N / self.M

    def to_bytes(self) -> bytes:
        header = HEADER.pack(MAGIC, FORMAT_VERSION, self.seed, self.M, self.N, float(self.k))
        payload = np.packbits(self.payload.to_bits(), bitorder="big").tobytes()
        return header + payload


def pack_blob(s: BinarySeq, codebook: Codebook, k: float) -> Tuple[CompressedBlob, bytes]:
    """Build the container for codeword s under `codebook` and threshold k."""
    if s.length != codebook.N:
        raise DimensionMismatchError("codeword vs codebook columns", codebook.N, s.length)
    blob = CompressedBlob(seed=codebook.seed, M=codebook.M, N=codebook.N, k=float(k), payload=s)
    return blob, blob.to_bytes()


def unpack_blob(data: bytes) -> CompressedBlob:
    """Parse a container produced by pack_blob."""
    data = bytes(data)
    if len(data) < len(MAGIC) or data[:len(MAGIC)] != MAGIC:
        raise BadMagicError(f"bad magic {data[:len(MAGIC)]!r}, expected {MAGIC!r}")
    if len(data) < HEADER_SIZE:
        if len(data) > len(MAGIC) and data[len(MAGIC)] != FORMAT_VERSION:
            raise UnsupportedVersionError(f"unsupported container version {data[len(MAGIC)]}")
        raise TruncatedContainerError(HEADER_SIZE * 8, len(data) * 8, part="header")

    magic, version, seed, M, N, k = HEADER.unpack_from(data)
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(f"unsupported container version {version}")
    if M < 1 or N < 1:
        raise ContainerError(f"container dimensions must be positive, got M={M}, N={N}")
    if not math.isfinite(k) or k < 0:
        raise ContainerError(f"container threshold k must be finite and >= 0, got {k}")

    n_bytes = (N + 7) // 8
    body = data[HEADER_SIZE:]
    if len(body) < n_bytes:
        raise TruncatedContainerError(N, len(body) * 8)
    if len(body) > n_bytes:
        raise TrailingDataError(f"{len(body) - n_bytes} unexpected bytes after the payload")

    bits = np.unpackbits(np.frombuffer(body, dtype=np.uint8), bitorder="big")
    if np.any(bits[N:]):
        raise NonzeroPaddingError(f"padding bits after bit {N} are not zero")

    return CompressedBlob(seed=seed, M=M, N=N, k=k, payload=BinarySeq.from_bits(bits[:N]))


def decode_blob(blob: CompressedBlob) -> BinarySeq:
    """Restore the representative vector from the container alone."""
    codebook = Codebook.from_seed(blob.seed, blob.M, blob.N)
    return decode(blob.payload, codebook, blob.k)


def write_blob(path: Union[str, Path], blob: CompressedBlob) -> int:
    """Write the container to `path`, returning the number of bytes written."""
    data = blob.to_bytes()
    written = 0
    try:
        with open(path, "wb") as f:
            while written < len(data):
                n = f.write(data[written:])
                written += n
    except OSError as e:
        raise ContainerIOError(str(path), written, str(e)) from e
    logger.debug(f"Wrote {written} bytes to {path} (M={blob.M}, N={blob.N})")
    return written


def read_blob(path: Union[str, Path]) -> CompressedBlob:
    """Read and parse a container file."""
    chunks = []
    position = 0
    try:
        with open(path, "rb") as f:
            while True:
                chunk = f.read(1 << 16)
                if not chunk:
                    break
                chunks.append(chunk)
                position += len(chunk)
    except OSError as e:
        raise ContainerIOError(str(path), position, str(e)) from e
    return unpack_blob(b"".join(chunks))
