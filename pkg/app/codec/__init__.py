"""
Codec module: output function, decoder map, Hamming distortion and the container format.
"""
from .perceptron import output_fk, decode, hamming_distortion, local_fields
from .container import CompressedBlob, pack_blob, unpack_blob, decode_blob, write_blob, read_blob

__all__ = [
    'output_fk', 'decode', 'hamming_distortion', 'local_fields',
    'CompressedBlob', 'pack_blob', 'unpack_blob', 'decode_blob', 'write_blob', 'read_blob',
]
