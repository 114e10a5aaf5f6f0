"""
Encoders: belief propagation and the enumeration oracles.
"""
from .bp_encoder import BpState, BpTrace, BpTraceRecord, BpEncoding, init_state, bp_step, readout, encode_bp
from .oracle import (
    ExponentEstimate, OracleEncoding, encode_exhaustive, encode_greedy, boltzmann_magnetizations,
    estimate_tail_probability,
)

__all__ = [
    'BpState', 'BpTrace', 'BpTraceRecord', 'BpEncoding', 'init_state', 'bp_step', 'readout', 'encode_bp',
    'ExponentEstimate', 'OracleEncoding', 'encode_exhaustive', 'encode_greedy',
    'boltzmann_magnetizations', 'estimate_tail_probability',
]
