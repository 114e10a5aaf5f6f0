"""
Rate-distortion references and parameter heuristics.
"""
from .rate_distortion import (
    RdCurve, rdf, rdf_inverse, rd_curve, default_threshold, DEFAULT_BETA, DEFAULT_GAMMA,
)

__all__ = ['RdCurve', 'rdf', 'rdf_inverse', 'rd_curve', 'default_threshold', 'DEFAULT_BETA', 'DEFAULT_GAMMA']
