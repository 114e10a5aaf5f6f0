"""Numerical building blocks shared by the encoders and references."""
