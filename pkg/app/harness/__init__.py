"""Seeded randomness, instance generation, experiment runner and CLI."""
