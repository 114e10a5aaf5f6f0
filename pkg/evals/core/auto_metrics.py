"""Automated checks on tuned distortion-vs-rate curves."""
from typing import Dict

import pandas as pd


def tuned_curve(sweep_aggregate: pd.DataFrame, best: pd.DataFrame, axis: str = "gamma") -> pd.DataFrame:
    """Aggregate rows at the best grid value per rate, sorted by R."""
    key = f"sweep_{axis}"
    picked = best[["p", "R", "best_value"]].rename(columns={"best_value": key})
    curve = sweep_aggregate.merge(picked, on=["p", "R", key], how="inner")
    return curve.sort_values(["p", "R"]).reset_index(drop=True)


def is_strictly_decreasing(curve: pd.DataFrame) -> bool:
    """Mean distortion strictly decreases as the rate grows."""
    values = curve.sort_values("R")["mean_D"].to_list()
    return all(b < a for a, b in zip(values, values[1:]))


def min_baseline_margin(curve: pd.DataFrame, baseline: float = 0.5) -> float:
    """Smallest gap below the zero-information distortion."""
    return float((baseline - curve["mean_D"]).min())


def rdf_gaps(curve: pd.DataFrame) -> pd.Series:
    """mean_D - rdf_D, indexed by R."""
    ordered = curve.sort_values("R")
    return pd.Series((ordered["mean_D"] - ordered["rdf_D"]).to_numpy(), index=ordered["R"].to_numpy())


def gap_shrinks_at_low_rate(curve: pd.DataFrame) -> bool:
    """The gap to the RDF gets smaller each time the rate decreases."""
    gaps = rdf_gaps(curve).to_list()
    return all(a < b for a, b in zip(gaps, gaps[1:]))


def converse_violations(aggregate: pd.DataFrame, slack: float = 0.02) -> int:
    """Rows whose mean distortion beats the RDF by more than `slack`."""
    return int((aggregate["mean_D"] < aggregate["rdf_D"] - slack).sum())


def curve_checks(curve: pd.DataFrame, slack: float = 0.02, margin: float = 0.05) -> Dict[str, float]:
    """All checks for one bias, as MLflow-ready floats."""
    return {
        "strictly_decreasing": float(is_strictly_decreasing(curve)),
        "min_baseline_margin": min_baseline_margin(curve),
        "baseline_margin_ok": float(min_baseline_margin(curve) >= margin),
        "gap_shrinks_at_low_rate": float(gap_shrinks_at_low_rate(curve)),
        "converse_violations": float(converse_violations(curve, slack)),
        "max_rdf_gap": float(rdf_gaps(curve).max()),
    }
