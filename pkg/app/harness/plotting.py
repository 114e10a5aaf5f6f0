"""
SVG plot of per-bit distortion against rate, one line per source bias, with the
rate-distortion bound overlaid.
"""
from pathlib import Path
from typing import Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from app.logging_config import get_logger  # noqa: E402
from app.reference.rate_distortion import rd_curve  # noqa: E402

logger = get_logger(__name__)

# fixed element ids and no timestamp, so identical data gives identical bytes
SVG_RC = {
    "svg.hashsalt": "perceptron-codec",
    "font.family": "DejaVu Sans",
    "axes.unicode_minus": False,
}


def plot_distortion_curve(aggregate: pd.DataFrame, svg_path: Union[str, Path],
                          title: str = "BP encoder vs rate-distortion bound") -> Path:
    """Plot mean_D (with stderr_D bars) against R from an aggregate table."""
    if aggregate.empty:
        raise ValueError("aggregate table is empty")
    svg_path = Path(svg_path)
    svg_path.parent.mkdir(parents=True, exist_ok=True)

    with matplotlib.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(6.4, 4.8), constrained_layout=True)
        for i, (p, rows) in enumerate(sorted(aggregate.groupby("p"), key=lambda g: g[0])):
            rows = rows.sort_values("R")
            color = f"C{i}"
            ax.errorbar(rows["R"], rows["mean_D"], yerr=rows["stderr_D"], marker="o",
                        linestyle="none", color=color, capsize=2, label=f"BP, p={p:g}")
            curve = rd_curve(float(p))
            ax.plot(curve.rates, curve.distortions, color=color, linewidth=1.0, label=f"RDF, p={p:g}")

        ax.set_xlabel("rate R = N/M")
        ax.set_ylabel("distortion per bit")
        ax.set_xlim(0.0, 1.0)
        ax.set_ylim(bottom=0.0)
        ax.set_title(title)
        ax.grid(True, alpha=0.3)
        ax.legend(loc="best", fontsize=8)
        fig.savefig(svg_path, format="svg", metadata={"Date": None})
        plt.close(fig)

    logger.info(f"Wrote plot to {svg_path}")
    return svg_path
