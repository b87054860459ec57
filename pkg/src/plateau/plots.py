"""SVG line charts with reproducible bytes."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def emit_plot(series: dict, path, *, xlabel: str = "", ylabel: str = "", title: str = "", logy: bool = False) -> None:
    """Write ``{label: (xs, ys)}`` as an SVG line chart.

    The SVG id salt and the date field are fixed so identical data gives
    identical files.
    """
    with plt.rc_context({"svg.hashsalt": "plateau", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        for label, (xs, ys) in series.items():
            ax.plot(list(xs), list(ys), marker="o", markersize=3, label=str(label))
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        if logy:
            ax.set_yscale("log")
        if len(series) > 1:
            ax.legend()
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
