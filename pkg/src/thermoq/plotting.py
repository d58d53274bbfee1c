"""Courtesy figure output for sweeps and trajectories.

CSV remains the primary artifact; these helpers render matplotlib line plots
next to it.  The matplotlib import is deferred and forced onto the Agg
backend so headless runs never touch a display.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from .errors import ValidationError


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


def save_line_plot(
    path: str,
    x: Sequence[float],
    series: Mapping[str, Sequence[float]],
    *,
    xlabel: str,
    ylabel: str,
    title: str = "",
    logx: bool = False,
) -> str:
    """Render one or more y(x) series to ``path`` (format from the suffix,
    typically .svg) and return the path written."""
    if not series:
        raise ValidationError("nothing to plot: no series given")
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    try:
        for label, ys in series.items():
            ax.plot(x, ys, label=label, linewidth=1.4)
        if logx:
            ax.set_xscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        ax.axhline(0.0, color="0.75", linewidth=0.7, zorder=0)
        if len(series) > 1:
            ax.legend(frameon=False, fontsize=9)
        ax.grid(True, alpha=0.25)
        fig.tight_layout()
        fig.savefig(path)
    finally:
        plt.close(fig)
    return path
