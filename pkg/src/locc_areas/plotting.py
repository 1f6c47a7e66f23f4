"""Matplotlib figures of coloured area diagrams, written straight to files.

Figures are built on :class:`matplotlib.figure.Figure` directly, so no GUI
backend or pyplot state is involved.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Optional

from matplotlib.figure import Figure
from matplotlib.patches import Patch, Rectangle

from .core import format_rational
from .diagram import PALETTE, ColouredDiagram


def _colour(c: int) -> str:
    return PALETTE[c % len(PALETTE)]


def draw_diagram(ax, d: ColouredDiagram, title: Optional[str] = None, slices: int = 0):
    """Draw one rectangle per segment. ``slices > 0`` overlays equal relative cuts."""
    heights = d.heights
    top = float(max(heights, default=0)) or 1.0
    for i in range(len(d.columns)):
        for lo, hi, c in d.intervals(i):
            ax.add_patch(
                Rectangle((i, float(lo)), 1.0, float(hi - lo), facecolor=_colour(c), edgecolor="black", linewidth=0.8)
            )
        if slices and heights[i] > 0 and slices <= 64:
            h = float(heights[i])
            for q in range(1, slices):
                ax.plot([i, i + 1], [h * q / slices] * 2, color="white", linewidth=0.5, alpha=0.7)
    ax.set_xlim(0, max(len(d.columns), 1))
    ax.set_ylim(0, top * 1.05)
    ax.set_xticks([i + 0.5 for i in range(len(d.columns))])
    ax.set_xticklabels([str(i) for i in range(len(d.columns))])
    ax.set_xlabel("column")
    ax.set_ylabel("height")
    colours = sorted(d.colour_areas())
    ax.legend(
        handles=[Patch(facecolor=_colour(c), edgecolor="black", label=f"colour {c}") for c in colours],
        loc="upper right",
        fontsize="small",
        frameon=False,
    )
    if title:
        ax.set_title(title)
    return ax


def draw_distribution(ax, dist: Mapping[int, object], title: Optional[str] = None):
    labels = list(dist)
    values = [float(dist[m]) for m in labels]
    bars = ax.bar([str(m) for m in labels], values, color="#7f7f7f", edgecolor="black")
    for bar, m in zip(bars, labels):
        ax.annotate(
            format_rational(dist[m]),
            (bar.get_x() + bar.get_width() / 2, bar.get_height()),
            ha="center",
            va="bottom",
            fontsize="small",
        )
    ax.set_xlabel("m")
    ax.set_ylabel("probability")
    ax.set_ylim(0, 1.1)
    if title:
        ax.set_title(title)
    return ax


def save_figure(
    path,
    diagrams: list[tuple[ColouredDiagram, str]],
    distribution: Optional[Mapping[int, object]] = None,
    slices: int = 0,
    dpi: int = 150,
) -> Path:
    """Write the diagrams side by side (plus an optional outcome bar chart) to ``path``.

    The file type follows the suffix, as in ``Figure.savefig``.
    """
    panels = len(diagrams) + (1 if distribution is not None else 0)
    fig = Figure(figsize=(4.0 * panels, 3.6), layout="constrained")
    axes = fig.subplots(1, panels, squeeze=False)[0]
    for k, (ax, (d, title)) in enumerate(zip(axes, diagrams)):
        # slice cuts only make sense on the final (coloured) diagram
        draw_diagram(ax, d, title, slices if k == len(diagrams) - 1 else 0)
    if distribution is not None:
        draw_distribution(axes[-1], distribution, "outcomes")
    path = Path(path)
    fig.savefig(path, dpi=dpi)
    return path
