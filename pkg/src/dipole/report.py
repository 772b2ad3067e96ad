"""Plot outputs: a dependency-free SVG scatter and matplotlib report figures.

The SVG path is byte-deterministic (identical input gives identical bytes)
and needs no plotting backend; the matplotlib figures are the richer report
artifacts written next to the delimited outputs.
"""

from __future__ import annotations

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .errors import ParameterError

__all__ = [
    "emit_svg",
    "save_embedding_figure",
    "save_trace_figure",
    "save_scores_figure",
    "save_grid_figure",
]


def _normalize(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    lo, hi = float(values.min()), float(values.max())
    if hi == lo:
        return np.full(values.shape, 0.5)
    return (values - lo) / (hi - lo)


def _color_hex(v: float) -> str:
    r = int(round(255 * v))
    b = int(round(255 * (1.0 - v)))
    return f"#{r:02x}80{b:02x}"


def emit_svg(coords: np.ndarray, colors: "np.ndarray | None" = None) -> str:
    """Self-contained SVG scatter of the first two embedding axes.

    One circle per point; the viewBox fits the data with a 5% margin. An
    optional numeric column colors points on a red-blue ramp (green held at
    0x80). The y axis is flipped so larger values plot upward.
    """
    coords = np.asarray(coords, dtype=float)
    if coords.ndim != 2 or coords.shape[1] < 2:
        raise ParameterError("SVG scatter needs at least 2 embedding axes")
    x = coords[:, 0]
    y = -coords[:, 1]
    span_x = max(x.max() - x.min(), 0.0) or 1.0
    span_y = max(y.max() - y.min(), 0.0) or 1.0
    pad_x, pad_y = 0.05 * span_x, 0.05 * span_y
    min_x, min_y = x.min() - pad_x, y.min() - pad_y
    width, height = span_x + 2 * pad_x, span_y + 2 * pad_y
    radius = 0.008 * max(width, height)

    if colors is not None:
        ramp = _normalize(colors)
        fills = [_color_hex(float(v)) for v in ramp]
    else:
        fills = ["#1f77b4"] * coords.shape[0]

    def num(v: float) -> str:
        return format(v, ".6f")

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{num(min_x)} {num(min_y)} {num(width)} {num(height)}">',
    ]
    for xi, yi, fill in zip(x, y, fills):
        lines.append(
            f'<circle cx="{num(xi)}" cy="{num(yi)}" r="{num(radius)}" '
            f'fill="{fill}" fill-opacity="0.8"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def save_embedding_figure(coords: np.ndarray, path, colors=None, title: str = "embedding"):
    coords = np.asarray(coords, dtype=float)
    fig, ax = plt.subplots(figsize=(6, 6))
    style = {"c": colors, "cmap": "coolwarm"} if colors is not None else {"color": "#1f77b4"}
    if coords.shape[1] >= 2:
        ax.scatter(coords[:, 0], coords[:, 1], s=8, alpha=0.8, **style)
        ax.set_aspect("equal")
    else:
        ax.scatter(coords[:, 0], np.zeros(coords.shape[0]), s=8, **style)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_trace_figure(trace, path):
    steps = np.arange(len(trace))
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(steps, [t.total for t in trace], label="total", lw=1.2)
    ax.plot(steps, [t.topological for t in trace], label="topological", lw=0.8, alpha=0.7)
    ax.plot(steps, [t.metric for t in trace], label="metric", lw=0.8, alpha=0.7)
    ax.set_xlabel("step")
    ax.set_ylabel("sampled loss")
    if all(t.total > 0 for t in trace):
        ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_scores_figure(report, path):
    names = ["ijk", "residual var", "PH deg 0", "PH deg 1"]
    values = [
        report.ijk_score,
        report.residual_variance,
        report.ph0_score,
        report.ph1_score,
    ]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(names, values, color="#1f77b4")
    ax.set_ylabel("score (lower is better)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_grid_figure(rows: "list[dict]", path):
    """Histogram of each score over all grid combinations, four panels."""
    keys = [("ijk_score", "ijk"), ("residual_variance", "residual var"),
            ("ph0_score", "PH deg 0"), ("ph1_score", "PH deg 1")]
    fig, axes = plt.subplots(2, 2, figsize=(9, 7))
    for ax, (key, label) in zip(axes.ravel(), keys):
        values = [float(r[key]) for r in rows]
        ax.hist(values, bins=min(20, max(5, len(values))), color="#1f77b4", alpha=0.85)
        ax.set_title(label)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
