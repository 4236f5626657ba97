"""Figure rendering for the CLI report paths.

All figures are written to files (SVG by default) next to the delimited
output.  The SVG hash salt and metadata are pinned so identical data produces
identical bytes.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

plt.rcParams["svg.hashsalt"] = "jcbloch"

__all__ = ["save_cloud_figure", "save_scan_figure", "save_curves_figure"]

_SAVE_KWARGS = {"dpi": 160, "metadata": {"Date": None}}


def _finish(fig, path: str | Path) -> Path:
    path = Path(path)
    kwargs = dict(_SAVE_KWARGS)
    if path.suffix.lower() != ".svg":
        kwargs.pop("metadata")
    fig.savefig(path, **kwargs)
    plt.close(fig)
    return path


def save_cloud_figure(points: np.ndarray, path: str | Path, title: str | None = None, point_size: float = 0.25) -> Path:
    """Scatter of (S_x, S_z) samples on the unit square."""
    fig, ax = plt.subplots(figsize=(4.2, 4.2))
    ax.scatter(points[:, 0], points[:, 1], s=point_size, c="tab:blue", marker=".", linewidths=0, rasterized=True)
    ax.set_xlim(-1.05, 1.05)
    ax.set_ylim(-1.05, 1.05)
    ax.set_aspect("equal")
    ax.set_xlabel(r"$S_x$")
    ax.set_ylabel(r"$S_z$")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _finish(fig, path)


def save_scan_figure(
    betas: Sequence[float],
    sx_values: Sequence[float],
    path: str | Path,
    curves: Sequence[tuple[float, int, float]] | None = None,
    title: str | None = None,
) -> Path:
    """Near-zero-S_z hits as red points over a log beta axis, with optional
    overlay of the filtered-time curves (one blue line per candidate q)."""
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    if curves:
        by_q: dict[int, list[tuple[float, float]]] = {}
        for beta, q, sx in curves:
            by_q.setdefault(q, []).append((beta, sx))
        for q, rows in sorted(by_q.items()):
            rows.sort()
            ax.plot([r[0] for r in rows], [r[1] for r in rows], c="tab:blue", lw=0.8, alpha=0.8)
    ax.scatter(betas, sx_values, s=2.0, c="tab:red", marker=".", linewidths=0)
    ax.set_xscale("log")
    ax.set_xlabel(r"$\beta$")
    ax.set_ylabel(r"$S_x$")
    ax.set_ylim(-1.05, 1.05)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _finish(fig, path)


def save_curves_figure(
    curves: Sequence[tuple[float, int, float]],
    path: str | Path,
    title: str | None = None,
) -> Path:
    return save_scan_figure([], [], path, curves=curves, title=title)
