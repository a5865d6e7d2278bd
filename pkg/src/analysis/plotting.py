# -*- coding: utf-8 -*-
"""
plotting.py — графики временных рядов и схема проекта (matplotlib, Agg).
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from src.analysis.histories import HistorySeries  # noqa: E402
from src.model.types import FrameProblem  # noqa: E402


def plot_histories(series: HistorySeries, path: Path, title: Optional[str] = None) -> Path:
    """Два графика: d(t) и p(t), отмечены первые пики."""
    fig, (ax_d, ax_p) = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    ax_d.plot(series.t, series.d, color="tab:blue")
    ax_d.axvline(series.t_d, color="gray", ls="--", lw=0.8)
    ax_d.set_ylabel("d(t), N·m")
    ax_p.plot(series.t, series.p, color="tab:red")
    ax_p.axvline(series.t_p, color="gray", ls="--", lw=0.8)
    ax_p.set_ylabel("p(t), W")
    ax_p.set_xlabel("t, s")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_design(problem: FrameProblem, a, path: Path, max_width: float = 8.0, prune_ratio: float = 1e-6) -> Path:
    """Схема рамы: толщина линии пропорциональна площади, исчезнувшие стержни пунктиром."""
    areas = np.asarray(problem.segment_areas(a), dtype=float)
    peak = float(areas.max()) if areas.size and areas.max() > 0 else 1.0
    fig, ax = plt.subplots(figsize=(6, 4))
    for seg, area in zip(problem.segments, areas):
        (x1, y1), (x2, y2) = problem.nodes[seg.i], problem.nodes[seg.j]
        if area < prune_ratio * peak:
            ax.plot([x1, x2], [y1, y2], color="lightgray", ls=":", lw=0.8)
        else:
            ax.plot([x1, x2], [y1, y2], color="black", lw=max_width * area / peak, solid_capstyle="round")
    for node, fix in problem.supports.items():
        if any(fix):
            x, y = problem.nodes[node]
            ax.plot(x, y, marker="s", color="tab:green", ms=8)
    for node in problem.masses:
        x, y = problem.nodes[node]
        ax.plot(x, y, marker="o", color="tab:orange", ms=8)
    ax.set_aspect("equal")
    ax.set_title(problem.name or "design")
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
