# -*- coding: utf-8 -*-
"""
histories.py — установившиеся временные ряды при нагрузке
f(t) = (c1 cos ωt + c2 sin ωt) f_R:

d(t) = d_R (c1 cos ωt + c2 sin ωt)²,
p(t) = p_R [(c2² − c1²) sin 2ωt + 2 c1 c2 cos 2ωt].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from src.analysis.worst_case import WorstCaseReport


@dataclass(frozen=True)
class HistorySeries:
    t: np.ndarray
    d: np.ndarray
    p: np.ndarray
    t_d: float        # первый максимум d(t)
    t_p: float        # первый максимум |p(t)|
    d_peak: float
    p_peak: float

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"t": self.t, "d": self.d, "p": self.p})

    def summary(self) -> dict:
        return {"t_d": self.t_d, "t_p": self.t_p, "d_peak": self.d_peak, "p_peak": self.p_peak}


def peak_times(omega: float, c1: float, c2: float) -> tuple:
    """
    t_d: максимум (c1 cos ωt + c2 sin ωt)², период π/ω;
    t_p: максимум |sin(2ωt + φ)|, φ = atan2(2c1c2, c2² − c1²), период π/(2ω).
    """
    if omega == 0.0:
        return 0.0, 0.0
    t_d = (math.atan2(c2, c1) / omega) % (math.pi / omega)
    phi = math.atan2(2.0 * c1 * c2, c2 * c2 - c1 * c1)
    t_p = ((math.pi / 2.0 - phi) / (2.0 * omega)) % (math.pi / (2.0 * omega))
    return t_d, t_p


def time_histories(
    report: WorstCaseReport,
    omega: Optional[float] = None,
    c1: float = 1.0,
    c2: float = 0.0,
    n_samples: int = 1000,
    horizon: Optional[float] = None,
) -> HistorySeries:
    """Ряды d(t), p(t) на [0, horizon] (по умолчанию два периода нагрузки)."""
    if abs(c1 * c1 + c2 * c2 - 1.0) > 1e-9:
        raise ValueError(f"phase not normalized: c1²+c2² = {c1 * c1 + c2 * c2:.6g}")
    omega = report.omega if omega is None else float(omega)
    d_R = report.d_R
    p_R = 0.5 * omega * d_R
    if horizon is None:
        horizon = 4.0 * math.pi / omega if omega > 0 else 1.0
    t = np.linspace(0.0, horizon, n_samples)
    if omega > 0:
        d = d_R * (c1 * np.cos(omega * t) + c2 * np.sin(omega * t)) ** 2
        p = p_R * ((c2 * c2 - c1 * c1) * np.sin(2 * omega * t) + 2 * c1 * c2 * np.cos(2 * omega * t))
    else:
        d = np.full_like(t, d_R * c1 * c1)
        p = np.zeros_like(t)
    t_d, t_p = peak_times(omega, c1, c2)
    return HistorySeries(t, d, p, t_d, t_p, d_R, p_R)


def save_history_csv(series: HistorySeries, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    series.to_frame().to_csv(path, index=False, float_format="%.12g")
