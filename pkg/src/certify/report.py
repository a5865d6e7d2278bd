# -*- coding: utf-8 -*-
"""
report.py — сериализация сертификата (JSON) и текстовые таблицы.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from src.certify.loop import Certificate, OrderRecord
from src.fem.assembly import StructuralPencil, structural_weight
from src.model.types import FrameProblem, SectionKind

PRUNE_RATIO = 1e-6


def _clean(x: Any) -> Any:
    """NaN/inf -> None, numpy -> стандартные типы (для JSON)."""
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if math.isfinite(v) else None
    if isinstance(x, np.integer):
        return int(x)
    return x


def save_json(obj: Dict[str, Any], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        json.dump(_clean(obj), f, ensure_ascii=False, indent=2, sort_keys=False)
        f.write("\n")


# -----------------------------
# Проект
# -----------------------------

def design_rows(problem: FrameProblem, pencil: StructuralPencil, a) -> List[Dict[str, Any]]:
    """Строки таблицы проекта: площадь в см², признак удаления, высота для прямоугольника."""
    a = np.asarray(a, dtype=float)
    peak = float(a.max()) if a.size else 0.0
    rows = []
    for v in range(problem.n_vars):
        segs = problem.segments_of(v + 1)
        law = problem.sections[problem.segments[segs[0]].section]
        row: Dict[str, Any] = {
            "var": v + 1,
            "segments": [k + 1 for k in segs],
            "area_m2": float(a[v]),
            "area_cm2": float(a[v]) * 1e4,
            "removed": bool(a[v] < PRUNE_RATIO * peak),
        }
        if law.kind == SectionKind.RECTANGULAR:
            row["height_mm"] = float(a[v]) / law.width * 1e3
        rows.append(row)
    return rows


def design_table(problem: FrameProblem, pencil: StructuralPencil, a) -> str:
    df = pd.DataFrame(design_rows(problem, pencil, a))
    df["segments"] = df["segments"].apply(lambda s: ",".join(str(k) for k in s))
    df = df.drop(columns=["area_m2"])
    weight = structural_weight(pencil, a)
    return df.to_string(index=False, float_format=lambda v: f"{v:.3f}") + f"\nweight: {weight:.6g} kg\n"


# -----------------------------
# Сертификат
# -----------------------------

def certificate_to_dict(
    cert: Certificate,
    problem: FrameProblem,
    pencil: StructuralPencil,
    meta: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    return {
        "problem": problem.name,
        "verdict": cert.verdict.value,
        "message": cert.message,
        "eps": cert.eps,
        "lower_bound_kg": cert.lower_bound,
        "best_weight_kg": cert.best_weight,
        "initial_weight_kg": cert.initial_weight,
        "relative_gap": cert.gap,
        "history": [_untimed(h) for h in cert.history],
        "design": design_rows(problem, pencil, cert.best_design),
        "meta": {**(meta or {}), "timings": [{"r": h.order, "seconds": h.seconds} for h in cert.history]},
    }


def _untimed(record: OrderRecord) -> Dict[str, Any]:
    row = asdict(record)
    row.pop("seconds")
    return row


def history_frame(cert: Certificate, timed: bool = False) -> pd.DataFrame:
    """Время t только при timed=True: файлы результатов от него не зависят."""
    df = pd.DataFrame(
        {
            "r": [h.order for h in cert.history],
            "lb": [h.lower_bound for h in cert.history],
            "ub": [h.upper_bound for h in cert.history],
            "eps_R": [h.gap for h in cert.history],
            "n_c x m": [h.block_summary for h in cert.history],
            "n": [h.n_moments for h in cert.history],
        }
    )
    if timed:
        df["t"] = [h.seconds for h in cert.history]
    return df


def format_table(cert: Certificate, timed: bool = False) -> str:
    """Таблица r, w̲, ŵ, ε_R, n_c x m, n (и t при timed=True)."""
    df = history_frame(cert, timed)
    formatters = {
        "lb": lambda v: f"{v:.3f}",
        "ub": lambda v: f"{v:.3f}",
        "eps_R": lambda v: f"{v:.1e}",
        "t": lambda v: f"{v:.2f}",
    }
    formatters = {k: f for k, f in formatters.items() if k in df.columns}
    return df.to_string(index=False, formatters=formatters) + f"\nverdict: {cert.verdict.value}\n"
