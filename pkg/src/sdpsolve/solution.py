# -*- coding: utf-8 -*-
"""
solution.py — результат решения SDP и извлечение моментов первого порядка.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Sequence

import numpy as np

from src.errors import SolverError
from src.relaxation.indexer import MomentIndexer

log = logging.getLogger(__name__)

CLAMP_TOL = 1e-12


class SdpStatus(str, Enum):
    OPTIMAL = "Optimal"
    NEAR_OPTIMAL = "NearOptimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    NUMERICAL_TROUBLE = "NumericalTrouble"

    @property
    def usable(self) -> bool:
        return self in (SdpStatus.OPTIMAL, SdpStatus.NEAR_OPTIMAL)


@dataclass(frozen=True)
class SolverStats:
    solver: str
    iterations: Optional[int] = None
    wall_time: float = 0.0
    extra: Dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class SdpSolution:
    y: Optional[np.ndarray]
    objective: float
    status: SdpStatus
    stats: SolverStats


def extract_first_moments(
    solution: SdpSolution,
    indexer: MomentIndexer,
    n_vars: int,
    variable_scale: Optional[Sequence[float]] = None,
) -> np.ndarray:
    """ã_v = u_v · y[e_v], отрицательные значения обнуляются."""
    if not solution.status.usable or solution.y is None:
        raise SolverError(f"Моменты недоступны при статусе {solution.status.value}")
    ids = indexer.first_order_ids()
    assert len(ids) == n_vars
    u = np.ones(n_vars) if variable_scale is None else np.asarray(variable_scale, dtype=float)
    a = u * np.asarray(solution.y, dtype=float)[ids]
    peak = float(np.max(np.abs(a))) if a.size else 0.0
    if np.any(a < -CLAMP_TOL * max(peak, 1.0)):
        log.warning("Отрицательные моменты первого порядка обнулены: min=%.3e", float(a.min()))
    return np.maximum(a, 0.0)
