# -*- coding: utf-8 -*-
"""
relations.py — численная проверка связей между откликом на наихудшую
нагрузку и собственными формами пучка с добавочной массой.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from src.analysis.eigen import generalized_eigenpairs
from src.analysis.worst_case import WorstCaseReport
from src.fem.assembly import StructuralPencil, load_matrix
from src.model.types import HarmonicLoadSpec


@dataclass(frozen=True)
class RelationResiduals:
    velocity: float          # ‖v_R − ω u_R‖ / ‖v_R‖
    augmented_eigen: float   # ‖K u − ω²(M + QQᵀ/(ω² d_R)) u‖ / (‖K‖ ‖u‖)
    smallest_eigen: float    # |λ_min(K, M̃) − ω²| / ω²
    power: float             # |d_R − 2 p_R / ω| / d_R

    def as_dict(self) -> dict:
        return asdict(self)

    def max(self) -> float:
        return float(max(self.as_dict().values()))


def verify_relations(
    pencil: StructuralPencil,
    a,
    load: HarmonicLoadSpec,
    report: WorstCaseReport,
) -> RelationResiduals:
    """При ω = 0 соотношения вырождаются, все невязки равны 0."""
    omega = report.omega
    if omega == 0.0:
        return RelationResiduals(0.0, 0.0, 0.0, 0.0)
    a = np.asarray(a, dtype=float)
    K = pencil.stiffness.evaluate(a)
    M = pencil.mass.evaluate(a)
    Q = load_matrix(pencil.dof_map, load)
    u, v = report.u_R, report.v_R

    v_norm = float(np.linalg.norm(v))
    velocity = float(np.linalg.norm(v - omega * u)) / v_norm if v_norm > 0 else 0.0

    M_aug = M + (Q @ Q.T) / (omega * omega * report.d_R)
    residual = K @ u - omega * omega * (M_aug @ u)
    scale = float(np.linalg.norm(K, 2)) * float(np.linalg.norm(u))
    augmented = float(np.linalg.norm(residual)) / scale if scale > 0 else 0.0

    eig = generalized_eigenpairs(K, M_aug, k=1)
    smallest = abs(eig.lambda_min - omega * omega) / (omega * omega)

    power = abs(report.d_R - 2.0 * report.p_R / omega) / report.d_R
    return RelationResiduals(velocity, augmented, smallest, power)
