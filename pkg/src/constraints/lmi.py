# -*- coding: utf-8 -*-
"""
lmi.py — полиномиальные матричные неравенства G(a) ⪰ 0 для всех семейств
ограничений: собственная частота, (робастная) статическая податливость,
робастная динамическая податливость, робастная пиковая мощность и
компактифицирующие ограничения (коробка и верхняя граница веса).

Все блоки строятся на редуцированном (без опор) наборе степеней свободы.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional

import numpy as np

from src.errors import ConstraintError
from src.fem.assembly import StructuralPencil, load_matrix
from src.fem.polymatrix import PolynomialMatrix, unit_exponent, zero_exponent
from src.model.types import FrameProblem


class LmiKind(str, Enum):
    FREE_VIBRATION = "FreeVibration"
    STATIC_COMPLIANCE = "StaticCompliance"
    DYN_COMPLIANCE = "DynCompliance"
    PEAK_POWER = "PeakPower"
    BOX_LOWER = "BoxLower"
    BOX_UPPER = "BoxUpper"
    WEIGHT_CAP = "WeightCap"


COMPACT_KINDS = (LmiKind.BOX_LOWER, LmiKind.BOX_UPPER, LmiKind.WEIGHT_CAP)
BORDERED_KINDS = (LmiKind.STATIC_COMPLIANCE, LmiKind.DYN_COMPLIANCE, LmiKind.PEAK_POWER)


@dataclass
class PolyLmi:
    """
    Ограничение G(a) ⪰ 0 с метаданными семейства.

    Для окаймлённых блоков border = Q (n_dof × q), threshold — порог
    (c̄, d̄_R или p̄_R), omega — частота нагрузки. pencil нужен для
    переходов между эквивалентными формами.
    """

    matrix: PolynomialMatrix
    kind: LmiKind
    lambda_bar: Optional[float] = None
    omega: Optional[float] = None
    threshold: Optional[float] = None
    border: Optional[np.ndarray] = None
    pencil: Optional[StructuralPencil] = None

    @property
    def dimension(self) -> int:
        return self.matrix.dimension

    @property
    def degree(self) -> int:
        return self.matrix.degree

    @property
    def q(self) -> int:
        return 0 if self.border is None else int(self.border.shape[1])

    @property
    def is_scalar(self) -> bool:
        return self.matrix.dimension == 1

    @property
    def corner_value(self) -> Optional[float]:
        """Значение углового блока c·I_q (для мощности 2p̄/ω)."""
        if self.threshold is None:
            return None
        if self.kind == LmiKind.PEAK_POWER:
            return 2.0 * self.threshold / self.omega
        return self.threshold

    def evaluate(self, a) -> np.ndarray:
        return self.matrix.evaluate(a)


# -----------------------------
# Построители
# -----------------------------

def _dynamic_stiffness(pencil: StructuralPencil, omega2: float) -> PolynomialMatrix:
    if omega2 == 0.0:
        return pencil.stiffness.copy()
    return pencil.stiffness - pencil.mass.scaled(omega2)


def _check_border(pencil: StructuralPencil, Q: np.ndarray) -> np.ndarray:
    Q = np.asarray(Q, dtype=float)
    if Q.ndim == 1:
        Q = Q.reshape(-1, 1)
    if Q.shape[0] != pencil.n_dof:
        raise ConstraintError(f"Размер нагрузки {Q.shape[0]} != числу степеней свободы {pencil.n_dof}")
    return Q


def free_vibration_lmi(pencil: StructuralPencil, lambda_bar: float) -> PolyLmi:
    """K(a) − λ̄ M(a) ⪰ 0."""
    if lambda_bar < 0:
        raise ConstraintError(f"λ̄ должно быть >= 0, получено {lambda_bar}")
    return PolyLmi(_dynamic_stiffness(pencil, lambda_bar), LmiKind.FREE_VIBRATION,
                   lambda_bar=lambda_bar, pencil=pencil)


def _bordered(pencil: StructuralPencil, Q: np.ndarray, omega: float, corner: float, kind: LmiKind,
              threshold: float) -> PolyLmi:
    S = _dynamic_stiffness(pencil, omega * omega)
    q = Q.shape[1]
    matrix = S.bordered(corner * np.eye(q), -Q)
    return PolyLmi(matrix, kind, omega=omega, threshold=threshold, border=Q, pencil=pencil)


def static_compliance_lmi(pencil: StructuralPencil, f, cbar: float) -> PolyLmi:
    """[[c̄, −fᵀ], [−f, K(a)]] ⪰ 0."""
    if not cbar > 0:
        raise ConstraintError(f"c̄ должно быть > 0, получено {cbar}")
    Q = _check_border(pencil, f)
    if Q.shape[1] != 1:
        raise ConstraintError("Для детерминированной податливости нужен один вектор нагрузки")
    return _bordered(pencil, Q, 0.0, cbar, LmiKind.STATIC_COMPLIANCE, cbar)


def robust_static_compliance_lmi(pencil: StructuralPencil, Q, cbar: float) -> PolyLmi:
    """[[c̄_R I_q, −Qᵀ], [−Q, K(a)]] ⪰ 0."""
    if not cbar > 0:
        raise ConstraintError(f"c̄_R должно быть > 0, получено {cbar}")
    return _bordered(pencil, _check_border(pencil, Q), 0.0, cbar, LmiKind.STATIC_COMPLIANCE, cbar)


def robust_dyn_compliance_lmi(pencil: StructuralPencil, Q, omega: float, dbar: float) -> PolyLmi:
    """[[d̄_R I_q, −Qᵀ], [−Q, K(a) − ω² M(a)]] ⪰ 0."""
    if omega < 0:
        raise ConstraintError(f"ω должна быть >= 0, получено {omega}")
    if not dbar > 0:
        raise ConstraintError(f"d̄_R должно быть > 0, получено {dbar}")
    return _bordered(pencil, _check_border(pencil, Q), omega, dbar, LmiKind.DYN_COMPLIANCE, dbar)


def robust_peak_power_lmi(pencil: StructuralPencil, Q, omega: float, pbar: float) -> PolyLmi:
    """[[(2p̄_R/ω) I_q, −Qᵀ], [−Q, K(a) − ω² M(a)]] ⪰ 0."""
    if not omega > 0:
        raise ConstraintError(f"Пиковая мощность не определена при ω={omega}")
    if not pbar > 0:
        raise ConstraintError(f"p̄_R должно быть > 0, получено {pbar}")
    return _bordered(pencil, _check_border(pencil, Q), omega, 2.0 * pbar / omega, LmiKind.PEAK_POWER, pbar)


def compactification_lmis(pencil: StructuralPencil, wbar: float) -> List[PolyLmi]:
    """a_v (w̄/(ρℓ)_v − a_v) ≥ 0 для каждой переменной и w̄ − Σ (ρℓ)_v a_v ≥ 0."""
    if not wbar > 0:
        raise ConstraintError(f"w̄ должно быть > 0, получено {wbar}")
    n = pencil.n_vars
    out: List[PolyLmi] = []
    for v in range(n):
        upper = wbar / pencil.weights[v]
        poly = PolynomialMatrix.scalar({unit_exponent(n, v, 1): upper, unit_exponent(n, v, 2): -1.0}, n)
        out.append(PolyLmi(poly, LmiKind.BOX_UPPER, threshold=upper))
    cap = {zero_exponent(n): wbar}
    for v in range(n):
        cap[unit_exponent(n, v, 1)] = -float(pencil.weights[v])
    out.append(PolyLmi(PolynomialMatrix.scalar(cap, n), LmiKind.WEIGHT_CAP, threshold=wbar))
    return out


def problem_lmis(problem: FrameProblem, pencil: StructuralPencil) -> List[PolyLmi]:
    """Структурные ограничения задачи (без компактификации) в фиксированном порядке."""
    th = problem.thresholds
    out: List[PolyLmi] = []
    if th.lambda_bar is not None:
        out.append(free_vibration_lmi(pencil, th.lambda_bar))
    if problem.load is not None:
        Q = load_matrix(pencil.dof_map, problem.load)
        omega = problem.load.omega
        if th.cbar is not None:
            out.append(robust_static_compliance_lmi(pencil, Q, th.cbar))
        if th.dbar is not None:
            out.append(robust_dyn_compliance_lmi(pencil, Q, omega, th.dbar))
        if th.pbar is not None:
            out.append(robust_peak_power_lmi(pencil, Q, omega, th.pbar))
    elif any(v is not None for v in (th.cbar, th.dbar, th.pbar)):
        raise ConstraintError("Порог податливости или мощности задан без нагрузки")
    if not out:
        raise ConstraintError("В задаче нет ни одного ограничения")
    return out


def minimal_order_of(lmis: List[PolyLmi]) -> int:
    """r_min = max ⌈deg G / 2⌉ (не меньше 1)."""
    return max([1] + [math.ceil(lmi.degree / 2) for lmi in lmis])
