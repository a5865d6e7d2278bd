# -*- coding: utf-8 -*-
"""
feasibility.py — проверка допустимости проекта, масштабирование
δ·ã до допустимого (удвоение + бисекция) и начальная допустимая точка.

Допустимость монотонна по δ: G(δa)/δ не убывает (K ⪰ 0-слагаемые растут,
постоянная масса M⁽⁰⁾/δ убывает), поэтому бисекция корректна.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from src.constraints.lmi import PolyLmi, minimal_order_of, problem_lmis
from src.errors import InfeasibleScalingError
from src.fem.assembly import StructuralPencil, assemble_pencil, structural_weight
from src.model.types import FrameProblem

log = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-7
MAX_DOUBLINGS = 60
BISECTION_WIDTH = 1e-9
SEED_CAP = 1e-9  # кг, граница веса, от которой строится затравка-середина ящика
KERNEL_TOL = 1e-10


@dataclass
class DesignProblem:
    """Пучок и структурные ограничения задачи (без компактификации)."""

    problem: FrameProblem
    pencil: StructuralPencil
    lmis: List[PolyLmi]

    @property
    def n_vars(self) -> int:
        return self.pencil.n_vars

    @property
    def r_min(self) -> int:
        return minimal_order_of(self.lmis)

    def weight(self, a) -> float:
        return structural_weight(self.pencil, a)


def build_design(problem: FrameProblem) -> DesignProblem:
    pencil = assemble_pencil(problem)
    return DesignProblem(problem, pencil, problem_lmis(problem, pencil))


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    margin: float
    margins: Tuple[float, ...]


def block_margin(G: np.ndarray) -> float:
    """λ_min(G)/(1 + ‖G‖_F)."""
    G = 0.5 * (G + G.T)
    lam = scipy.linalg.eigvalsh(G, subset_by_index=[0, 0])[0] if G.shape[0] > 1 else G[0, 0]
    return float(lam) / (1.0 + float(np.linalg.norm(G)))


def check_feasible(design: DesignProblem, a, tol: float = FEASIBILITY_TOL) -> FeasibilityResult:
    a = np.asarray(a, dtype=float)
    margins = tuple(block_margin(lmi.evaluate(a)) for lmi in design.lmis)
    margin = min(margins)
    return FeasibilityResult(margin >= -tol, margin, margins)


def kernel_obstruction(design: DesignProblem) -> Optional[str]:
    """
    Причина, по которой никакое масштабирование не поможет: масса или
    нагрузка на степенях свободы, не имеющих жёсткости ни при каком a.
    """
    # сумма нормированных коэффициентов: общее ядро всех K_α
    K = np.zeros((design.pencil.n_dof, design.pencil.n_dof))
    for mat in design.pencil.stiffness.terms.values():
        dense = mat.toarray()
        norm = np.linalg.norm(dense)
        if norm > 0:
            K += dense / norm
    w, V = scipy.linalg.eigh(0.5 * (K + K.T))
    N = V[:, w <= KERNEL_TOL * max(float(w[-1]), 1.0)]
    if N.shape[1] == 0:
        return None
    m0 = design.pencil.mass_constant
    for lmi in design.lmis:
        dynamic = (lmi.lambda_bar or 0.0) > 0 or (lmi.omega or 0.0) > 0
        if dynamic and np.linalg.norm(m0 @ N) > KERNEL_TOL * max(np.linalg.norm(m0), 1e-300):
            return "масса на кинематически свободной степени свободы"
        if lmi.border is not None and lmi.q and np.linalg.norm(N.T @ lmi.border) > KERNEL_TOL * np.linalg.norm(lmi.border):
            return "нагрузка вне образа матрицы жёсткости"
    return None


def _is_feasible(design: DesignProblem, a: np.ndarray, tol: float) -> bool:
    return check_feasible(design, a, tol).feasible


def _bisect(design: DesignProblem, a: np.ndarray, lo: float, hi: float, tol: float) -> float:
    """lo недопустимо, hi допустимо; сужение до относительной ширины 1e-9."""
    while (hi - lo) > BISECTION_WIDTH * hi:
        mid = 0.5 * (lo + hi)
        if _is_feasible(design, mid * a, tol):
            hi = mid
        else:
            lo = mid
    log.debug("Бисекция: δ ∈ [%.12g, %.12g]", lo, hi)
    return hi


def scale_to_feasible(design: DesignProblem, a_tilde, tol: float = FEASIBILITY_TOL) -> Tuple[float, np.ndarray]:
    """δ* = min{δ >= 1 : δã допустимо}; при допустимом ã δ* = 1."""
    a = np.maximum(np.asarray(a_tilde, dtype=float), 0.0)
    if not np.any(a > 0):
        raise InfeasibleScalingError("Нулевой проект нельзя масштабировать")
    if _is_feasible(design, a, tol):
        return 1.0, a
    reason = kernel_obstruction(design)
    if reason is not None:
        raise InfeasibleScalingError(f"Допустимое масштабирование невозможно: {reason}")
    lo, hi = 1.0, 2.0
    for _ in range(MAX_DOUBLINGS):
        if _is_feasible(design, hi * a, tol):
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise InfeasibleScalingError(f"Допустимое масштабирование не найдено при δ <= 2^{MAX_DOUBLINGS}")
    delta = _bisect(design, a, lo, hi, tol)
    return delta, delta * a


def midpoint_seed(design: DesignProblem, wbar: float = SEED_CAP) -> np.ndarray:
    """Середина ящика 0 <= a_v <= w̄/(ρℓ)_v: все переменные дают равный вклад в вес."""
    return 0.5 * wbar / design.pencil.weights


def initial_feasible(
    design: DesignProblem,
    seed: Optional[Sequence[float]] = None,
    tol: float = FEASIBILITY_TOL,
) -> Tuple[np.ndarray, float]:
    """
    Начальный допустимый проект и граница веса w̄.

    Затравка по умолчанию — середина ящика компактификации при малом w̄;
    её направление не зависит от w̄, а масштаб находит бисекция.
    Допустимая затравка возвращается как есть.
    """
    a = midpoint_seed(design) if seed is None else np.asarray(seed, dtype=float)
    _, a0 = scale_to_feasible(design, a, tol)
    wbar = design.weight(a0)
    log.info("Начальный допустимый проект: вес %.6g кг", wbar)
    return a0, wbar
