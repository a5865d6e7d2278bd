# -*- coding: utf-8 -*-
"""
equivalence.py — переходы между окаймлённой формой (динамическая
податливость / мощность) и ограничением на собственную частоту.

Прямо: K − ω²(M + QQᵀ/(ω² d̄_R)) ⪰ 0 (добавочная масса M̃₀).
Обратно: M⁽⁰⁾ = Q̂Q̂ᵀ, ω = √λ̄, d̄_R = 1/λ̄.
"""

from __future__ import annotations

import logging
from typing import Tuple

import numpy as np
import scipy.linalg

from src.constraints.lmi import LmiKind, PolyLmi, free_vibration_lmi, robust_dyn_compliance_lmi
from src.errors import ConstraintError

log = logging.getLogger(__name__)

NEGATIVE_TOL = 1e-10
KEEP_TOL = 1e-12


def factor_psd(m0: np.ndarray) -> np.ndarray:
    """
    Q̂ с Q̂Q̂ᵀ = m0 по симметричному спектральному разложению.

    Собственные значения <= 1e-12·max отбрасываются, столбцы идут по
    убыванию, наибольшая по модулю компонента каждого столбца положительна.
    """
    m0 = 0.5 * (m0 + m0.T)
    if not np.any(m0):
        return np.zeros((m0.shape[0], 0))
    w, v = scipy.linalg.eigh(m0)
    scale = float(np.max(np.abs(w)))
    if w[0] < -NEGATIVE_TOL * scale:
        raise ConstraintError(f"M⁽⁰⁾ не является положительно полуопределённой: λ_min={w[0]:.3e}")
    order = np.argsort(-w, kind="stable")
    keep = [k for k in order if w[k] > KEEP_TOL * scale]
    cols = v[:, keep] * np.sqrt(w[keep])
    for k in range(cols.shape[1]):
        if cols[np.argmax(np.abs(cols[:, k])), k] < 0:
            cols[:, k] = -cols[:, k]
    return cols


def to_augmented_pencil(lmi: PolyLmi) -> Tuple[PolyLmi, np.ndarray]:
    """Окаймлённый блок -> ограничение частоты с λ̄ = ω² и массой M̃₀."""
    if lmi.kind not in (LmiKind.DYN_COMPLIANCE, LmiKind.PEAK_POWER):
        raise ConstraintError(f"Ожидалось ограничение податливости или мощности, получено {lmi.kind.value}")
    if lmi.pencil is None or lmi.border is None:
        raise ConstraintError("Ограничение построено без пучка")
    omega = float(lmi.omega)
    if not omega > 0:
        raise ConstraintError("Переход к частотной форме требует ω > 0")
    dbar = lmi.corner_value
    Q = lmi.border
    m0 = lmi.pencil.mass_constant + (Q @ Q.T) / (omega * omega * dbar)
    augmented = lmi.pencil.with_mass_constant(m0)
    log.debug("Добавочная масса: след=%.6g кг", float(np.trace(m0 - lmi.pencil.mass_constant)))
    return free_vibration_lmi(augmented, omega * omega), m0


def from_pencil_to_bordered(fv: PolyLmi) -> PolyLmi:
    """Ограничение частоты -> окаймлённый блок с Q̂ из M⁽⁰⁾ = Q̂Q̂ᵀ."""
    if fv.kind != LmiKind.FREE_VIBRATION or fv.pencil is None:
        raise ConstraintError("Ожидалось ограничение собственной частоты с пучком")
    lam = float(fv.lambda_bar)
    if not lam > 0:
        raise ConstraintError(f"λ̄ должно быть > 0, получено {lam}")
    q_hat = factor_psd(fv.pencil.mass_constant)
    if q_hat.shape[1] == 0:
        return PolyLmi(fv.matrix.copy(), LmiKind.DYN_COMPLIANCE, omega=float(np.sqrt(lam)),
                       threshold=1.0 / lam, border=q_hat, pencil=fv.pencil)
    bare = fv.pencil.with_mass_constant(np.zeros_like(q_hat @ q_hat.T))
    return robust_dyn_compliance_lmi(bare, q_hat, float(np.sqrt(lam)), 1.0 / lam)
