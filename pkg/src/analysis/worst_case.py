# -*- coding: utf-8 -*-
"""
worst_case.py — псевдообратная матрица и наихудшая нагрузка из эллипсоида.

S = K − ω²M, A = Qᵀ S^† Q; наихудшая нагрузка f_R = Q r_q, где r_q —
главный собственный вектор A; d_R = λ_max(A), p_R = ω d_R / 2.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np
import scipy.linalg

from src.constraints.lmi import LmiKind
from src.errors import AnalysisError, ResonanceError
from src.fem.assembly import DofMap, StructuralPencil, load_matrix
from src.model.types import HarmonicLoadSpec

log = logging.getLogger(__name__)

PINV_CUTOFF = 1e-10
RANGE_TOL = 1e-8
RESONANCE_TOL = 1e-8
REPEATED_TOL = 1e-8


# -----------------------------
# Псевдообратная
# -----------------------------

@dataclass(frozen=True)
class PseudoInverseResult:
    value: np.ndarray
    in_range: bool
    residual: float


def pseudo_inverse_apply(S: np.ndarray, x: np.ndarray, cutoff: float = PINV_CUTOFF) -> PseudoInverseResult:
    """S^† x через спектральное разложение; |λ| < cutoff·max|λ| считаются нулём."""
    S = 0.5 * (np.asarray(S, dtype=float) + np.asarray(S, dtype=float).T)
    x = np.asarray(x, dtype=float)
    w, V = scipy.linalg.eigh(S)
    peak = float(np.max(np.abs(w))) if w.size else 0.0
    inv = np.zeros_like(w)
    keep = np.abs(w) >= cutoff * peak
    if peak > 0:
        inv[keep] = 1.0 / w[keep]
    value = V @ (inv[:, None] * (V.T @ x.reshape(x.shape[0], -1)))
    projected = V[:, keep] @ (V[:, keep].T @ x.reshape(x.shape[0], -1))
    residual = float(np.linalg.norm(projected - x.reshape(x.shape[0], -1)))
    norm_x = float(np.linalg.norm(x))
    in_range = residual <= RANGE_TOL * norm_x if norm_x > 0 else True
    return PseudoInverseResult(value.reshape(x.shape), in_range, residual)


# -----------------------------
# Наихудшая нагрузка
# -----------------------------

@dataclass(frozen=True)
class NodalLoad:
    node: int
    fx: float
    fy: float
    magnitude: float
    fraction: float          # |f| / ‖f_R‖
    angle_x_deg: float       # от оси +x, [0, 180)
    angle_down_deg: float    # от направленной вниз вертикали, [0, 180)


@dataclass(frozen=True)
class WorstCaseReport:
    omega: float
    kind: LmiKind
    gram: np.ndarray
    gram_eigenvalues: np.ndarray       # по убыванию
    top_vectors: Tuple[np.ndarray, ...]
    r_q: np.ndarray
    f_R: np.ndarray
    u_R: np.ndarray
    v_R: np.ndarray
    d_R: float
    p_R: float
    nodal: Tuple[NodalLoad, ...]
    utilization: Optional[float] = None

    @property
    def multiplicity(self) -> int:
        return len(self.top_vectors)


def _canonical_sign(vec: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(vec)))
    return -vec if vec[k] < 0 else vec


def _fold(angle_deg: float) -> float:
    v = angle_deg % 180.0
    return 0.0 if math.isclose(v, 180.0) else v


def nodal_decomposition(dof_map: DofMap, load: HarmonicLoadSpec, f: np.ndarray) -> Tuple[NodalLoad, ...]:
    nodes: List[int] = []
    if load.columns:
        for col in load.columns:
            if col.node not in nodes:
                nodes.append(col.node)
    else:
        amp = np.asarray(load.amplitude).reshape(-1, 3)
        nodes = [int(n) for n in np.flatnonzero(np.any(amp[:, :2] != 0.0, axis=1))]
    total = float(np.linalg.norm(f))
    out = []
    for node in nodes:
        comps = []
        for c in (0, 1):
            d = dof_map.dof(node, c)
            comps.append(float(f[d]) if d is not None else 0.0)
        fx, fy = comps
        mag = math.hypot(fx, fy)
        out.append(NodalLoad(
            node=node, fx=fx, fy=fy, magnitude=mag,
            fraction=mag / total if total > 0 else 0.0,
            angle_x_deg=_fold(math.degrees(math.atan2(fy, fx))),
            angle_down_deg=_fold(math.degrees(math.atan2(fx, -fy))),
        ))
    return tuple(out)


def worst_case(
    pencil: StructuralPencil,
    a,
    load: HarmonicLoadSpec,
    kind: Union[LmiKind, str] = LmiKind.DYN_COMPLIANCE,
    threshold: Optional[float] = None,
) -> WorstCaseReport:
    """Наихудшая нагрузка и отклик; ω = load.omega (ω = 0 — статический случай)."""
    kind = LmiKind(kind)
    a = np.asarray(a, dtype=float)
    omega = float(load.omega)
    K = pencil.stiffness.evaluate(a)
    M = pencil.mass.evaluate(a)
    S = K - omega * omega * M
    S = 0.5 * (S + S.T)
    lam_min = float(scipy.linalg.eigvalsh(S, subset_by_index=[0, 0])[0])
    if lam_min < -RESONANCE_TOL * float(np.linalg.norm(S, 2)):
        raise ResonanceError(f"Нарушена дорезонансность: λ_min(K − ω²M) = {lam_min:.4e} < 0 при ω={omega:.6g}")

    Q = load_matrix(pencil.dof_map, load)
    pinv = pseudo_inverse_apply(S, Q)
    if not pinv.in_range:
        raise AnalysisError(f"Нагрузка вне образа K − ω²M (невязка {pinv.residual:.3e})")
    X = pinv.value.reshape(Q.shape)
    A = Q.T @ X
    A = 0.5 * (A + A.T)

    w, V = scipy.linalg.eigh(A)
    order = np.argsort(-w, kind="stable")
    w, V = w[order], V[:, order]
    top = float(w[0])
    tied = [k for k in range(w.shape[0]) if w[k] >= top - REPEATED_TOL * max(abs(top), 1e-300)]
    vectors = tuple(_canonical_sign(V[:, k]) for k in tied)
    if len(vectors) > 1:
        log.info("Кратное наибольшее собственное значение A: кратность %d", len(vectors))
    r_q = vectors[0]

    f_R = Q @ r_q
    u_R = X @ r_q
    v_R = omega * u_R
    d_R = top
    p_R = 0.5 * omega * d_R

    utilization = None
    if threshold is not None:
        value = p_R if kind == LmiKind.PEAK_POWER else d_R
        utilization = value / threshold

    return WorstCaseReport(
        omega=omega, kind=kind, gram=A, gram_eigenvalues=w, top_vectors=vectors, r_q=r_q,
        f_R=f_R, u_R=u_R, v_R=v_R, d_R=d_R, p_R=p_R,
        nodal=nodal_decomposition(pencil.dof_map, load, f_R),
        utilization=utilization,
    )
