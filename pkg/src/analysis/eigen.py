# -*- coding: utf-8 -*-
"""
eigen.py — собственные пары K w = λ M w для фиксированного проекта вне
ядра M(a).

Порядок: удаление исчезнувших стержней (a_v < 1e-9·max) и степеней
свободы без жёсткости и массы, переход в базис собственных векторов M,
статическая конденсация безмассовых направлений, обобщённая задача
scipy.linalg.eigh с M-нормировкой.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from src.errors import AnalysisError
from src.fem.assembly import StructuralPencil

PRUNE_RATIO = 1e-9
MASS_KERNEL_RATIO = 1e-10
PINV_CUTOFF = 1e-10


@dataclass(frozen=True)
class EigenResult:
    eigenvalues: np.ndarray    # рад²/с², по возрастанию
    eigenvectors: np.ndarray   # n_dof × k, wᵀ M w = 1
    kernel_dim: int

    @property
    def frequencies_hz(self) -> np.ndarray:
        return np.sqrt(np.maximum(self.eigenvalues, 0.0)) / (2.0 * math.pi)

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[0])


def _pinv_sym(S: np.ndarray, cutoff: float = PINV_CUTOFF) -> np.ndarray:
    if S.size == 0:
        return S
    w, V = scipy.linalg.eigh(0.5 * (S + S.T))
    peak = float(np.max(np.abs(w))) if w.size else 0.0
    inv = np.zeros_like(w)
    keep = np.abs(w) > cutoff * peak
    inv[keep] = 1.0 / w[keep]
    return (V * inv) @ V.T


def generalized_eigenpairs(K: np.ndarray, M: np.ndarray, k: Optional[int] = None) -> EigenResult:
    """Пары (K, M) вне ядра M; K и M — плотные симметричные матрицы одного размера."""
    K = 0.5 * (K + K.T)
    M = 0.5 * (M + M.T)
    n = K.shape[0]
    scale_k = max(float(np.max(np.abs(np.diag(K)))), 1e-300)
    scale_m = max(float(np.max(np.abs(np.diag(M)))), 1e-300)
    active = (np.abs(np.diag(K)) > 1e-14 * scale_k) | (np.abs(np.diag(M)) > 1e-14 * scale_m)
    idx = np.flatnonzero(active)
    Ka, Ma = K[np.ix_(idx, idx)], M[np.ix_(idx, idx)]

    mu, V = scipy.linalg.eigh(Ma)
    rng = mu > MASS_KERNEL_RATIO * float(mu[-1]) if mu.size else np.zeros(0, dtype=bool)
    if not np.any(rng):
        raise AnalysisError("Матрица масс нулевая: собственные частоты не определены")
    R, N = V[:, rng], V[:, ~rng]
    Krr = R.T @ Ka @ R
    if N.shape[1]:
        Krn = R.T @ Ka @ N
        Knn_pinv = _pinv_sym(N.T @ Ka @ N)
        K_eff = Krr - Krn @ Knn_pinv @ Krn.T
    else:
        Knn_pinv = None
        K_eff = Krr
    lam, Z = scipy.linalg.eigh(0.5 * (K_eff + K_eff.T), np.diag(mu[rng]))
    count = lam.shape[0] if k is None else min(k, lam.shape[0])
    lam, Z = lam[:count], Z[:, :count]

    W = R @ Z
    if Knn_pinv is not None:
        W = W - N @ (Knn_pinv @ (Krn.T @ Z))
    full = np.zeros((n, count))
    full[idx] = W
    return EigenResult(lam, full, int((~rng).sum()) + int(n - idx.size))


def eigenpairs(pencil: StructuralPencil, a, k: Optional[int] = 6) -> EigenResult:
    """k наименьших собственных пар вне ядра M(a)."""
    a = np.asarray(a, dtype=float).copy()
    if not np.any(a > 0):
        raise AnalysisError("Нулевой проект: все площади равны нулю")
    a[a < PRUNE_RATIO * float(a.max())] = 0.0
    K = pencil.stiffness.evaluate(a)
    M = pencil.mass.evaluate(a)
    return generalized_eigenpairs(K, M, k)
