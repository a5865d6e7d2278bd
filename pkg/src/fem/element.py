# -*- coding: utf-8 -*-
"""
element.py — матрицы 2-узлового элемента Эйлера–Бернулли (6 степеней свободы).

Порядок степеней свободы: (u1, v1, θ1, u2, v2, θ2). Все матрицы — на единицу
площади сечения: K(a) = a K_axial + a^d K_bending, M(a) = a M_cons, где
d = 2 для круга и 3 для прямоугольника фиксированной ширины.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.errors import AssemblyError
from src.model.types import CrossSectionLaw, Material

_AXIAL = (0, 3)
_TRANSVERSE = (1, 2, 4, 5)


@dataclass(frozen=True)
class ElementMatrices:
    k_axial: np.ndarray
    k_bending: np.ndarray
    bending_degree: int
    mass: np.ndarray


def rotation(orientation: Tuple[float, float]) -> np.ndarray:
    """T: локальные = T @ глобальные."""
    c, s = orientation
    r = np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])
    t = np.zeros((6, 6))
    t[:3, :3] = r
    t[3:, 3:] = r
    return t


def _place(pattern: np.ndarray, dofs: Tuple[int, ...]) -> np.ndarray:
    out = np.zeros((6, 6))
    out[np.ix_(dofs, dofs)] = pattern
    return out


def local_matrices(length: float, material: Material, law: CrossSectionLaw) -> ElementMatrices:
    L = length
    E, rho = material.young_modulus, material.density

    k_axial = _place(E / L * np.array([[1.0, -1.0], [-1.0, 1.0]]), _AXIAL)

    bend = np.array([
        [12.0, 6 * L, -12.0, 6 * L],
        [6 * L, 4 * L * L, -6 * L, 2 * L * L],
        [-12.0, -6 * L, 12.0, -6 * L],
        [6 * L, 2 * L * L, -6 * L, 4 * L * L],
    ])
    k_bending = _place(E * law.inertia_coefficient / L ** 3 * bend, _TRANSVERSE)

    m_axial = rho * L / 6.0 * np.array([[2.0, 1.0], [1.0, 2.0]])
    m_trans = rho * L / 420.0 * np.array([
        [156.0, 22 * L, 54.0, -13 * L],
        [22 * L, 4 * L * L, 13 * L, -3 * L * L],
        [54.0, 13 * L, 156.0, -22 * L],
        [-13 * L, -3 * L * L, -22 * L, 4 * L * L],
    ])
    mass = _place(m_axial, _AXIAL) + _place(m_trans, _TRANSVERSE)
    return ElementMatrices(k_axial, k_bending, law.exponent, mass)


def element_matrices(
    length: float,
    material: Material,
    law: CrossSectionLaw,
    orientation: Tuple[float, float] = (1.0, 0.0),
) -> ElementMatrices:
    """Матрицы элемента в глобальных координатах (ориентация — единичный вектор оси)."""
    if not length > 0:
        raise AssemblyError(f"Длина элемента должна быть > 0, получено {length}")
    loc = local_matrices(length, material, law)
    t = rotation(orientation)
    return ElementMatrices(
        t.T @ loc.k_axial @ t,
        t.T @ loc.k_bending @ t,
        loc.bending_degree,
        t.T @ loc.mass @ t,
    )
