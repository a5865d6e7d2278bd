# -*- coding: utf-8 -*-
"""
assembly.py — разбиение сегментов на элементы и сборка глобального пучка
K(a), M(a) с исключением закреплённых степеней свободы.

Каждый сегмент получает собственные внутренние узлы (пересекающиеся
диагонали не соединяются). Порядок элементов фиксирован: сегменты по
порядку, внутри сегмента — от узла i к узлу j.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from src.errors import AssemblyError
from src.fem.element import element_matrices
from src.fem.polymatrix import Exponent, PolynomialMatrix, unit_exponent, zero_exponent
from src.model.types import FrameProblem, HarmonicLoadSpec

log = logging.getLogger(__name__)


# -----------------------------
# Сетка
# -----------------------------

@dataclass(frozen=True)
class MeshElement:
    node_a: int
    node_b: int
    length: float
    orientation: Tuple[float, float]
    segment: int
    var: int  # с 0


@dataclass(frozen=True)
class Mesh:
    coordinates: np.ndarray  # (n_nodes, 2): сначала узлы задачи, затем внутренние
    elements: Tuple[MeshElement, ...]

    @property
    def n_nodes(self) -> int:
        return self.coordinates.shape[0]


def build_mesh(problem: FrameProblem) -> Mesh:
    coords: List[Tuple[float, float]] = [tuple(p) for p in problem.nodes]
    elements: List[MeshElement] = []
    for k, seg in enumerate(problem.segments):
        p0 = np.array(problem.nodes[seg.i], dtype=float)
        p1 = np.array(problem.nodes[seg.j], dtype=float)
        vec = p1 - p0
        length = float(np.hypot(*vec))
        orient = (float(vec[0] / length), float(vec[1] / length))
        chain = [seg.i]
        for s in range(1, seg.mesh):
            coords.append(tuple(p0 + vec * s / seg.mesh))
            chain.append(len(coords) - 1)
        chain.append(seg.j)
        for na, nb in zip(chain[:-1], chain[1:]):
            elements.append(MeshElement(na, nb, length / seg.mesh, orient, k, seg.link - 1))
    return Mesh(np.array(coords, dtype=float), tuple(elements))


# -----------------------------
# Нумерация степеней свободы
# -----------------------------

@dataclass(frozen=True)
class DofMap:
    n_nodes: int
    free: np.ndarray   # глобальные номера оставшихся степеней свободы
    index: np.ndarray  # глобальный -> редуцированный номер, -1 для закреплённых

    @property
    def n_dof(self) -> int:
        return int(self.free.shape[0])

    def dof(self, node: int, component: int) -> Optional[int]:
        """Редуцированный номер (u=0, v=1, θ=2) или None, если закреплена."""
        r = int(self.index[3 * node + component])
        return r if r >= 0 else None

    def reduce_vector(self, full: np.ndarray) -> np.ndarray:
        return np.asarray(full, dtype=float)[self.free]

    def expand_vector(self, reduced: np.ndarray) -> np.ndarray:
        out = np.zeros(3 * self.n_nodes)
        out[self.free] = reduced
        return out


def build_dof_map(problem: FrameProblem, n_nodes: int, eliminate_supports: bool = True) -> DofMap:
    fixed = np.zeros(3 * n_nodes, dtype=bool)
    if eliminate_supports:
        for node, fix in problem.supports.items():
            for c in range(3):
                fixed[3 * node + c] = bool(fix[c])
    free = np.flatnonzero(~fixed)
    index = -np.ones(3 * n_nodes, dtype=int)
    index[free] = np.arange(free.shape[0])
    return DofMap(n_nodes, free, index)


# -----------------------------
# Пучок
# -----------------------------

@dataclass
class StructuralPencil:
    stiffness: PolynomialMatrix
    mass: PolynomialMatrix
    dof_map: DofMap
    weights: np.ndarray  # ρℓ по переменным, кг/м²
    mesh: Mesh

    @property
    def n_vars(self) -> int:
        return self.stiffness.n_vars

    @property
    def n_dof(self) -> int:
        return self.stiffness.dimension

    @property
    def stiffness_degree(self) -> int:
        return self.stiffness.degree

    @property
    def mass_constant(self) -> np.ndarray:
        return self.mass.coefficient(zero_exponent(self.n_vars)).toarray()

    def with_mass_constant(self, m0: np.ndarray) -> "StructuralPencil":
        return StructuralPencil(self.stiffness, self.mass.with_constant(m0), self.dof_map, self.weights, self.mesh)


class _Accumulator:
    """Триплеты по показателям; сумма в CSR выполняется один раз."""

    def __init__(self, size: int):
        self.size = size
        self.data: Dict[Exponent, Tuple[List[np.ndarray], List[np.ndarray], List[np.ndarray]]] = {}

    def add(self, alpha: Exponent, dofs: np.ndarray, mat: np.ndarray) -> None:
        rows, cols, vals = self.data.setdefault(alpha, ([], [], []))
        r, c = np.meshgrid(dofs, dofs, indexing="ij")
        rows.append(r.ravel())
        cols.append(c.ravel())
        vals.append(mat.ravel())

    def to_polynomial(self, free: np.ndarray, n_vars: int) -> PolynomialMatrix:
        pm = PolynomialMatrix(free.shape[0], n_vars)
        for alpha, (rows, cols, vals) in self.data.items():
            full = sp.coo_matrix(
                (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                shape=(self.size, self.size),
            ).tocsr()
            full.eliminate_zeros()
            pm.add_term(alpha, full[free][:, free])
        return pm


def assemble_pencil(problem: FrameProblem, eliminate_supports: bool = True) -> StructuralPencil:
    """Глобальные K(a), M(a); eliminate_supports=False оставляет все степени свободы."""
    if eliminate_supports and not any(any(f) for f in problem.supports.values()):
        raise AssemblyError("Конструкция не закреплена (нет опор)")
    mesh = build_mesh(problem)
    n_vars = problem.n_vars
    size = 3 * mesh.n_nodes
    stiff = _Accumulator(size)
    mass = _Accumulator(size)
    weights = np.zeros(n_vars)

    for el in mesh.elements:
        seg = problem.segments[el.segment]
        material = problem.materials[seg.material]
        law = problem.sections[seg.section]
        em = element_matrices(el.length, material, law, el.orientation)
        dofs = np.array([3 * el.node_a, 3 * el.node_a + 1, 3 * el.node_a + 2,
                         3 * el.node_b, 3 * el.node_b + 1, 3 * el.node_b + 2])
        stiff.add(unit_exponent(n_vars, el.var, 1), dofs, em.k_axial)
        stiff.add(unit_exponent(n_vars, el.var, em.bending_degree), dofs, em.k_bending)
        mass.add(unit_exponent(n_vars, el.var, 1), dofs, em.mass)
        weights[el.var] += material.density * el.length

    if problem.masses:
        nodes = np.array(sorted(problem.masses), dtype=int)
        m = np.array([problem.masses[n] for n in nodes])
        # точечная масса на обе поступательные степени свободы, без инерции поворота
        idx = np.concatenate([3 * nodes, 3 * nodes + 1])
        mass.add(zero_exponent(n_vars), idx, np.diag(np.concatenate([m, m])))

    dof_map = build_dof_map(problem, mesh.n_nodes, eliminate_supports)
    pencil = StructuralPencil(
        stiffness=stiff.to_polynomial(dof_map.free, n_vars),
        mass=mass.to_polynomial(dof_map.free, n_vars),
        dof_map=dof_map,
        weights=weights,
        mesh=mesh,
    )
    log.debug("Собран пучок: узлов=%d, степеней свободы=%d, n_v=%d, d_K=%d",
              mesh.n_nodes, pencil.n_dof, n_vars, pencil.stiffness_degree)
    return pencil


def structural_weight(pencil: StructuralPencil, a) -> float:
    """Вес конструкции Σ_v (ρℓ)_v a_v, кг."""
    return float(pencil.weights @ np.asarray(a, dtype=float))


def load_matrix(dof_map: DofMap, load: HarmonicLoadSpec) -> np.ndarray:
    """Матрица Q (n_dof × q) на редуцированных степенях свободы."""
    if load.amplitude is not None:
        return dof_map.reduce_vector(np.asarray(load.amplitude)).reshape(-1, 1)
    q = np.zeros((dof_map.n_dof, len(load.columns)))
    for k, col in enumerate(load.columns):
        norm = float(np.hypot(*col.direction))
        for comp in (0, 1):
            d = dof_map.dof(col.node, comp)
            if d is not None:
                q[d, k] += col.scale * col.direction[comp] / norm
    return q
