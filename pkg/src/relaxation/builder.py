# -*- coding: utf-8 -*-
"""
builder.py — релаксация порядка r: матрица моментов, локализующие матрицы
L_y(b bᵀ ⊗ G(a)) и целевая функция L_y(Σ (ρℓ)_v a_v).

Блок хранится как аффинное отображение y -> симметричная матрица:
триплеты (строка, столбец, номер момента, коэффициент) только для
верхнего треугольника. Номера моментов выдаются при фиксированном обходе:
сначала матрица моментов, затем ограничения в порядке подачи.
"""

from __future__ import annotations

import logging
import math
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from src.constraints.lmi import COMPACT_KINDS, PolyLmi, minimal_order_of
from src.errors import RelaxationError
from src.fem.assembly import StructuralPencil
from src.fem.polymatrix import PolynomialMatrix, add_exponents, unit_exponent
from src.relaxation.basis import BasisKind, MonomialBasis, make_basis
from src.relaxation.indexer import MomentIndexer

log = logging.getLogger(__name__)

MOMENT_ORIGIN = "Moment"


# -----------------------------
# Типы
# -----------------------------

@dataclass
class AffineBlock:
    dimension: int
    origin: str
    rows: np.ndarray
    cols: np.ndarray
    ids: np.ndarray
    vals: np.ndarray

    @property
    def is_compact(self) -> bool:
        return self.origin in {k.value for k in COMPACT_KINDS}

    def value(self, y: Sequence[float]) -> np.ndarray:
        """Численное значение блока при векторе моментов y."""
        y = np.asarray(y, dtype=float)
        out = np.zeros((self.dimension, self.dimension))
        np.add.at(out, (self.rows, self.cols), self.vals * y[self.ids])
        off = self.rows != self.cols
        np.add.at(out, (self.cols[off], self.rows[off]), self.vals[off] * y[self.ids[off]])
        return out


@dataclass
class SdpProblem:
    """min cᵀy  при  B_i(y) ⪰ 0, y_0 = 1."""

    order: int
    n_vars: int
    indexer: MomentIndexer
    objective: np.ndarray
    blocks: List[AffineBlock]
    variable_scale: np.ndarray
    basis_kind: BasisKind = BasisKind.NMT
    meta: Dict[str, object] = field(default_factory=dict)

    @property
    def n_moments(self) -> int:
        return len(self.indexer)

    @property
    def n_free(self) -> int:
        """Число свободных скаляров после исключения y_0 = 1."""
        return self.n_moments - 1

    def block_summary(self) -> str:
        """Сводка размеров блоков 'n_c x m': компактификация, моменты, остальные."""
        groups: "OrderedDict[tuple, int]" = OrderedDict()
        ordered = ([b for b in self.blocks if b.is_compact]
                   + [b for b in self.blocks if b.origin == MOMENT_ORIGIN]
                   + [b for b in self.blocks if not b.is_compact and b.origin != MOMENT_ORIGIN])
        for b in ordered:
            tag = "compact" if b.is_compact else b.origin
            key = (tag, b.dimension)
            groups[key] = groups.get(key, 0) + 1
        return ", ".join(f"{count}x{dim}" for (_, dim), count in groups.items())


# -----------------------------
# Локализующие блоки
# -----------------------------

def basis_degree(order: int, lmi_degree: int) -> int:
    return order - math.ceil(lmi_degree / 2)


def localizing_block(
    G: PolynomialMatrix,
    basis: MonomialBasis,
    indexer: MomentIndexer,
    origin: str = "",
) -> AffineBlock:
    """
    Блок размера |b|·dim(G): элемент ((i,k),(j,l)) = Σ_α G_α[k,l] y[α + β_i + β_j],
    строка (i,k) имеет номер i·m + k.
    """
    m = G.dimension
    s = len(basis)
    terms = []
    for alpha, mat in G.items():
        coo = mat.tocoo()
        nz = coo.data != 0.0
        r, c, v = coo.row[nz], coo.col[nz], coo.data[nz]
        up = r <= c
        terms.append((alpha, (r, c, v), (r[up], c[up], v[up])))

    rows: List[np.ndarray] = []
    cols: List[np.ndarray] = []
    ids: List[np.ndarray] = []
    vals: List[np.ndarray] = []
    for i in range(s):
        for j in range(i, s):
            shift = add_exponents(basis[i], basis[j])
            for alpha, full, upper in terms:
                k = indexer.index(add_exponents(alpha, shift))
                r, c, v = upper if i == j else full
                if r.size == 0:
                    continue
                rows.append(i * m + r)
                cols.append(j * m + c)
                ids.append(np.full(r.shape, k, dtype=np.int64))
                vals.append(v)

    def cat(parts, dtype):
        return np.concatenate(parts).astype(dtype) if parts else np.zeros(0, dtype=dtype)

    return AffineBlock(s * m, origin, cat(rows, np.int64), cat(cols, np.int64), cat(ids, np.int64), cat(vals, float))


def jacobi_scaled(G: PolynomialMatrix) -> PolynomialMatrix:
    """Конгруэнтное масштабирование D G D, D = diag(1/√Σ_α|G_α[i,i]|)."""
    if G.dimension == 1:
        peak = max((abs(float(m[0, 0])) for m in G.terms.values()), default=0.0)
        return G.scaled(1.0 / peak) if peak > 0 else G
    diag = np.zeros(G.dimension)
    for mat in G.terms.values():
        diag += np.abs(mat.diagonal())
    d = np.ones(G.dimension)
    pos = diag > 0
    d[pos] = 1.0 / np.sqrt(diag[pos])
    return G.congruence(d)


# -----------------------------
# Релаксация
# -----------------------------

def build_relaxation(
    pencil: StructuralPencil,
    lmis: Sequence[PolyLmi],
    order: int,
    *,
    basis: BasisKind | str = BasisKind.NMT,
    variable_scale: Optional[Sequence[float]] = None,
    block_scaling: bool = False,
) -> SdpProblem:
    """
    Релаксация порядка r для min Σ (ρℓ)_v a_v при G(a) ⪰ 0 для всех lmis.

    variable_scale = u задаёт переменные x = a/u (моменты в x);
    block_scaling включает масштабирование Якоби каждого блока.
    Обе опции не меняют оптимум в точной арифметике.
    """
    n = pencil.n_vars
    r_min = minimal_order_of(list(lmis))
    if order < r_min:
        raise RelaxationError(f"Порядок r={order} меньше минимального r_min={r_min}")
    u = np.ones(n) if variable_scale is None else np.asarray(variable_scale, dtype=float)
    if u.shape != (n,) or np.any(u <= 0):
        raise RelaxationError("Масштаб переменных должен быть положительным вектором длины n_v")
    basis_kind = BasisKind(basis)

    indexer = MomentIndexer(n)
    blocks: List[AffineBlock] = []

    moment = PolynomialMatrix.constant(np.ones((1, 1)), n)
    blocks.append(localizing_block(moment, make_basis(basis_kind, n, order), indexer, MOMENT_ORIGIN))

    for lmi in lmis:
        d = basis_degree(order, lmi.degree)
        if d < 0:
            raise RelaxationError(f"Отрицательная степень базиса для {lmi.kind.value}: r={order}")
        G = lmi.matrix if variable_scale is None else lmi.matrix.rescaled(u)
        if block_scaling:
            G = jacobi_scaled(G)
        blocks.append(localizing_block(G, make_basis(basis_kind, n, d), indexer, lmi.kind.value))

    first = [indexer.index(unit_exponent(n, v)) for v in range(n)]
    objective = np.zeros(len(indexer))
    objective[first] = pencil.weights * u

    sdp = SdpProblem(order, n, indexer, objective, blocks, u, basis_kind)
    log.info("Релаксация r=%d: блоки %s, n=%d", order, sdp.block_summary(), sdp.n_free)
    return sdp


def riesz_objective(sdp: SdpProblem, y: Sequence[float]) -> float:
    return float(sdp.objective @ np.asarray(y, dtype=float))


def dirac_moments(sdp: SdpProblem, a: Sequence[float]) -> np.ndarray:
    """Моменты точечной меры в проекте a (с учётом масштаба переменных)."""
    return sdp.indexer.dirac(np.asarray(a, dtype=float) / sdp.variable_scale)
