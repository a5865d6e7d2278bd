# -*- coding: utf-8 -*-
"""
types.py — предметные типы: материал, закон сечения, сегменты рамы,
гармоническая нагрузка и сама задача оптимизации.

Все величины в СИ (м, м², Па, кг, рад/с). Объекты неизменяемы после
создания; инварианты проверяются в __post_init__.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from types import MappingProxyType
from typing import List, Mapping, Optional, Tuple

from src.errors import ProblemValidationError

Point = Tuple[float, float]
Fixity = Tuple[bool, bool, bool]

PHASE_TOL = 1e-9


# -----------------------------
# Материал и сечение
# -----------------------------

@dataclass(frozen=True)
class Material:
    young_modulus: float
    density: float

    def __post_init__(self) -> None:
        if not (self.young_modulus > 0 and self.density > 0):
            raise ProblemValidationError(
                f"Модуль Юнга и плотность должны быть > 0: E={self.young_modulus}, rho={self.density}"
            )


class SectionKind(str, Enum):
    CIRCULAR = "circular"
    RECTANGULAR = "rectangular"  # прямоугольник фиксированной ширины


@dataclass(frozen=True)
class CrossSectionLaw:
    """Закон I(a): круг I = a²/(4π), прямоугольник ширины b: I = a³/(12 b²)."""

    kind: SectionKind
    width: Optional[float] = None

    def __post_init__(self) -> None:
        if self.kind == SectionKind.RECTANGULAR:
            if self.width is None or not self.width > 0:
                raise ProblemValidationError(f"Для прямоугольного сечения нужна ширина > 0, получено {self.width}")
        elif self.width is not None:
            raise ProblemValidationError("Ширина задаётся только для прямоугольного сечения")

    @property
    def exponent(self) -> int:
        return 2 if self.kind == SectionKind.CIRCULAR else 3

    @property
    def inertia_coefficient(self) -> float:
        if self.kind == SectionKind.CIRCULAR:
            return 1.0 / (4.0 * math.pi)
        return 1.0 / (12.0 * self.width ** 2)


# -----------------------------
# Геометрия
# -----------------------------

@dataclass(frozen=True)
class Segment:
    """Сегмент между узлами i и j; link — номер проектной переменной (с 1)."""

    i: int
    j: int
    material: str
    section: str
    link: int
    mesh: int = 2


# -----------------------------
# Нагрузка
# -----------------------------

@dataclass(frozen=True)
class LoadColumn:
    """Столбец матрицы эллипсоида Q: scale * (dx, dy) в узле node."""

    node: int
    direction: Point
    scale: float


@dataclass(frozen=True)
class HarmonicLoadSpec:
    """
    Нагрузка f(t) = (c1 cos ωt + c2 sin ωt) f_A, f_A ∈ {Q e : ||e|| <= 1}.

    Задаётся либо столбцами эллипсоида, либо одним детерминированным
    вектором amplitude (длина 3 * число узлов, порядок u, v, θ по узлам).
    """

    omega: float
    phase: Tuple[float, float] = (1.0, 0.0)
    columns: Tuple[LoadColumn, ...] = ()
    amplitude: Optional[Tuple[float, ...]] = None

    def __post_init__(self) -> None:
        if not self.omega >= 0:
            raise ProblemValidationError(f"omega должна быть >= 0, получено {self.omega}")
        c1, c2 = self.phase
        norm = c1 * c1 + c2 * c2
        if abs(norm - 1.0) > PHASE_TOL:
            raise ProblemValidationError(f"phase not normalized: c1²+c2² = {norm:.6g}")
        if bool(self.columns) == (self.amplitude is not None):
            raise ProblemValidationError("Нагрузка задаётся ровно одним способом: columns или amplitude")
        for col in self.columns:
            if math.hypot(*col.direction) == 0.0:
                raise ProblemValidationError(f"Нулевое направление нагрузки в узле {col.node}")
            if not col.scale > 0:
                raise ProblemValidationError(f"Масштаб нагрузки в узле {col.node} должен быть > 0, получено {col.scale}")

    @property
    def n_columns(self) -> int:
        return len(self.columns) if self.columns else 1

    def with_omega(self, omega: float) -> "HarmonicLoadSpec":
        return replace(self, omega=omega)


@dataclass(frozen=True)
class Thresholds:
    """Пороги ограничений: λ̄ (рад²/с²), c̄ (Н·м), d̄_R (Н·м), p̄_R (Вт)."""

    lambda_bar: Optional[float] = None
    cbar: Optional[float] = None
    dbar: Optional[float] = None
    pbar: Optional[float] = None

    def __post_init__(self) -> None:
        for name in ("lambda_bar", "cbar", "dbar", "pbar"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ProblemValidationError(f"Порог {name} должен быть > 0, получено {v}")

    def is_empty(self) -> bool:
        return all(getattr(self, n) is None for n in ("lambda_bar", "cbar", "dbar", "pbar"))


def lambda_from_hz(fmin_hz: float) -> float:
    return (2.0 * math.pi * fmin_hz) ** 2


# -----------------------------
# Задача
# -----------------------------

@dataclass(frozen=True)
class FrameProblem:
    nodes: Tuple[Point, ...]
    segments: Tuple[Segment, ...]
    materials: Mapping[str, Material]
    sections: Mapping[str, CrossSectionLaw]
    supports: Mapping[int, Fixity]
    masses: Mapping[int, float] = field(default_factory=dict)
    load: Optional[HarmonicLoadSpec] = None
    thresholds: Thresholds = field(default_factory=Thresholds)
    weight_cap: Optional[float] = None
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(tuple(p) for p in self.nodes))
        object.__setattr__(self, "segments", tuple(self.segments))
        for name in ("materials", "sections", "supports", "masses"):
            object.__setattr__(self, name, MappingProxyType(dict(getattr(self, name))))

        n = len(self.nodes)
        if not self.segments:
            raise ProblemValidationError("Задача без сегментов")
        for k, seg in enumerate(self.segments):
            where = f"segments[{k}]"
            if not (0 <= seg.i < n and 0 <= seg.j < n):
                raise ProblemValidationError(f"{where}: ссылка на несуществующий узел ({seg.i}, {seg.j})")
            if seg.i == seg.j or self.nodes[seg.i] == self.nodes[seg.j]:
                raise ProblemValidationError(f"{where}: нулевая длина")
            if seg.material not in self.materials:
                raise ProblemValidationError(f"{where}.material: неизвестный материал '{seg.material}'")
            if seg.section not in self.sections:
                raise ProblemValidationError(f"{where}.section: неизвестное сечение '{seg.section}'")
            if seg.mesh < 1:
                raise ProblemValidationError(f"{where}.mesh: нужно >= 1 элемента")

        links = sorted({s.link for s in self.segments})
        if links != list(range(1, len(links) + 1)):
            raise ProblemValidationError(f"Номера проектных переменных должны образовывать 1..n_v, получено {links}")

        for node, fix in self.supports.items():
            if not 0 <= node < n:
                raise ProblemValidationError(f"supports: несуществующий узел {node}")
        if not any(any(fix) for fix in self.supports.values()):
            raise ProblemValidationError("Нет ни одной закреплённой степени свободы")

        for node, m in self.masses.items():
            if not 0 <= node < n:
                raise ProblemValidationError(f"masses: несуществующий узел {node}")
            if m < 0:
                raise ProblemValidationError(f"masses[{node}]: отрицательная масса {m}")

        if self.load is not None:
            for col in self.load.columns:
                if not 0 <= col.node < n:
                    raise ProblemValidationError(f"load.columns: несуществующий узел {col.node}")
            if self.load.amplitude is not None and len(self.load.amplitude) != 3 * n:
                raise ProblemValidationError(
                    f"load.amplitude: длина {len(self.load.amplitude)}, ожидается {3 * n}"
                )
        if self.weight_cap is not None and not self.weight_cap > 0:
            raise ProblemValidationError(f"weight_cap должен быть > 0, получено {self.weight_cap}")

    # --- производные величины ---

    @property
    def n_vars(self) -> int:
        return max(s.link for s in self.segments)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def segment_length(self, k: int) -> float:
        seg = self.segments[k]
        (x1, y1), (x2, y2) = self.nodes[seg.i], self.nodes[seg.j]
        return math.hypot(x2 - x1, y2 - y1)

    def segments_of(self, var: int) -> List[int]:
        """Индексы сегментов, связанных с переменной var (с 1)."""
        return [k for k, s in enumerate(self.segments) if s.link == var]

    def segment_areas(self, a) -> List[float]:
        """Площади сегментов для вектора переменных a (связанные сегменты равны)."""
        return [float(a[s.link - 1]) for s in self.segments]

    # --- модификации ---

    def with_mesh(self, elements_per_segment: int) -> "FrameProblem":
        segs = tuple(replace(s, mesh=elements_per_segment) for s in self.segments)
        return replace(self, segments=segs)

    def without_masses(self) -> "FrameProblem":
        return replace(self, masses={})

    def with_load(self, load: Optional[HarmonicLoadSpec]) -> "FrameProblem":
        return replace(self, load=load)

    def with_weight_cap(self, cap: Optional[float]) -> "FrameProblem":
        return replace(self, weight_cap=cap)
