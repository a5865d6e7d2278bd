# -*- coding: utf-8 -*-
"""
benchmarks.py — встроенные тестовые задачи.

- ten-segment: сетка 2 м × 1 м, 10 сегментов (4 пересекающиеся диагонали
  без общего узла), алюминий, круглые сечения, заделка в (0,0) и (0,1).
- thirty-five-segment: башня из 35 сегментов на 14 узлах.
- twelve-segment: экспериментальная рама из PETG (прямоугольное сечение
  шириной 2 см), симметричная связь 12 -> 8 переменных.

Варианты: free-vibration (массы + ограничение частоты), dyn-compliance и
peak-power (массы заменены эллипсоидом нагрузки), static-compliance
(предел ω -> 0). Узлы в данных ниже нумеруются с 1, как на схемах.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from src.model.types import (
    CrossSectionLaw,
    FrameProblem,
    HarmonicLoadSpec,
    LoadColumn,
    Material,
    SectionKind,
    Segment,
    Thresholds,
)


class BenchmarkName(str, Enum):
    TEN_SEGMENT = "ten-segment"
    THIRTY_FIVE_SEGMENT = "thirty-five-segment"
    TWELVE_SEGMENT = "twelve-segment"


class Variant(str, Enum):
    FREE_VIBRATION = "free-vibration"
    DYN_COMPLIANCE = "dyn-compliance"
    PEAK_POWER = "peak-power"
    STATIC_COMPLIANCE = "static-compliance"


CLAMPED = (True, True, True)


@dataclass(frozen=True)
class _Layout:
    """Описание геометрии и параметров одной тестовой задачи."""

    nodes: Sequence[Tuple[float, float]]
    segments: Sequence[Tuple[int, int]]
    clamped: Sequence[int]
    loaded: Sequence[int]
    mass: float
    material: Material
    section: CrossSectionLaw
    omega: float
    stated_radius: float
    links: Optional[Sequence[int]] = None


# -----------------------------
# Геометрия
# -----------------------------

ALUMINIUM = Material(young_modulus=68.9e9, density=2770.0)
PETG = Material(young_modulus=1.8e9, density=1200.0)

_TEN = _Layout(
    nodes=[(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1)],
    segments=[(4, 5), (4, 2), (1, 5), (1, 2), (2, 5), (5, 6), (5, 3), (2, 6), (2, 3), (3, 6)],
    clamped=[1, 4],
    loaded=[2, 6],
    mass=10.0,
    material=ALUMINIUM,
    section=CrossSectionLaw(SectionKind.CIRCULAR),
    omega=280.0 * math.pi,
    stated_radius=100.0,
)

_THIRTY_FIVE = _Layout(
    nodes=[
        (0, 0), (1, 0), (0, 1), (1, 1), (-2, 2), (-1, 2), (0, 2),
        (1, 2), (2, 2), (3, 2), (-1, 3), (0, 3), (1, 3), (2, 3),
    ],
    segments=[
        (1, 3), (1, 8), (1, 4), (2, 3), (2, 7), (2, 4), (3, 4), (3, 7), (3, 13),
        (3, 8), (4, 7), (4, 12), (4, 8), (5, 6), (6, 7), (7, 8), (8, 9), (9, 10),
        (5, 11), (5, 12), (6, 11), (6, 12), (7, 11), (7, 12), (7, 13), (8, 12),
        (8, 13), (8, 14), (9, 13), (9, 14), (10, 13), (10, 14), (11, 12), (12, 13),
        (13, 14),
    ],
    clamped=[1, 2],
    loaded=[12, 13],
    mass=10.0,
    material=ALUMINIUM,
    section=CrossSectionLaw(SectionKind.CIRCULAR),
    omega=160.0 * math.pi,
    stated_radius=100.0,
)

# нижний пояс — нечётные узлы, верхний — чётные; шаг 4 см, высота 2 см
_TWELVE = _Layout(
    nodes=[(0.04 * (k // 2), 0.02 * (k % 2)) for k in range(10)],
    segments=[
        (1, 3), (3, 5), (5, 7), (7, 9),
        (3, 4), (5, 6), (7, 8), (9, 10),
        (2, 4), (4, 6), (6, 8), (8, 10),
    ],
    clamped=[1, 2],
    loaded=[9],
    mass=0.02,
    material=PETG,
    section=CrossSectionLaw(SectionKind.RECTANGULAR, width=0.02),
    omega=60.0 * math.pi,
    stated_radius=math.sqrt(0.02),
    links=[1, 2, 3, 4, 5, 6, 7, 8, 1, 2, 3, 4],
)

_LAYOUTS: Dict[BenchmarkName, _Layout] = {
    BenchmarkName.TEN_SEGMENT: _TEN,
    BenchmarkName.THIRTY_FIVE_SEGMENT: _THIRTY_FIVE,
    BenchmarkName.TWELVE_SEGMENT: _TWELVE,
}


# -----------------------------
# Сборка задачи
# -----------------------------

def consistent_radius(omega: float, dbar: float, mass: float) -> float:
    """Радиус шара нагрузок, при котором QQᵀ/(ω² d̄_R) равна узловой массе."""
    return math.sqrt(omega * omega * dbar * mass)


def _load_columns(layout: _Layout, radius: float) -> Tuple[LoadColumn, ...]:
    cols: List[LoadColumn] = []
    for node in layout.loaded:
        cols.append(LoadColumn(node - 1, (1.0, 0.0), radius))
        cols.append(LoadColumn(node - 1, (0.0, 1.0), radius))
    return tuple(cols)


def builtin_benchmark(
    name: BenchmarkName | str,
    variant: Variant | str = Variant.FREE_VIBRATION,
    *,
    consistent_load: bool = False,
    elements_per_segment: int = 2,
) -> FrameProblem:
    """
    Возвращает встроенную задачу.

    consistent_load=True заменяет заявленный радиус эллипсоида на
    согласованный (см. consistent_radius); для twelve-segment они совпадают.
    """
    name = BenchmarkName(name)
    variant = Variant(variant)
    layout = _LAYOUTS[name]

    omega = layout.omega
    lambda_bar = omega * omega
    dbar = 1.0 / lambda_bar
    pbar = omega * dbar / 2.0

    links = list(layout.links) if layout.links is not None else list(range(1, len(layout.segments) + 1))
    segments = tuple(
        Segment(i=i - 1, j=j - 1, material="material", section="section", link=link, mesh=elements_per_segment)
        for (i, j), link in zip(layout.segments, links)
    )

    masses: Dict[int, float] = {}
    load: Optional[HarmonicLoadSpec] = None
    if variant == Variant.FREE_VIBRATION:
        masses = {node - 1: layout.mass for node in layout.loaded}
        thresholds = Thresholds(lambda_bar=lambda_bar)
    else:
        radius = consistent_radius(omega, dbar, layout.mass) if consistent_load else layout.stated_radius
        load_omega = 0.0 if variant == Variant.STATIC_COMPLIANCE else omega
        load = HarmonicLoadSpec(omega=load_omega, columns=_load_columns(layout, radius))
        if variant == Variant.DYN_COMPLIANCE:
            thresholds = Thresholds(dbar=dbar)
        elif variant == Variant.PEAK_POWER:
            thresholds = Thresholds(pbar=pbar)
        else:
            thresholds = Thresholds(cbar=dbar)

    return FrameProblem(
        nodes=tuple((float(x), float(y)) for x, y in layout.nodes),
        segments=segments,
        materials={"material": layout.material},
        sections={"section": layout.section},
        supports={node - 1: CLAMPED for node in layout.clamped},
        masses=masses,
        load=load,
        thresholds=thresholds,
        name=f"{name.value}:{variant.value}",
    )


def parse_builtin_spec(spec: str) -> Tuple[BenchmarkName, Variant]:
    """'ten-segment:peak-power' -> (TEN_SEGMENT, PEAK_POWER); вариант по умолчанию free-vibration."""
    name, _, variant = spec.partition(":")
    return BenchmarkName(name.strip()), Variant(variant.strip() or Variant.FREE_VIBRATION.value)
