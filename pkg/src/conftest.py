# -*- coding: utf-8 -*-
"""
conftest.py — общие фикстуры тестов: маленькие рамы и эталонные проекты.
"""

from __future__ import annotations

import numpy as np
import pytest

from src.model.benchmarks import builtin_benchmark
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

UNIT = Material(young_modulus=1.0, density=1.0)
ROUND = CrossSectionLaw(SectionKind.CIRCULAR)

# оптимум ten-segment, см²
TEN_OPTIMUM_CM2 = (88.285, 76.443, 37.742, 102.133, 0.0, 105.568, 0.0, 55.453, 0.0, 0.0)
# оптимум twelve-segment: высоты, мм (ширина 20 мм)
TWELVE_HEIGHTS_MM = (1.820, 1.751, 1.654, 1.517, 2.432, 2.392, 2.255, 1.449)


def cantilever(mass: float = 1.0, lambda_bar: float = 1e-3, mesh: int = 1, **kwargs) -> FrameProblem:
    """Консоль единичной длины вдоль x, заделка в узле 0, масса в узле 1."""
    return FrameProblem(
        nodes=((0.0, 0.0), (1.0, 0.0)),
        segments=(Segment(0, 1, "unit", "round", link=1, mesh=mesh),),
        materials={"unit": UNIT},
        sections={"round": ROUND},
        supports={0: (True, True, True)},
        masses={1: mass} if mass else {},
        thresholds=kwargs.pop("thresholds", Thresholds(lambda_bar=lambda_bar)),
        name="cantilever",
        **kwargs,
    )


def l_frame(**kwargs) -> FrameProblem:
    """Г-образная рама из двух сегментов (две переменные), заделка в узле 0."""
    defaults = dict(
        masses={2: 1.0},
        thresholds=Thresholds(lambda_bar=1e-3),
    )
    defaults.update(kwargs)
    return FrameProblem(
        nodes=((0.0, 0.0), (0.0, 1.0), (1.0, 1.0)),
        segments=(
            Segment(0, 1, "unit", "round", link=1, mesh=1),
            Segment(1, 2, "unit", "round", link=2, mesh=1),
        ),
        materials={"unit": UNIT},
        sections={"round": ROUND},
        supports={0: (True, True, True)},
        name="l-frame",
        **defaults,
    )


def loaded_l_frame(omega: float = 0.5, dbar: float = 10.0, pbar=None) -> FrameProblem:
    load = HarmonicLoadSpec(
        omega=omega,
        columns=(LoadColumn(2, (1.0, 0.0), 0.1), LoadColumn(2, (0.0, 1.0), 0.1)),
    )
    th = Thresholds(pbar=pbar) if pbar is not None else Thresholds(dbar=dbar)
    return l_frame(masses={}, load=load, thresholds=th)


@pytest.fixture
def cantilever_problem() -> FrameProblem:
    return cantilever()


@pytest.fixture
def l_frame_problem() -> FrameProblem:
    return l_frame()


@pytest.fixture
def ten_segment() -> FrameProblem:
    return builtin_benchmark("ten-segment", "free-vibration")


@pytest.fixture
def twelve_segment() -> FrameProblem:
    return builtin_benchmark("twelve-segment", "free-vibration")


@pytest.fixture
def ten_optimum() -> np.ndarray:
    return np.array(TEN_OPTIMUM_CM2) * 1e-4


@pytest.fixture
def twelve_optimum() -> np.ndarray:
    return 0.02 * np.array(TWELVE_HEIGHTS_MM) * 1e-3


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240607)
