# -*- coding: utf-8 -*-
"""
indexer.py — нумерация псевдомоментов y_α и функционал Рисса L_y.
"""

from __future__ import annotations

from typing import Dict, List, Mapping, Sequence

import numpy as np

from src.errors import RelaxationError
from src.fem.polymatrix import Exponent, unit_exponent, zero_exponent


class MomentIndexer:
    """Показатель -> номер момента; номера выдаются в порядке первого обращения, y_0 = 1."""

    def __init__(self, n_vars: int):
        self.n_vars = n_vars
        self._ids: Dict[Exponent, int] = {}
        self._exponents: List[Exponent] = []
        self.index(zero_exponent(n_vars))

    def __len__(self) -> int:
        return len(self._exponents)

    def __contains__(self, alpha: Exponent) -> bool:
        return tuple(alpha) in self._ids

    def index(self, alpha: Exponent) -> int:
        """Номер момента; новый показатель регистрируется."""
        alpha = tuple(alpha)
        k = self._ids.get(alpha)
        if k is None:
            k = len(self._exponents)
            self._ids[alpha] = k
            self._exponents.append(alpha)
        return k

    def lookup(self, alpha: Exponent) -> int:
        k = self._ids.get(tuple(alpha))
        if k is None:
            raise RelaxationError(f"Момент {tuple(alpha)} не зарегистрирован")
        return k

    @property
    def exponents(self) -> List[Exponent]:
        return list(self._exponents)

    def first_order_ids(self) -> List[int]:
        return [self.lookup(unit_exponent(self.n_vars, v)) for v in range(self.n_vars)]

    def dirac(self, a: Sequence[float]) -> np.ndarray:
        """Моменты точечной меры в a: y_α = a^α."""
        a = np.asarray(a, dtype=float)
        exps = np.array(self._exponents, dtype=float)
        return np.prod(np.power(a[None, :], exps), axis=1)


def riesz_apply(poly: Mapping[Exponent, float], y: Sequence[float], indexer: MomentIndexer) -> float:
    """L_y(p) = Σ_α p_α y_α."""
    return float(sum(c * y[indexer.lookup(alpha)] for alpha, c in poly.items()))
