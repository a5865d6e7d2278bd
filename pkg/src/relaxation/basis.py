# -*- coding: utf-8 -*-
"""
basis.py — мономиальные базисы релаксации.

NMT-базис содержит только чистые степени переменных:
[1, a_1, …, a_n, a_1², …, a_n², …, a_1^d, …, a_n^d] (размер 1 + n·d).
Полный (канонический) базис — все мономы степени <= d; он нужен только
для сверки на маленьких задачах.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations_with_replacement
from typing import List, Tuple

from src.errors import RelaxationError
from src.fem.polymatrix import Exponent, unit_exponent, zero_exponent


class BasisKind(str, Enum):
    NMT = "nmt"
    CANONICAL = "canonical"


@dataclass(frozen=True)
class MonomialBasis:
    n_vars: int
    degree: int
    monomials: Tuple[Exponent, ...]
    kind: BasisKind = BasisKind.NMT

    def __len__(self) -> int:
        return len(self.monomials)

    def __getitem__(self, k: int) -> Exponent:
        return self.monomials[k]


def nmt_basis(n_vars: int, degree: int) -> MonomialBasis:
    if degree < 0:
        raise RelaxationError(f"Отрицательная степень базиса: {degree}")
    monos: List[Exponent] = [zero_exponent(n_vars)]
    for k in range(1, degree + 1):
        monos.extend(unit_exponent(n_vars, v, k) for v in range(n_vars))
    return MonomialBasis(n_vars, degree, tuple(monos), BasisKind.NMT)


def full_basis(n_vars: int, degree: int) -> MonomialBasis:
    if degree < 0:
        raise RelaxationError(f"Отрицательная степень базиса: {degree}")
    monos: List[Exponent] = []
    for k in range(degree + 1):
        for combo in combinations_with_replacement(range(n_vars), k):
            alpha = [0] * n_vars
            for v in combo:
                alpha[v] += 1
            monos.append(tuple(alpha))
    return MonomialBasis(n_vars, degree, tuple(monos), BasisKind.CANONICAL)


def make_basis(kind: BasisKind | str, n_vars: int, degree: int) -> MonomialBasis:
    kind = BasisKind(kind)
    return nmt_basis(n_vars, degree) if kind == BasisKind.NMT else full_basis(n_vars, degree)
