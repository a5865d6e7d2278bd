# -*- coding: utf-8 -*-
"""
polymatrix.py — симметричная матрица-многочлен от проектных переменных.

P(a) = Σ_α P_α a^α, где α — вектор показателей длины n_v, а P_α —
разреженная симметричная матрица (scipy.sparse). Используется для K(a),
M(a) и всех матричных неравенств G(a) ⪰ 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from src.errors import AssemblyError, ConstraintError

Exponent = Tuple[int, ...]


def zero_exponent(n_vars: int) -> Exponent:
    return (0,) * n_vars


def unit_exponent(n_vars: int, var: int, power: int = 1) -> Exponent:
    """Показатель a_var^power (var с 0)."""
    alpha = [0] * n_vars
    alpha[var] = power
    return tuple(alpha)


def add_exponents(*alphas: Exponent) -> Exponent:
    return tuple(int(sum(v)) for v in zip(*alphas))


def graded_key(alpha: Exponent) -> Tuple[int, Tuple[int, ...]]:
    """Порядок: по степени, внутри степени — по убыванию показателей (a1 > a2)."""
    return sum(alpha), tuple(-v for v in alpha)


def monomial_value(alpha: Exponent, a: np.ndarray) -> float:
    out = 1.0
    for v, p in zip(a, alpha):
        if p:
            out *= float(v) ** p
    return out


@dataclass
class PolynomialMatrix:
    dimension: int
    n_vars: int
    terms: Dict[Exponent, sp.csr_matrix] = field(default_factory=dict)

    # --- конструкторы ---

    @classmethod
    def constant(cls, matrix, n_vars: int) -> "PolynomialMatrix":
        mat = sp.csr_matrix(np.atleast_2d(matrix) if not sp.issparse(matrix) else matrix, dtype=float)
        pm = cls(mat.shape[0], n_vars)
        pm.add_term(zero_exponent(n_vars), mat)
        return pm

    @classmethod
    def scalar(cls, coefficients: Dict[Exponent, float], n_vars: int) -> "PolynomialMatrix":
        """Скалярный многочлен как матрица 1×1."""
        pm = cls(1, n_vars)
        for alpha, c in coefficients.items():
            pm.add_term(alpha, sp.csr_matrix([[float(c)]]))
        return pm

    def add_term(self, alpha: Exponent, matrix) -> None:
        if len(alpha) != self.n_vars:
            raise AssemblyError(f"Длина показателя {len(alpha)} != n_v={self.n_vars}")
        mat = sp.csr_matrix(matrix, dtype=float)
        if mat.shape != (self.dimension, self.dimension):
            raise AssemblyError(f"Коэффициент {mat.shape} не совпадает с размерностью {self.dimension}")
        alpha = tuple(int(v) for v in alpha)
        if alpha in self.terms:
            self.terms[alpha] = (self.terms[alpha] + mat).tocsr()
        else:
            self.terms[alpha] = mat

    # --- свойства ---

    @property
    def degree(self) -> int:
        return max((sum(alpha) for alpha in self.terms), default=0)

    def monomials(self) -> List[Exponent]:
        return sorted(self.terms, key=graded_key)

    def items(self) -> Iterator[Tuple[Exponent, sp.csr_matrix]]:
        for alpha in self.monomials():
            yield alpha, self.terms[alpha]

    def coefficient(self, alpha: Exponent) -> sp.csr_matrix:
        mat = self.terms.get(tuple(alpha))
        return mat if mat is not None else sp.csr_matrix((self.dimension, self.dimension))

    def is_symmetric(self, tol: float = 0.0) -> bool:
        for mat in self.terms.values():
            diff = mat - mat.T
            if diff.nnz and abs(diff).max() > tol:
                return False
        return True

    # --- вычисление ---

    def evaluate(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=float).ravel()
        if a.shape[0] != self.n_vars:
            raise AssemblyError(f"Длина вектора проекта {a.shape[0]} != n_v={self.n_vars}")
        out = np.zeros((self.dimension, self.dimension))
        for alpha, mat in self.items():
            c = monomial_value(alpha, a)
            if c != 0.0:
                out += c * mat.toarray()
        return out

    # --- алгебра ---

    def copy(self) -> "PolynomialMatrix":
        return PolynomialMatrix(self.dimension, self.n_vars, {k: v.copy() for k, v in self.terms.items()})

    def scaled(self, factor: float) -> "PolynomialMatrix":
        return PolynomialMatrix(self.dimension, self.n_vars, {k: (v * factor).tocsr() for k, v in self.terms.items()})

    def __add__(self, other: "PolynomialMatrix") -> "PolynomialMatrix":
        if (other.dimension, other.n_vars) != (self.dimension, self.n_vars):
            raise AssemblyError("Несовместимые матрицы-многочлены")
        out = self.copy()
        for alpha, mat in other.terms.items():
            out.add_term(alpha, mat)
        return out

    def __sub__(self, other: "PolynomialMatrix") -> "PolynomialMatrix":
        return self + other.scaled(-1.0)

    def with_constant(self, matrix) -> "PolynomialMatrix":
        """Копия с заменённым свободным членом."""
        out = self.copy()
        out.terms.pop(zero_exponent(self.n_vars), None)
        out.add_term(zero_exponent(self.n_vars), matrix)
        return out

    def congruence(self, diag: np.ndarray) -> "PolynomialMatrix":
        """D P(a) D для положительной диагонали D (сохраняет знак определённости)."""
        d = sp.diags(np.asarray(diag, dtype=float))
        return PolynomialMatrix(self.dimension, self.n_vars, {k: (d @ v @ d).tocsr() for k, v in self.terms.items()})

    def rescaled(self, scale: Sequence[float]) -> "PolynomialMatrix":
        """Подстановка a = u ∘ x: коэффициент при x^α равен P_α u^α."""
        u = np.asarray(scale, dtype=float)
        return PolynomialMatrix(
            self.dimension, self.n_vars,
            {k: (v * monomial_value(k, u)).tocsr() for k, v in self.terms.items()},
        )

    def bordered(self, corner: np.ndarray, border: np.ndarray) -> "PolynomialMatrix":
        """
        [[corner, borderᵀ], [border, P(a)]]: рамка постоянна, угол q×q.
        При q = 0 возвращается копия P.
        """
        border = np.asarray(border, dtype=float).reshape(self.dimension, -1)
        q = border.shape[1]
        if q == 0:
            return self.copy()
        corner = np.asarray(corner, dtype=float).reshape(q, q)
        out = PolynomialMatrix(self.dimension + q, self.n_vars)
        for alpha, mat in self.terms.items():
            out.add_term(alpha, sp.block_diag([sp.csr_matrix((q, q)), mat], format="csr"))
        const = sp.bmat([[sp.csr_matrix(corner), sp.csr_matrix(border.T)], [sp.csr_matrix(border), None]], format="csr")
        out.add_term(zero_exponent(self.n_vars), const)
        return out

    def tangent(self, a0: Sequence[float]) -> Tuple[sp.csr_matrix, List[sp.csr_matrix]]:
        """
        Аффинная модель L(a) = C0 + Σ_v a_v C_v: члены степени <= 1 точны,
        чистые степени a_v^k (k >= 2) заменены касательной в точке a0.
        """
        a0 = np.asarray(a0, dtype=float)
        c0 = sp.csr_matrix((self.dimension, self.dimension))
        lin = [sp.csr_matrix((self.dimension, self.dimension)) for _ in range(self.n_vars)]
        for alpha, mat in self.terms.items():
            nz = [v for v, p in enumerate(alpha) if p]
            if not nz:
                c0 = c0 + mat
                continue
            if len(nz) > 1:
                raise ConstraintError(f"Смешанный моном {alpha} не линеаризуется касательной")
            v = nz[0]
            k = alpha[v]
            if k == 1:
                lin[v] = lin[v] + mat
            else:
                base = a0[v] ** (k - 1)
                c0 = c0 + (1 - k) * base * a0[v] * mat
                lin[v] = lin[v] + k * base * mat
        return c0.tocsr(), [m.tocsr() for m in lin]


def evaluate(P: PolynomialMatrix, a) -> np.ndarray:
    """Σ_α P_α a^α как плотная симметричная матрица."""
    return P.evaluate(a)


def polynomial_from_dense(terms: Dict[Exponent, np.ndarray], n_vars: int, dimension: Optional[int] = None) -> PolynomialMatrix:
    if dimension is None:
        dimension = np.atleast_2d(next(iter(terms.values()))).shape[0]
    pm = PolynomialMatrix(dimension, n_vars)
    for alpha, mat in terms.items():
        pm.add_term(alpha, np.atleast_2d(mat))
    return pm
