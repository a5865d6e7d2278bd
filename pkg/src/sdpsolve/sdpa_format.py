# -*- coding: utf-8 -*-
"""
sdpa_format.py — запись и чтение разреженного формата SDPA (.dat-s).

Модель SDPA: min cᵀx  при  Σ_k F_k x_k − F_0 ⪰ 0. Момент y_0 = 1
подставлен в постоянную часть, поэтому x = (y_1, …, y_{n−1}),
F_k — коэффициенты при y_k, F_0 — постоянная часть со знаком минус.

Строки файла: комментарии "*", m, число блоков, размеры блоков,
вектор c, затем записи "k b i j v" (i <= j, нумерация с 1).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np

from src.errors import SolverError
from src.relaxation.builder import SdpProblem

EntryKey = Tuple[int, int, int, int]

_SEPARATORS = re.compile(r"[,{}()]")


@dataclass(frozen=True)
class SdpaDocument:
    m: int
    block_sizes: Tuple[int, ...]
    c: np.ndarray
    entries: Dict[EntryKey, float]


def _fmt(v: float) -> str:
    return "%.17g" % v


def sdpa_entries(problem: SdpProblem) -> Dict[EntryKey, float]:
    """Записи (k, b, i, j) -> значение; повторы суммируются, нули отбрасываются."""
    acc: Dict[EntryKey, float] = {}
    for b, block in enumerate(problem.blocks, start=1):
        for r, c, k, v in zip(block.rows.tolist(), block.cols.tolist(), block.ids.tolist(), block.vals.tolist()):
            key = (int(k), b, int(r) + 1, int(c) + 1)
            acc[key] = acc.get(key, 0.0) + (-v if k == 0 else v)
    return {key: val for key, val in sorted(acc.items()) if val != 0.0}


def export_sdpa(problem: SdpProblem) -> str:
    """Текст .dat-s; вывод детерминирован для одной и той же задачи."""
    lines: List[str] = [
        f"* moment relaxation: order r={problem.order}, n_vars={problem.n_vars}, basis={problem.basis_kind.value}",
        "* minimize c^T x subject to sum_k F_k x_k - F_0 >= 0 (PSD), x_k = y_k for k >= 1, y_0 = 1",
        f"* objective constant (not included in c): {_fmt(float(problem.objective[0]))}",
        str(problem.n_free),
        str(len(problem.blocks)),
        " ".join(str(b.dimension) for b in problem.blocks),
        " ".join(_fmt(float(v)) for v in problem.objective[1:]),
    ]
    for (k, b, i, j), v in sdpa_entries(problem).items():
        lines.append(f"{k} {b} {i} {j} {_fmt(v)}")
    return "\n".join(lines) + "\n"


def write_sdpa(problem: SdpProblem, path: Union[str, Path]) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(export_sdpa(problem), encoding="utf-8")
    return p


def _data_lines(text: str) -> List[str]:
    out = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line[0] in "*\"":
            continue
        out.append(_SEPARATORS.sub(" ", line).strip())
    return out


def read_sdpa(text: str) -> SdpaDocument:
    """Разбор .dat-s; допускает разделители ',{}()' в заголовке."""
    lines = _data_lines(text)
    if len(lines) < 3:
        raise SolverError("Файл SDPA слишком короткий")
    m = int(lines[0].split()[0])
    n_blocks = int(lines[1].split()[0])
    sizes = tuple(abs(int(v)) for v in lines[2].split()[:n_blocks])
    pos = 3
    c_vals: List[float] = []
    if m > 0:
        while len(c_vals) < m:
            c_vals.extend(float(v) for v in lines[pos].split())
            pos += 1
    entries: Dict[EntryKey, float] = {}
    for line in lines[pos:]:
        parts = line.split()
        if len(parts) != 5:
            raise SolverError(f"Некорректная строка SDPA: '{line}'")
        k, b, i, j = (int(v) for v in parts[:4])
        if i > j:
            i, j = j, i
        key = (k, b, i, j)
        entries[key] = entries.get(key, 0.0) + float(parts[4])
    return SdpaDocument(m, sizes, np.array(c_vals[:m], dtype=float), entries)


def read_sdpa_solution(text: str, m: int) -> np.ndarray:
    """Первая строка файла решения (формат CSDP/SDPA) — вектор x длины m."""
    lines = _data_lines(text)
    if not lines:
        raise SolverError("Пустой файл решения")
    vals = [float(v) for v in lines[0].split()]
    if len(vals) != m:
        raise SolverError(f"В решении {len(vals)} значений, ожидалось {m}")
    return np.array(vals)
