# -*- coding: utf-8 -*-
"""
backend.py — решение SdpProblem.

Бэкенды:
- "auto"/"cvxpy": cvxpy, установленные MOSEK, CLARABEL, SCS, CVXOPT по очереди,
  следующий пробуется при сбое или неограниченности;
- "mosek", "clarabel", "scs", "cvxopt": cvxpy с указанным решателем;
- "csdp": внешний процесс csdp, читающий экспорт .dat-s.

Все бэкенды получают одну и ту же модель: свободные скаляры y_1..y_{n−1},
аффинные PSD-блоки и y_0 = 1, подставленный в постоянные части.
"""

from __future__ import annotations

import logging
import shutil
import subprocess
import tempfile
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from src.errors import SolverError
from src.relaxation.builder import AffineBlock, SdpProblem
from src.sdpsolve.sdpa_format import read_sdpa_solution, write_sdpa
from src.sdpsolve.solution import SdpSolution, SdpStatus, SolverStats

log = logging.getLogger(__name__)

CVXPY_SOLVERS = {"mosek": "MOSEK", "clarabel": "CLARABEL", "scs": "SCS", "cvxopt": "CVXOPT"}


@dataclass
class SolverOptions:
    backend: str = "auto"
    tolerance: float = 1e-8
    verbose: bool = False
    time_limit: Optional[float] = None
    solver_kwargs: Dict[str, Any] = field(default_factory=dict)


# -----------------------------
# Вспомогательные функции cvxpy
# -----------------------------

AUTO_ORDER = ("MOSEK", "CLARABEL", "SCS", "CVXOPT")


def is_auto(backend: str) -> bool:
    return backend.lower() in ("auto", "cvxpy")


def auto_candidates() -> List[str]:
    """Установленные SDP-решатели cvxpy в порядке предпочтения."""
    import cvxpy as cp

    installed = cp.installed_solvers()
    found = [s for s in AUTO_ORDER if s in installed]
    if not found:
        raise SolverError(f"Не найден SDP-решатель cvxpy; установлены: {installed}")
    return found


def pick_solver(backend: str = "auto") -> str:
    import cvxpy as cp

    if is_auto(backend):
        return auto_candidates()[0]
    installed = cp.installed_solvers()
    name = backend.lower()
    solver = CVXPY_SOLVERS.get(name)
    if solver is None:
        raise SolverError(f"Неизвестный бэкенд '{backend}'")
    if solver not in installed:
        raise SolverError(f"Решатель {solver} не установлен; доступны: {installed}")
    return solver


def tolerance_kwargs(solver: str, tol: float) -> Dict[str, Any]:
    if solver == "CLARABEL":
        return {"tol_gap_abs": tol, "tol_gap_rel": tol, "tol_feas": tol}
    if solver == "SCS":
        return {"eps_abs": tol, "eps_rel": tol}
    if solver == "CVXOPT":
        return {"abstol": tol, "reltol": tol, "feastol": tol}
    return {}


def block_operator(block: AffineBlock, n_moments: int) -> sp.csr_matrix:
    """Матрица (m·m × n_y): vec_F(B(y)) = A y, обе половины блока заполнены."""
    m = block.dimension
    off = block.rows != block.cols
    rows = np.concatenate([block.rows, block.cols[off]])
    cols = np.concatenate([block.cols, block.rows[off]])
    flat = rows + cols * m  # порядок Fortran для cp.reshape(..., order="F")
    ids = np.concatenate([block.ids, block.ids[off]])
    vals = np.concatenate([block.vals, block.vals[off]])
    return sp.csr_matrix((vals, (flat, ids)), shape=(m * m, n_moments))


def psd_constraint(A: sp.spmatrix, const: np.ndarray, m: int, x):
    """cvxpy-ограничение reshape(A x + const) ⪰ 0 для симметричного по построению выражения."""
    import cvxpy as cp

    expr = cp.reshape(A @ x + const, (m, m), order="F")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return expr >> 0


def map_cvxpy_status(status: str) -> SdpStatus:
    import cvxpy as cp

    if status == cp.OPTIMAL:
        return SdpStatus.OPTIMAL
    if status == cp.OPTIMAL_INACCURATE:
        return SdpStatus.NEAR_OPTIMAL
    if status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
        return SdpStatus.INFEASIBLE
    if status in (cp.UNBOUNDED, cp.UNBOUNDED_INACCURATE):
        return SdpStatus.UNBOUNDED
    return SdpStatus.NUMERICAL_TROUBLE


# -----------------------------
# Бэкенд cvxpy
# -----------------------------

def _split(A: sp.csr_matrix) -> Tuple[sp.csr_matrix, np.ndarray]:
    A = A.tocsc()
    return A[:, 1:].tocsr(), np.asarray(A[:, 0].todense()).ravel()


def _solve_cvxpy(problem: SdpProblem, options: SolverOptions, solver: Optional[str] = None) -> SdpSolution:
    import cvxpy as cp

    solver = solver or pick_solver(options.backend)
    n_y = problem.n_moments
    x = cp.Variable(n_y - 1) if n_y > 1 else None
    constraints: List[Any] = []

    scalar = [b for b in problem.blocks if b.dimension == 1]
    matrix = [b for b in problem.blocks if b.dimension > 1]
    if scalar:
        A = sp.vstack([block_operator(b, n_y) for b in scalar]).tocsr()
        A_free, const = _split(A)
        if x is not None:
            constraints.append(A_free @ x + const >= 0)
        elif np.any(const < 0):
            return SdpSolution(None, float("nan"), SdpStatus.INFEASIBLE, SolverStats(solver))
    for b in matrix:
        A_free, const = _split(block_operator(b, n_y))
        if x is None:
            raise SolverError("Матричный блок без свободных переменных")
        constraints.append(psd_constraint(A_free, const, b.dimension, x))

    c = problem.objective
    objective = cp.Minimize(c[1:] @ x + c[0]) if x is not None else cp.Minimize(c[0])
    prob = cp.Problem(objective, constraints)

    kwargs = tolerance_kwargs(solver, options.tolerance)
    kwargs.update(options.solver_kwargs)
    t0 = time.perf_counter()
    try:
        prob.solve(solver=solver, verbose=options.verbose, **kwargs)
    except cp.error.SolverError as exc:
        log.warning("Решатель %s завершился с ошибкой: %s", solver, exc)
        return SdpSolution(None, float("nan"), SdpStatus.NUMERICAL_TROUBLE,
                           SolverStats(solver, wall_time=time.perf_counter() - t0))
    elapsed = time.perf_counter() - t0

    status = map_cvxpy_status(prob.status)
    y = None
    if status.usable:
        y = np.concatenate([[1.0], np.asarray(x.value).ravel()]) if x is not None else np.ones(1)
    stats = prob.solver_stats
    iters = getattr(stats, "num_iters", None) if stats is not None else None
    value = float(prob.value) if status.usable else float("nan")
    return SdpSolution(y, value, status, SolverStats(solver, iters, elapsed))


# -----------------------------
# Бэкенд csdp (внешний процесс)
# -----------------------------

_CSDP_STATUS = {
    0: SdpStatus.OPTIMAL,
    3: SdpStatus.NEAR_OPTIMAL,
    1: SdpStatus.UNBOUNDED,   # двойственная к нашей задача недопустима
    2: SdpStatus.INFEASIBLE,
}


def _solve_csdp(problem: SdpProblem, options: SolverOptions) -> SdpSolution:
    exe = shutil.which("csdp")
    if exe is None:
        raise SolverError("Исполняемый файл csdp не найден в PATH")
    with tempfile.TemporaryDirectory(prefix="frame_sdp_") as tmp:
        src = write_sdpa(problem, Path(tmp) / "problem.dat-s")
        out = Path(tmp) / "problem.sol"
        t0 = time.perf_counter()
        proc = subprocess.run(
            [exe, str(src), str(out)],
            capture_output=True, text=True, timeout=options.time_limit,
        )
        elapsed = time.perf_counter() - t0
        if options.verbose:
            log.info("csdp:\n%s", proc.stdout)
        status = _CSDP_STATUS.get(proc.returncode, SdpStatus.NUMERICAL_TROUBLE)
        y = None
        value = float("nan")
        if status.usable and out.is_file():
            x = read_sdpa_solution(out.read_text(encoding="utf-8"), problem.n_free)
            y = np.concatenate([[1.0], x])
            value = float(problem.objective @ y)
        elif status.usable:
            status = SdpStatus.NUMERICAL_TROUBLE
    return SdpSolution(y, value, status, SolverStats("CSDP", None, elapsed))


# -----------------------------
# Публичный API
# -----------------------------

_RETRY_STATUSES = (SdpStatus.NUMERICAL_TROUBLE, SdpStatus.UNBOUNDED)


def _solve_with_fallback(problem: SdpProblem, options: SolverOptions) -> SdpSolution:
    """Перебирает установленные решатели, пока статус — сбой или неограниченность."""
    candidates = auto_candidates()
    sol = None
    for solver in candidates:
        sol = _solve_cvxpy(problem, options, solver)
        if sol.status not in _RETRY_STATUSES:
            break
        log.warning("Решатель %s: %s, пробуем следующий", solver, sol.status.value)
    return sol


def solve(problem: SdpProblem, options: Optional[SolverOptions] = None) -> SdpSolution:
    """Решает релаксацию; статус сообщает о недопустимости и сбоях."""
    options = options or SolverOptions()
    if options.backend.lower() == "csdp":
        sol = _solve_csdp(problem, options)
    elif is_auto(options.backend):
        sol = _solve_with_fallback(problem, options)
    else:
        sol = _solve_cvxpy(problem, options)
    log.info("SDP r=%d: статус=%s, цель=%.6g, %.2f с (%s)", problem.order, sol.status.value,
             sol.objective, sol.stats.wall_time, sol.stats.solver)
    if sol.status == SdpStatus.NEAR_OPTIMAL:
        log.warning("Решение получено с пониженной точностью")
    return sol
