# -*- coding: utf-8 -*-
"""
refine.py — локальное улучшение верхней оценки последовательностью
линейных SDP.

На итерации чистые степени a_v^k (k >= 2) в каждом G(a) заменяются
касательной в текущей точке. Коэффициенты при них положительно
полуопределены, касательная не превосходит a_v^k при a >= 0, поэтому
L(a) ⪯ G(a) и решение подзадачи допустимо для исходной задачи.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import scipy.sparse as sp

from src.certify.feasibility import (
    FEASIBILITY_TOL,
    DesignProblem,
    check_feasible,
    scale_to_feasible,
)
from src.constraints.lmi import PolyLmi
from src.errors import FrameSdpError
from src.sdpsolve.backend import (
    SolverOptions,
    map_cvxpy_status,
    pick_solver,
    psd_constraint,
    tolerance_kwargs,
)

log = logging.getLogger(__name__)

MOVE_FRACTION = 0.5
MOVE_FLOOR = 0.05


@dataclass
class RefineResult:
    design: np.ndarray
    weight: float
    iterations: int
    weights: List[float] = field(default_factory=list)
    converged: bool = False


def linearized_operator(lmi: PolyLmi, a0: np.ndarray, scale: float):
    """
    (A, c, m): vec_F(L(σx)) = A x + c для касательной модели в a0,
    с масштабированием Якоби D L D.
    """
    c0, lin = lmi.matrix.tangent(a0)
    m = lmi.dimension
    diag = np.abs(c0.diagonal()) + sum(np.abs(C.diagonal()) * scale for C in lin)
    d = np.ones(m)
    pos = diag > 0
    d[pos] = 1.0 / np.sqrt(diag[pos])
    D = sp.diags(d)
    const = (D @ c0 @ D).toarray().ravel(order="F")
    cols = [sp.csr_matrix((D @ C @ D).toarray().reshape(-1, 1, order="F")) * scale for C in lin]
    A = sp.hstack(cols).tocsr()
    return A, const, m


def _subproblem(design: DesignProblem, a0: np.ndarray, options: SolverOptions) -> Optional[np.ndarray]:
    import cvxpy as cp

    scale = float(np.max(a0))
    n = design.n_vars
    x = cp.Variable(n)
    x0 = a0 / scale
    limit = np.maximum(MOVE_FRACTION * x0, MOVE_FLOOR * float(np.max(x0)))
    constraints = [x >= 0, x - x0 <= limit, x0 - x <= limit]
    for lmi in design.lmis:
        A, const, m = linearized_operator(lmi, a0, scale)
        if m == 1:
            constraints.append(A @ x + const >= 0)
        else:
            constraints.append(psd_constraint(A, const, m, x))
    objective = cp.Minimize((design.pencil.weights * scale) @ x)
    prob = cp.Problem(objective, constraints)
    solver = pick_solver(options.backend if options.backend != "csdp" else "auto")
    kwargs = tolerance_kwargs(solver, options.tolerance)
    kwargs.update(options.solver_kwargs)
    try:
        prob.solve(solver=solver, verbose=False, **kwargs)
    except cp.error.SolverError as exc:
        log.warning("Подзадача уточнения не решена: %s", exc)
        return None
    if not map_cvxpy_status(prob.status).usable or x.value is None:
        log.warning("Подзадача уточнения: статус %s", prob.status)
        return None
    return np.maximum(np.asarray(x.value).ravel(), 0.0) * scale


def local_refine(
    design: DesignProblem,
    a_start,
    *,
    max_iter: int = 100,
    rel_tol: float = 1e-8,
    options: Optional[SolverOptions] = None,
    feas_tol: float = FEASIBILITY_TOL,
) -> RefineResult:
    """Вес не возрастает; результат проверен на допустимость."""
    options = options or SolverOptions()
    best = np.asarray(a_start, dtype=float).copy()
    best_w = design.weight(best)
    history = [best_w]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        cand = _subproblem(design, best, options)
        if cand is None:
            break
        if not check_feasible(design, cand, feas_tol).feasible:
            try:
                _, cand = scale_to_feasible(design, cand, feas_tol)
            except FrameSdpError as exc:
                log.warning("Итерация %d: масштабирование не удалось (%s)", it, exc)
                break
        w = design.weight(cand)
        if w > best_w:
            log.debug("Итерация %d: вес %.10g не меньше текущего %.10g", it, w, best_w)
            converged = True
            break
        decrease = (best_w - w) / best_w
        assert w <= best_w
        best, best_w = cand, w
        history.append(w)
        log.debug("Итерация %d: вес %.10g (снижение %.3e)", it, w, decrease)
        if decrease < rel_tol:
            converged = True
            break
    log.info("Локальное уточнение: %d итераций, вес %.6g кг", it, best_w)
    return RefineResult(best, best_w, it, history, converged)
