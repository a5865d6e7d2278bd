# -*- coding: utf-8 -*-
"""
loop.py — глобальный цикл оценок.

Схема: допустимая точка -> релаксация порядка r -> масштабирование
моментов первого порядка -> локальное уточнение -> если найдена лучшая
верхняя оценка, ужесточить компактификацию и повторить на том же r,
иначе проверить относительный зазор и перейти к r + 1.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Sequence

import numpy as np

from src.certify.feasibility import (
    FEASIBILITY_TOL,
    DesignProblem,
    build_design,
    check_feasible,
    initial_feasible,
    scale_to_feasible,
)
from src.certify.refine import local_refine
from src.constraints.lmi import compactification_lmis
from src.errors import FrameSdpError
from src.model.types import FrameProblem
from src.relaxation.basis import BasisKind
from src.relaxation.builder import build_relaxation
from src.sdpsolve.backend import SolverOptions, solve
from src.sdpsolve.solution import SdpStatus, extract_first_moments

log = logging.getLogger(__name__)

IMPROVEMENT_TOL = 1e-6
CAP_SLACK = 1e-4   # относительное ослабление w̄ при недопустимой релаксации


class Verdict(str, Enum):
    GLOBALLY_EPS_OPTIMAL = "GloballyEpsOptimal"
    GAP_REMAINING = "GapRemaining"
    FAILED = "Failed"


@dataclass
class CertifyOptions:
    eps: float = 1e-2
    r_min: Optional[int] = None
    r_max: int = 3
    max_tightenings: int = 5
    time_budget: Optional[float] = None   # с
    solve_budget: Optional[int] = None
    refine_iterations: int = 100
    refine_tol: float = 1e-8
    feasibility_tol: float = FEASIBILITY_TOL
    basis: BasisKind = BasisKind.NMT
    scale_variables: bool = True
    block_scaling: bool = True
    seed: Optional[Sequence[float]] = None
    solver: SolverOptions = field(default_factory=SolverOptions)
    on_record: Optional[Callable[["OrderRecord"], None]] = None   # вызывается после каждой записи истории


@dataclass
class OrderRecord:
    order: int
    lower_bound: float
    upper_bound: float
    gap: float
    block_summary: str
    n_moments: int
    seconds: float
    solves: int
    status: str


@dataclass
class Certificate:
    history: List[OrderRecord]
    best_design: np.ndarray
    best_weight: float
    initial_weight: float
    eps: float
    verdict: Verdict
    message: str = ""

    @property
    def lower_bound(self) -> float:
        return max((h.lower_bound for h in self.history), default=float("nan"))

    @property
    def gap(self) -> float:
        return relative_gap(self.best_weight, self.lower_bound)

    @property
    def solver_failure(self) -> bool:
        """Вердикт Failed вызван статусом решателя."""
        return self.verdict == Verdict.FAILED and bool(self.history) and self.history[-1].status in (
            SdpStatus.NUMERICAL_TROUBLE.value, SdpStatus.UNBOUNDED.value)


def relative_gap(upper: float, lower: float) -> float:
    """ε_R = (ŵ − w̲)/w̲."""
    if not lower > 0:
        return float("inf")
    return (upper - lower) / lower


def certify_loop(
    problem: FrameProblem | DesignProblem,
    eps: Optional[float] = None,
    r_max: Optional[int] = None,
    options: Optional[CertifyOptions] = None,
) -> Certificate:
    opts = options or CertifyOptions()
    if eps is not None:
        opts.eps = eps
    if r_max is not None:
        opts.r_max = r_max
    if not opts.eps > 0:
        raise ValueError(f"ε должно быть > 0, получено {opts.eps}")

    design = problem if isinstance(problem, DesignProblem) else build_design(problem)
    r = max(opts.r_min or 1, design.r_min)
    if opts.r_max < r:
        raise ValueError(f"r_max={opts.r_max} меньше r_min={r}")

    t_start = time.perf_counter()
    best, best_w = initial_feasible(design, opts.seed, opts.feasibility_tol)
    initial_w = best_w
    history: List[OrderRecord] = []
    solves = 0

    def budget_left() -> bool:
        if opts.time_budget is not None and time.perf_counter() - t_start > opts.time_budget:
            return False
        return opts.solve_budget is None or solves < opts.solve_budget

    def finish(verdict: Verdict, message: str) -> Certificate:
        log.info("Вердикт: %s (%s)", verdict.value, message)
        return Certificate(history, best, best_w, initial_w, opts.eps, verdict, message)

    def relax(cap: float):
        lmis = compactification_lmis(design.pencil, cap) + list(design.lmis)
        u = cap / design.pencil.weights if opts.scale_variables else None
        sdp = build_relaxation(design.pencil, lmis, r, basis=opts.basis,
                               variable_scale=u, block_scaling=opts.block_scaling)
        return sdp, solve(sdp, opts.solver)

    while r <= opts.r_max:
        tightenings = 0
        t_order = time.perf_counter()
        order_solves = 0
        lb = float("-inf")
        while True:
            if not budget_left():
                return finish(Verdict.GAP_REMAINING, "бюджет исчерпан")
            sdp, sol = relax(best_w)
            solves += 1
            order_solves += 1
            if sol.status == SdpStatus.INFEASIBLE:
                # при w̄ = ŵ допустимое множество может выродиться в точку
                log.warning("r=%d: релаксация недопустима при w̄=%.6g кг, граница ослаблена", r, best_w)
                sdp, sol = relax(best_w * (1.0 + CAP_SLACK))
                solves += 1
                order_solves += 1

            if sol.status == SdpStatus.INFEASIBLE:
                # релаксация содержит все проекты легче w̄(1 + slack), значит их нет
                lb = max(lb, best_w)
            elif not sol.status.usable:
                history.append(OrderRecord(r, float("nan"), best_w, float("nan"), sdp.block_summary(),
                                           sdp.n_free, time.perf_counter() - t_order, order_solves,
                                           sol.status.value))
                return finish(Verdict.FAILED, f"релаксация r={r}: {sol.status.value}")
            else:
                lb = max(lb, min(float(sol.objective), best_w))

            improved = False
            if sol.status.usable:
                a_tilde = extract_first_moments(sol, sdp.indexer, design.n_vars, sdp.variable_scale)
                if np.any(a_tilde > 0):
                    try:
                        _, a_ub = scale_to_feasible(design, a_tilde, opts.feasibility_tol)
                        refined = local_refine(design, a_ub, max_iter=opts.refine_iterations,
                                               rel_tol=opts.refine_tol, options=opts.solver,
                                               feas_tol=opts.feasibility_tol)
                        if refined.weight < best_w * (1.0 - IMPROVEMENT_TOL):
                            best, best_w = refined.design, refined.weight
                            improved = True
                    except FrameSdpError as exc:
                        log.warning("Верхняя оценка на r=%d не получена: %s", r, exc)

            record = OrderRecord(r, lb, best_w, relative_gap(best_w, lb), sdp.block_summary(),
                                 sdp.n_free, time.perf_counter() - t_order, order_solves, sol.status.value)
            if history and history[-1].order == r:
                history[-1] = record
            else:
                history.append(record)
            log.info("r=%d: w̲=%.6g, ŵ=%.6g, ε_R=%.3e", r, lb, best_w, record.gap)
            if opts.on_record is not None:
                opts.on_record(record)

            if improved and tightenings < opts.max_tightenings:
                tightenings += 1
                log.info("Ужесточение компактификации: w̄=%.6g кг", best_w)
                continue
            if record.gap <= opts.eps:
                return finish(Verdict.GLOBALLY_EPS_OPTIMAL, f"ε_R={record.gap:.3e} на r={r}")
            break
        r += 1

    assert check_feasible(design, best, opts.feasibility_tol).feasible
    return finish(Verdict.GAP_REMAINING, f"зазор не закрыт до r={opts.r_max}")
