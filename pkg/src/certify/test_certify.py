# -*- coding: utf-8 -*-
"""
test_certify.py — допустимость и масштабирование, локальное уточнение,
цикл оценок и отчёты.
"""

from __future__ import annotations

import json

import numpy as np
import pytest
from scipy.optimize import brentq

from src.certify import loop as loop_module
from src.certify.feasibility import (
    build_design,
    check_feasible,
    initial_feasible,
    kernel_obstruction,
    midpoint_seed,
    scale_to_feasible,
)
from src.certify.loop import Certificate, CertifyOptions, OrderRecord, Verdict, certify_loop, relative_gap
from src.certify.refine import local_refine
from src.certify.report import certificate_to_dict, design_rows, format_table, history_frame, save_json
from src.conftest import TWELVE_HEIGHTS_MM, cantilever, l_frame
from src.errors import InfeasibleScalingError
from src.model.benchmarks import builtin_benchmark
from src.model.types import FrameProblem
from src.sdpsolve.solution import SdpSolution, SdpStatus, SolverStats

# -----------------------------
# Допустимость и масштабирование
# -----------------------------


def test_check_feasible_reports_margins(ten_segment, ten_optimum):
    design = build_design(ten_segment)
    ok = check_feasible(design, ten_optimum * 1.01)
    assert ok.feasible
    assert len(ok.margins) == 1
    bad = check_feasible(design, ten_optimum * 0.9)
    assert not bad.feasible
    assert bad.margin < 0


def test_feasible_seed_is_kept():
    design = build_design(cantilever())
    delta, a = scale_to_feasible(design, [1.0])
    assert delta == 1.0
    np.testing.assert_allclose(a, [1.0])


def test_scaling_matches_root_of_smallest_eigenvalue():
    design = build_design(cantilever())
    lmi = design.lmis[0]
    a_tilde = np.array([0.01])
    delta, a = scale_to_feasible(design, a_tilde)

    def smallest(d: float) -> float:
        return float(np.linalg.eigvalsh(lmi.evaluate(d * a_tilde))[0])

    root = brentq(smallest, 1.0, 1e3, xtol=1e-14)
    assert delta == pytest.approx(root, rel=1e-3)
    assert delta <= root * (1 + 1e-6)
    assert check_feasible(design, a).feasible


def test_zero_design_cannot_be_scaled():
    design = build_design(cantilever())
    with pytest.raises(InfeasibleScalingError):
        scale_to_feasible(design, [0.0])


def test_mass_on_unsupported_node_is_reported():
    base = cantilever()
    problem = FrameProblem(
        nodes=base.nodes + ((2.0, 0.0),),
        segments=base.segments,
        materials=base.materials,
        sections=base.sections,
        supports=base.supports,
        masses={2: 1.0},
        thresholds=base.thresholds,
    )
    design = build_design(problem)
    assert kernel_obstruction(design) is not None
    with pytest.raises(InfeasibleScalingError):
        scale_to_feasible(design, [0.1])


def test_initial_feasible_point():
    design = build_design(l_frame())
    a0, wbar = initial_feasible(design)
    assert check_feasible(design, a0).feasible
    assert wbar == pytest.approx(design.weight(a0))
    assert not check_feasible(design, a0 * 0.99).feasible


def test_initial_seed_is_box_midpoint(ten_segment):
    design = build_design(ten_segment)
    seed = midpoint_seed(design, 2.0)
    np.testing.assert_allclose(design.pencil.weights * seed, 1.0, rtol=1e-12)
    a0, wbar = initial_feasible(design)
    shares = design.pencil.weights * a0
    np.testing.assert_allclose(shares, shares[0], rtol=1e-9)
    assert check_feasible(design, a0).feasible
    assert wbar == pytest.approx(shares.sum())


def test_tangent_model_is_inner_approximation(ten_segment, ten_optimum, rng):
    design = build_design(ten_segment)
    lmi = design.lmis[0]
    a0 = ten_optimum + 1e-4
    c0, lin = lmi.matrix.tangent(a0)
    for _ in range(10):
        a = rng.uniform(0.0, 2e-2, 10)
        L = c0.toarray() + sum(v * C.toarray() for v, C in zip(a, lin))
        gap = lmi.evaluate(a) - L
        assert np.linalg.eigvalsh(gap)[0] >= -1e-9 * np.abs(gap).max()


# -----------------------------
# Локальное уточнение
# -----------------------------

def test_local_refine_never_increases_weight():
    pytest.importorskip("cvxpy")
    design = build_design(l_frame())
    start = np.array([0.8, 0.8])
    assert check_feasible(design, start).feasible
    result = local_refine(design, start, max_iter=20)
    assert result.weight <= design.weight(start) + 1e-12
    assert all(b <= a + 1e-12 for a, b in zip(result.weights, result.weights[1:]))
    assert check_feasible(design, result.design).feasible


# -----------------------------
# Цикл оценок
# -----------------------------

def test_relative_gap():
    assert relative_gap(110.0, 100.0) == pytest.approx(0.1)
    assert relative_gap(1.0, 0.0) == float("inf")


def test_loop_argument_checks():
    with pytest.raises(ValueError):
        certify_loop(cantilever(), eps=0.0)
    with pytest.raises(ValueError):
        certify_loop(builtin_benchmark("twelve-segment"), r_max=1)


def test_loop_stops_when_budget_is_empty():
    cert = certify_loop(cantilever(), options=CertifyOptions(solve_budget=0))
    assert cert.verdict == Verdict.GAP_REMAINING
    assert cert.history == []
    assert cert.best_weight == pytest.approx(cert.initial_weight)


def test_unusable_status_gives_failed(monkeypatch):
    def broken(problem, options=None):
        return SdpSolution(None, float("nan"), SdpStatus.NUMERICAL_TROUBLE, SolverStats("stub"))

    monkeypatch.setattr(loop_module, "solve", broken)
    cert = certify_loop(l_frame(), eps=0.01, r_max=2)
    assert cert.verdict == Verdict.FAILED
    assert cert.history[-1].status == "NumericalTrouble"
    assert cert.solver_failure
    assert check_feasible(build_design(l_frame()), cert.best_design).feasible


def test_infeasible_relaxation_certifies_incumbent(monkeypatch):
    orders = []

    def infeasible(problem, options=None):
        orders.append(problem.order)
        return SdpSolution(None, float("nan"), SdpStatus.INFEASIBLE, SolverStats("stub"))

    monkeypatch.setattr(loop_module, "solve", infeasible)
    cert = certify_loop(cantilever(), eps=1e-6, r_max=2)
    assert cert.verdict == Verdict.GLOBALLY_EPS_OPTIMAL
    assert cert.lower_bound == cert.best_weight
    assert cert.gap == 0.0
    assert orders == [1, 1]
    assert cert.history[0].solves == 2
    assert cert.history[0].status == "Infeasible"
    assert not cert.solver_failure


def test_toy_certificate():
    pytest.importorskip("cvxpy")
    seen = []
    options = CertifyOptions(eps=10.0, r_max=2, on_record=seen.append)
    cert = certify_loop(cantilever(), options=options)
    assert cert.verdict == Verdict.GLOBALLY_EPS_OPTIMAL
    assert 0 < cert.lower_bound <= cert.best_weight * (1 + 1e-6)
    assert cert.best_weight <= cert.initial_weight + 1e-12
    assert seen and seen[-1].order == cert.history[-1].order


# -----------------------------
# Отчёты
# -----------------------------

def test_design_rows_heights(twelve_segment, twelve_optimum):
    design = build_design(twelve_segment)
    rows = design_rows(twelve_segment, design.pencil, twelve_optimum)
    assert [r["segments"] for r in rows[:2]] == [[1, 9], [2, 10]]
    np.testing.assert_allclose([r["height_mm"] for r in rows], TWELVE_HEIGHTS_MM, rtol=1e-12)


def test_certificate_serialization(tmp_path):
    cert = certify_loop(cantilever(), options=CertifyOptions(solve_budget=0))
    problem = cantilever()
    design = build_design(problem)
    doc = certificate_to_dict(cert, problem, design.pencil, {"finished_at": "now"})
    path = tmp_path / "certificate.json"
    save_json(doc, path)
    loaded = json.loads(path.read_text(encoding="utf-8"))
    assert loaded["verdict"] == "GapRemaining"
    assert loaded["lower_bound_kg"] is None
    assert loaded["design"][0]["var"] == 1
    assert list(history_frame(cert).columns) == ["r", "lb", "ub", "eps_R", "n_c x m", "n"]
    assert list(history_frame(cert, timed=True).columns)[-1] == "t"
    assert "verdict: GapRemaining" in format_table(cert)


def test_timings_live_only_in_meta():
    record = OrderRecord(order=1, lower_bound=1.0, upper_bound=1.5, gap=0.5, block_summary="1x2",
                         n_moments=3, seconds=12.5, solves=1, status="Optimal")
    cert = Certificate([record], np.array([0.5]), 1.5, 2.0, 0.01, Verdict.GAP_REMAINING)
    problem = cantilever()
    doc = certificate_to_dict(cert, problem, build_design(problem).pencil)
    assert "seconds" not in doc["history"][0]
    assert doc["meta"]["timings"] == [{"r": 1, "seconds": 12.5}]
    assert "12.50" not in format_table(cert)
    assert "12.50" in format_table(cert, timed=True)


# -----------------------------
# Воспроизведение эталонных задач (долго)
# -----------------------------

TEN_LOWER = {1: 33.978, 2: 81.849, 3: 148.106}


@pytest.mark.slow
def test_ten_segment_certificate(ten_optimum):
    pytest.importorskip("cvxpy")
    cert = certify_loop(builtin_benchmark("ten-segment"), options=CertifyOptions(eps=1e-9, r_max=3))
    for record in cert.history:
        assert record.lower_bound == pytest.approx(TEN_LOWER[record.order], rel=1e-2)
        assert record.upper_bound == pytest.approx(148.442, rel=5e-3)
    assert [r.block_summary for r in cert.history] == ["11x1, 1x11, 1x42", "11x11, 1x21, 1x462",
                                                       "11x21, 1x31, 1x882"]
    assert cert.gap <= 5e-3
    a = cert.best_design * 1e4
    for k, target in enumerate(ten_optimum * 1e4):
        if target > 0:
            assert a[k] == pytest.approx(target, rel=2e-2)
        else:
            assert a[k] < 0.5


@pytest.mark.slow
def test_twelve_segment_certificate():
    pytest.importorskip("cvxpy")
    cert = certify_loop(builtin_benchmark("twelve-segment"), options=CertifyOptions(eps=1e-9, r_max=3))
    by_order = {r.order: r for r in cert.history}
    assert by_order[2].lower_bound * 1e3 == pytest.approx(1.18, rel=2e-2)
    assert by_order[3].lower_bound * 1e3 == pytest.approx(9.07, rel=2e-2)
    assert cert.best_weight * 1e3 == pytest.approx(17.04, rel=1e-2)
    heights = cert.best_design / 0.02 * 1e3
    np.testing.assert_allclose(heights, TWELVE_HEIGHTS_MM, rtol=2e-2)


@pytest.mark.slow
def test_thirty_five_segment_first_order():
    pytest.importorskip("cvxpy")
    cert = certify_loop(builtin_benchmark("thirty-five-segment"), options=CertifyOptions(eps=1e-9, r_max=1))
    assert cert.history[0].lower_bound == pytest.approx(28.02, rel=2e-2)
    assert cert.best_weight <= 87.5


@pytest.mark.slow
@pytest.mark.parametrize("variant", ["dyn-compliance", "peak-power"])
def test_bordered_forms_reproduce_free_vibration_bounds(variant):
    pytest.importorskip("cvxpy")
    options = CertifyOptions(eps=1e-9, r_max=3, refine_iterations=0)
    fv = certify_loop(builtin_benchmark("ten-segment"), options=options)
    other = certify_loop(builtin_benchmark("ten-segment", variant, consistent_load=True),
                         options=CertifyOptions(eps=1e-9, r_max=3, refine_iterations=0))
    assert [h.order for h in other.history] == [h.order for h in fv.history] == [1, 2, 3]
    for a, b in zip(fv.history, other.history):
        assert b.lower_bound == pytest.approx(a.lower_bound, rel=5e-3)
