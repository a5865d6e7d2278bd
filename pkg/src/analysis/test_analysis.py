# -*- coding: utf-8 -*-
"""
test_analysis.py — собственные частоты, наихудшая нагрузка, соотношения
между ними и временные ряды.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from src.analysis.eigen import eigenpairs, generalized_eigenpairs
from src.analysis.histories import peak_times, save_history_csv, time_histories
from src.analysis.plotting import plot_design, plot_histories
from src.analysis.relations import verify_relations
from src.analysis.worst_case import pseudo_inverse_apply, worst_case
from src.conftest import loaded_l_frame
from src.constraints.lmi import LmiKind
from src.errors import AnalysisError, ResonanceError
from src.fem.assembly import assemble_pencil
from src.model.benchmarks import builtin_benchmark

OMEGA_TEN = 280.0 * math.pi


@pytest.fixture
def ten_dynamic():
    problem = builtin_benchmark("ten-segment", "dyn-compliance", consistent_load=True)
    return problem, assemble_pencil(problem)


# -----------------------------
# Псевдообратная
# -----------------------------

def test_pseudo_inverse_in_and_out_of_range():
    S = np.diag([2.0, 0.0, 4.0])
    res = pseudo_inverse_apply(S, np.array([1.0, 0.0, 2.0]))
    assert res.in_range
    np.testing.assert_allclose(res.value, [0.5, 0.0, 0.5])
    out = pseudo_inverse_apply(S, np.array([0.0, 1.0, 0.0]))
    assert not out.in_range
    assert out.residual == pytest.approx(1.0)


def test_pseudo_inverse_matrix_argument(rng):
    B = rng.normal(size=(4, 2))
    S = B @ B.T
    X = S @ rng.normal(size=(4, 3))
    res = pseudo_inverse_apply(S, X)
    assert res.in_range
    np.testing.assert_allclose(S @ res.value, X, atol=1e-9)


# -----------------------------
# Собственные частоты
# -----------------------------

def test_generalized_eigenpairs_with_massless_dofs():
    K = np.array([[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]])
    M = np.diag([1.0, 0.0, 1.0])
    res = generalized_eigenpairs(K, M)
    assert res.kernel_dim == 1
    # статическая конденсация средней степени свободы
    Kc = np.array([[1.5, -0.5], [-0.5, 0.5]])
    np.testing.assert_allclose(res.eigenvalues, np.linalg.eigvalsh(Kc), rtol=1e-12)
    for lam, w in zip(res.eigenvalues, res.eigenvectors.T):
        np.testing.assert_allclose(K @ w, lam * (M @ w), atol=1e-12)
        assert float(w @ M @ w) == pytest.approx(1.0)


def test_eigen_errors(ten_segment):
    pencil = assemble_pencil(ten_segment)
    with pytest.raises(AnalysisError):
        eigenpairs(pencil, np.zeros(10))
    with pytest.raises(AnalysisError):
        generalized_eigenpairs(np.eye(2), np.zeros((2, 2)))


def test_ten_segment_optimum_frequency(ten_segment, ten_optimum):
    res = eigenpairs(assemble_pencil(ten_segment), ten_optimum)
    assert res.frequencies_hz[0] == pytest.approx(140.0, rel=5e-3)
    assert np.all(np.diff(res.eigenvalues) >= 0)


def test_twelve_segment_frequencies(twelve_segment, twelve_optimum):
    with_mass = eigenpairs(assemble_pencil(twelve_segment), twelve_optimum, k=3)
    np.testing.assert_allclose(with_mass.frequencies_hz, [30.0, 126.7, 256.1], rtol=5e-3)
    bare = eigenpairs(assemble_pencil(twelve_segment.without_masses()), twelve_optimum, k=2)
    np.testing.assert_allclose(bare.frequencies_hz, [63.74, 179.69], rtol=5e-3)


def test_twelve_segment_mesh_convergence(twelve_segment, twelve_optimum):
    coarse = eigenpairs(assemble_pencil(twelve_segment), twelve_optimum, k=3)
    fine = eigenpairs(assemble_pencil(twelve_segment.with_mesh(12)), twelve_optimum, k=3)
    np.testing.assert_allclose(fine.frequencies_hz, coarse.frequencies_hz, rtol=1e-3)


# -----------------------------
# Наихудшая нагрузка
# -----------------------------

def test_worst_case_on_ten_segment_optimum(ten_dynamic, ten_optimum):
    problem, pencil = ten_dynamic
    report = worst_case(pencil, ten_optimum, problem.load, threshold=problem.thresholds.dbar)
    assert report.kind == LmiKind.DYN_COMPLIANCE
    assert report.d_R == pytest.approx(1.29236e-6, rel=1e-2)
    assert report.p_R == pytest.approx(5.68411e-4, rel=1e-2)
    assert report.utilization == pytest.approx(1.0, rel=1e-2)
    assert [n.node for n in report.nodal] == [1, 5]

    def matches(nodal, target):
        angles = (nodal.angle_x_deg, 180.0 - nodal.angle_x_deg, nodal.angle_down_deg, 180.0 - nodal.angle_down_deg)
        return any(abs(v - target) <= 0.5 for v in angles)

    assert any(matches(n, 74.98) for n in report.nodal)
    assert any(matches(n, 100.21) for n in report.nodal)
    small, large = sorted(n.magnitude for n in report.nodal)
    assert small / large == pytest.approx(41.617 / 90.929, rel=1e-2)
    assert sum(n.fraction ** 2 for n in report.nodal) == pytest.approx(1.0)


def test_worst_case_bounds_every_unit_load(ten_dynamic, ten_optimum, rng):
    problem, pencil = ten_dynamic
    report = worst_case(pencil, ten_optimum, problem.load)
    A = report.gram
    e = rng.normal(size=(1000, A.shape[0]))
    e /= np.linalg.norm(e, axis=1, keepdims=True)
    quotients = np.einsum("ki,ij,kj->k", e, A, e)
    assert np.all(quotients <= report.d_R + 1e-10)
    assert float(report.r_q @ A @ report.r_q) == pytest.approx(report.d_R, rel=1e-12)


def test_peak_power_report_uses_power_threshold():
    problem = builtin_benchmark("ten-segment", "peak-power", consistent_load=True)
    pencil = assemble_pencil(problem)
    a = np.full(10, 5e-3)
    report = worst_case(pencil, a, problem.load, kind="PeakPower", threshold=problem.thresholds.pbar)
    assert report.utilization == pytest.approx(report.p_R / problem.thresholds.pbar)
    assert report.p_R == pytest.approx(OMEGA_TEN * report.d_R / 2)


def test_resonant_design_rejected(ten_dynamic, ten_optimum):
    problem, pencil = ten_dynamic
    with pytest.raises(ResonanceError):
        worst_case(pencil, ten_optimum, problem.load.with_omega(2 * math.pi * 1e5))


def test_static_limit():
    problem = loaded_l_frame(omega=0.3)
    pencil = assemble_pencil(problem)
    a = np.array([0.5, 0.5])
    report = worst_case(pencil, a, problem.load.with_omega(0.0), kind=LmiKind.STATIC_COMPLIANCE)
    K = pencil.stiffness.evaluate(a)
    from src.fem.assembly import load_matrix

    Q = load_matrix(pencil.dof_map, problem.load)
    expected = np.linalg.eigvalsh(Q.T @ np.linalg.solve(K, Q))[-1]
    assert report.d_R == pytest.approx(expected, rel=1e-10)
    assert report.p_R == 0.0
    np.testing.assert_allclose(report.v_R, 0.0)


def test_multiplicity_reported():
    problem = loaded_l_frame(omega=0.0)
    pencil = assemble_pencil(problem)
    report = worst_case(pencil, np.array([0.5, 0.5]), problem.load)
    assert report.multiplicity >= 1
    assert report.gram_eigenvalues[0] == pytest.approx(report.d_R)


# -----------------------------
# Соотношения
# -----------------------------

def test_relations_on_ten_segment_optimum(ten_dynamic, ten_optimum):
    problem, pencil = ten_dynamic
    report = worst_case(pencil, ten_optimum, problem.load)
    residuals = verify_relations(pencil, ten_optimum, problem.load, report)
    assert residuals.max() <= 1e-6


def test_relations_on_small_frame(rng):
    problem = loaded_l_frame(omega=0.3)
    pencil = assemble_pencil(problem)
    for _ in range(5):
        a = rng.uniform(0.3, 1.0, 2)
        report = worst_case(pencil, a, problem.load)
        assert verify_relations(pencil, a, problem.load, report).max() <= 1e-6


def test_relations_vanish_in_static_case():
    problem = loaded_l_frame(omega=0.3)
    pencil = assemble_pencil(problem)
    load = problem.load.with_omega(0.0)
    report = worst_case(pencil, [0.5, 0.5], load)
    assert verify_relations(pencil, [0.5, 0.5], load, report).max() == 0.0


# -----------------------------
# Временные ряды
# -----------------------------

def test_peak_times_cosine_phase():
    t_d, t_p = peak_times(OMEGA_TEN, 1.0, 0.0)
    assert t_d == pytest.approx(0.0)
    assert t_p == pytest.approx(1.0 / 1120.0)


@pytest.mark.parametrize("c1,c2", [(1.0, 0.0), (0.6, 0.8), (0.0, -1.0), (-0.8, 0.6)])
def test_histories_reach_peaks(ten_dynamic, ten_optimum, c1, c2):
    problem, pencil = ten_dynamic
    report = worst_case(pencil, ten_optimum, problem.load)
    series = time_histories(report, c1=c1, c2=c2, n_samples=4001)
    w = report.omega
    d_at = report.d_R * (c1 * math.cos(w * series.t_d) + c2 * math.sin(w * series.t_d)) ** 2
    p_at = report.p_R * ((c2 ** 2 - c1 ** 2) * math.sin(2 * w * series.t_p) + 2 * c1 * c2 * math.cos(2 * w * series.t_p))
    assert d_at == pytest.approx(series.d_peak, rel=1e-9)
    assert abs(p_at) == pytest.approx(series.p_peak, rel=1e-9)
    assert series.d.max() <= series.d_peak * (1 + 1e-12)
    assert np.abs(series.p).max() <= series.p_peak * (1 + 1e-12)
    assert 0.0 <= series.t_d < math.pi / w
    assert 0.0 <= series.t_p < math.pi / (2 * w)
    assert series.d_peak == pytest.approx(1.29236e-6, rel=1e-2)
    assert series.p_peak == pytest.approx(5.68411e-4, rel=1e-2)


def test_histories_reject_unnormalized_phase(ten_dynamic, ten_optimum):
    problem, pencil = ten_dynamic
    report = worst_case(pencil, ten_optimum, problem.load)
    with pytest.raises(ValueError, match="phase not normalized"):
        time_histories(report, c1=1.0, c2=1.0)


def test_history_outputs(tmp_path, ten_dynamic, ten_optimum):
    problem, pencil = ten_dynamic
    report = worst_case(pencil, ten_optimum, problem.load)
    series = time_histories(report, n_samples=200)
    save_history_csv(series, tmp_path / "history.csv")
    header = (tmp_path / "history.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header == "t,d,p"
    assert plot_histories(series, tmp_path / "history.png").stat().st_size > 0
    assert plot_design(problem, ten_optimum, tmp_path / "design.png").stat().st_size > 0
