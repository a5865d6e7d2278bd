# -*- coding: utf-8 -*-
"""
test_constraints.py — семейства матричных неравенств и переходы между ними.
"""

from __future__ import annotations

import numpy as np
import pytest

from src.conftest import cantilever, l_frame, loaded_l_frame
from src.constraints.equivalence import factor_psd, from_pencil_to_bordered, to_augmented_pencil
from src.constraints.lmi import (
    LmiKind,
    compactification_lmis,
    free_vibration_lmi,
    minimal_order_of,
    problem_lmis,
    robust_dyn_compliance_lmi,
    robust_peak_power_lmi,
    robust_static_compliance_lmi,
    static_compliance_lmi,
)
from src.errors import ConstraintError
from src.fem.assembly import assemble_pencil, load_matrix
from src.model.benchmarks import builtin_benchmark
from src.model.types import Thresholds


def _psd(A: np.ndarray, tol: float = 1e-9) -> bool:
    A = 0.5 * (A + A.T)
    return float(np.linalg.eigvalsh(A)[0]) >= -tol * max(1.0, float(np.abs(A).max()))


def _worst_response(K: np.ndarray, M: np.ndarray, Q: np.ndarray, omega: float) -> float:
    S = K - omega ** 2 * M
    return float(np.linalg.eigvalsh(Q.T @ np.linalg.solve(S, Q))[-1])


def test_free_vibration_block():
    pencil = assemble_pencil(cantilever())
    lmi = free_vibration_lmi(pencil, 0.5)
    a = [0.2]
    np.testing.assert_allclose(lmi.evaluate(a), pencil.stiffness.evaluate(a) - 0.5 * pencil.mass.evaluate(a))
    assert lmi.degree == 2
    with pytest.raises(ConstraintError):
        free_vibration_lmi(pencil, -1.0)


def test_static_compliance_schur(rng):
    pencil = assemble_pencil(cantilever())
    f = np.array([0.0, 1.0, 0.0])
    for _ in range(20):
        a = rng.uniform(0.05, 1.0, 1)
        K = pencil.stiffness.evaluate(a)
        c = float(f @ np.linalg.solve(K, f))
        assert _psd(static_compliance_lmi(pencil, f, c * 1.001).evaluate(a))
        assert not _psd(static_compliance_lmi(pencil, f, c * 0.99).evaluate(a), tol=1e-12)


def test_static_compliance_needs_single_load():
    pencil = assemble_pencil(cantilever())
    with pytest.raises(ConstraintError):
        static_compliance_lmi(pencil, np.eye(3)[:, :2], 1.0)
    with pytest.raises(ConstraintError):
        static_compliance_lmi(pencil, np.ones(3), 0.0)


def test_robust_dyn_compliance_schur(rng):
    problem = loaded_l_frame(omega=0.3)
    pencil = assemble_pencil(problem)
    Q = load_matrix(pencil.dof_map, problem.load)
    for _ in range(10):
        a = rng.uniform(0.2, 1.0, 2)
        K, M = pencil.stiffness.evaluate(a), pencil.mass.evaluate(a)
        if np.linalg.eigvalsh(K - 0.09 * M)[0] <= 0:
            continue
        d = _worst_response(K, M, Q, 0.3)
        assert _psd(robust_dyn_compliance_lmi(pencil, Q, 0.3, d * 1.001).evaluate(a))
        assert not _psd(robust_dyn_compliance_lmi(pencil, Q, 0.3, d * 0.99).evaluate(a), tol=1e-12)


def test_power_and_compliance_blocks_coincide():
    problem = loaded_l_frame(omega=0.3)
    pencil = assemble_pencil(problem)
    Q = load_matrix(pencil.dof_map, problem.load)
    dbar = 4.0
    pbar = 0.3 * dbar / 2.0
    a = [0.5, 0.6]
    dyn = robust_dyn_compliance_lmi(pencil, Q, 0.3, dbar)
    power = robust_peak_power_lmi(pencil, Q, 0.3, pbar)
    np.testing.assert_allclose(dyn.evaluate(a), power.evaluate(a))
    assert power.corner_value == pytest.approx(dbar)


def test_power_needs_positive_omega():
    problem = loaded_l_frame(omega=0.3)
    pencil = assemble_pencil(problem)
    Q = load_matrix(pencil.dof_map, problem.load)
    with pytest.raises(ConstraintError):
        robust_peak_power_lmi(pencil, Q, 0.0, 1.0)
    static = robust_static_compliance_lmi(pencil, Q, 2.0)
    np.testing.assert_allclose(static.evaluate([0.5, 0.5]), robust_dyn_compliance_lmi(pencil, Q, 0.0, 2.0).evaluate([0.5, 0.5]))


def test_border_size_checked():
    pencil = assemble_pencil(l_frame())
    with pytest.raises(ConstraintError):
        robust_dyn_compliance_lmi(pencil, np.ones((4, 1)), 1.0, 1.0)


def test_compactification_lmis():
    pencil = assemble_pencil(l_frame())
    lmis = compactification_lmis(pencil, 3.0)
    assert [l.kind for l in lmis] == [LmiKind.BOX_UPPER, LmiKind.BOX_UPPER, LmiKind.WEIGHT_CAP]
    upper = 3.0 / pencil.weights[0]
    a = np.array([upper / 2, 0.0])
    assert lmis[0].evaluate(a)[0, 0] == pytest.approx(upper * upper / 4)
    assert lmis[2].evaluate(a)[0, 0] == pytest.approx(3.0 - pencil.weights[0] * upper / 2)
    assert all(l.degree <= 2 for l in lmis)
    with pytest.raises(ConstraintError):
        compactification_lmis(pencil, 0.0)


def test_problem_lmis_order_and_errors():
    problem = l_frame(thresholds=Thresholds(lambda_bar=1e-3))
    pencil = assemble_pencil(problem)
    assert [l.kind for l in problem_lmis(problem, pencil)] == [LmiKind.FREE_VIBRATION]

    loaded = loaded_l_frame(omega=0.3, dbar=2.0)
    pencil = assemble_pencil(loaded)
    assert [l.kind for l in problem_lmis(loaded, pencil)] == [LmiKind.DYN_COMPLIANCE]

    with pytest.raises(ConstraintError):
        problem_lmis(l_frame(thresholds=Thresholds(dbar=1.0)), pencil)
    with pytest.raises(ConstraintError):
        problem_lmis(l_frame(thresholds=Thresholds()), pencil)


@pytest.mark.parametrize("name,r_min", [("ten-segment", 1), ("twelve-segment", 2)])
def test_minimal_order(name, r_min):
    problem = builtin_benchmark(name)
    pencil = assemble_pencil(problem)
    assert minimal_order_of(problem_lmis(problem, pencil)) == r_min


# -----------------------------
# Эквивалентность форм
# -----------------------------

def test_factor_psd():
    m0 = np.diag([2.0, 0.0, 5.0])
    q = factor_psd(m0)
    assert q.shape == (3, 2)
    np.testing.assert_allclose(q @ q.T, m0, atol=1e-12)
    assert np.all(q.max(axis=0) > 0)
    assert factor_psd(np.zeros((2, 2))).shape == (2, 0)
    with pytest.raises(ConstraintError):
        factor_psd(np.diag([1.0, -1.0]))


def test_augmented_pencil_matches_free_vibration():
    dyn = builtin_benchmark("ten-segment", "dyn-compliance", consistent_load=True)
    fv = builtin_benchmark("ten-segment", "free-vibration")
    dyn_pencil = assemble_pencil(dyn)
    fv_pencil = assemble_pencil(fv)
    lmi = problem_lmis(dyn, dyn_pencil)[0]
    augmented, m0 = to_augmented_pencil(lmi)
    np.testing.assert_allclose(m0, fv_pencil.mass_constant, atol=1e-9)
    a = np.full(10, 1e-3)
    np.testing.assert_allclose(augmented.evaluate(a), problem_lmis(fv, fv_pencil)[0].evaluate(a),
                               rtol=1e-9, atol=1e-6)
    assert augmented.lambda_bar == pytest.approx(fv.thresholds.lambda_bar)


def test_round_trip_preserves_feasibility(rng):
    problem = l_frame(thresholds=Thresholds(lambda_bar=0.02))
    pencil = assemble_pencil(problem)
    fv = problem_lmis(problem, pencil)[0]
    bordered = from_pencil_to_bordered(fv)
    assert bordered.kind == LmiKind.DYN_COMPLIANCE
    assert bordered.omega == pytest.approx(np.sqrt(0.02))
    for _ in range(30):
        a = rng.uniform(0.0, 1.0, 2)
        K = pencil.stiffness.evaluate(a)
        M_bare = pencil.mass.evaluate(a) - pencil.mass_constant
        if np.linalg.eigvalsh(K - 0.02 * M_bare)[0] <= 1e-9:
            continue
        assert _psd(fv.evaluate(a), 1e-9) == _psd(bordered.evaluate(a), 1e-9)
    back, _ = to_augmented_pencil(bordered)
    a = np.array([0.4, 0.8])
    np.testing.assert_allclose(back.evaluate(a), fv.evaluate(a), atol=1e-9)


def test_without_mass_round_trip_keeps_matrix():
    problem = l_frame(masses={}, thresholds=Thresholds(lambda_bar=0.02))
    pencil = assemble_pencil(problem)
    fv = problem_lmis(problem, pencil)[0]
    bordered = from_pencil_to_bordered(fv)
    assert bordered.q == 0
    np.testing.assert_allclose(bordered.evaluate([0.3, 0.3]), fv.evaluate([0.3, 0.3]))
