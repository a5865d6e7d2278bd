# -*- coding: utf-8 -*-
"""
cli.py — командная строка: solve / analyze / export-sdpa.

Примеры:
  python main.py solve --builtin ten-segment:free-vibration --r-max 3 --eps 0.01
  python main.py analyze --builtin ten-segment:dyn-compliance --design out/design.json --plot
  python main.py export-sdpa --builtin twelve-segment:free-vibration --out out/

Коды возврата: 0 — успех, 1 — вердикт Failed или иная ошибка,
2 — нет/неверный файл задачи или проекта, 3 — резонанс или недопустимый
проект, 4 — сбой SDP-решателя (в том числе вердикт Failed по его статусу).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, NonNegativeFloat, PositiveFloat, PositiveInt, ValidationError, model_validator
from tqdm import tqdm

from src.analysis.eigen import eigenpairs
from src.analysis.histories import save_history_csv, time_histories
from src.analysis.relations import verify_relations
from src.analysis.worst_case import worst_case
from src.certify.feasibility import build_design, check_feasible, initial_feasible
from src.certify.loop import CertifyOptions, OrderRecord, Verdict, certify_loop
from src.certify.report import certificate_to_dict, design_rows, design_table, format_table, save_json
from src.constraints.lmi import LmiKind, compactification_lmis
from src.errors import (
    FrameSdpError,
    InfeasibleScalingError,
    ProblemValidationError,
    ResonanceError,
    SolverError,
)
from src.model.benchmarks import builtin_benchmark, parse_builtin_spec
from src.model.schema import load_problem
from src.model.types import FrameProblem
from src.relaxation.basis import BasisKind
from src.relaxation.builder import build_relaxation
from src.sdpsolve.backend import SolverOptions
from src.sdpsolve.sdpa_format import write_sdpa

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_SOLVER = 4


# -----------------------------
# Конфигурация запуска
# -----------------------------

class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    command: Literal["solve", "analyze", "export-sdpa"]
    builtin: Optional[str] = None
    problem: Optional[Path] = None
    consistent_load: bool = False
    r_min: Optional[PositiveInt] = None
    r_max: PositiveInt = 3
    eps: PositiveFloat = 1e-2
    tolerance: PositiveFloat = 1e-8
    backend: str = "auto"
    basis: BasisKind = BasisKind.NMT
    time_budget: Optional[PositiveFloat] = None
    out: Path = Path("out")
    design: Optional[Path] = None
    omega: Optional[NonNegativeFloat] = None
    samples: PositiveInt = 1000
    plot: bool = False

    @model_validator(mode="after")
    def _one_source(self) -> "RunConfig":
        if (self.builtin is None) == (self.problem is None):
            raise ValueError("нужен ровно один источник задачи: --builtin или --problem")
        if self.command == "analyze" and self.design is None:
            raise ValueError("analyze требует --design")
        return self

    def solver_options(self) -> SolverOptions:
        return SolverOptions(backend=self.backend, tolerance=self.tolerance)

    def certify_options(self) -> CertifyOptions:
        return CertifyOptions(
            eps=self.eps,
            r_min=self.r_min,
            r_max=self.r_max,
            time_budget=self.time_budget,
            basis=self.basis,
            solver=self.solver_options(),
        )


def resolve_problem(config: RunConfig) -> FrameProblem:
    if config.problem is not None:
        return load_problem(config.problem)
    try:
        name, variant = parse_builtin_spec(config.builtin)
    except ValueError as exc:
        raise ProblemValidationError(f"неизвестная встроенная задача '{config.builtin}': {exc}") from exc
    return builtin_benchmark(name, variant, consistent_load=config.consistent_load)


def load_design(path: Path, n_vars: int) -> np.ndarray:
    """Проект — JSON-массив площадей в м²."""
    if not path.is_file():
        raise FileNotFoundError(f"design file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ProblemValidationError(f"{path}: не JSON ({exc})") from exc
    a = np.asarray(data, dtype=float).reshape(-1)
    if a.shape[0] != n_vars:
        raise ProblemValidationError(f"{path}: {a.shape[0]} площадей, ожидается {n_vars}")
    if np.any(a < 0):
        raise ProblemValidationError(f"{path}: отрицательные площади")
    return a


def save_design(a: np.ndarray, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps([float(v) for v in a]) + "\n", encoding="utf-8")


# -----------------------------
# Команды
# -----------------------------

def cmd_solve(config: RunConfig) -> int:
    problem = resolve_problem(config)
    design = build_design(problem)
    options = config.certify_options()
    r_first = max(config.r_min or 1, design.r_min)
    seen: List[int] = []

    with tqdm(total=max(config.r_max - r_first + 1, 0), desc="orders", unit="r") as bar:
        def on_record(record: OrderRecord) -> None:
            if record.order not in seen:
                seen.append(record.order)
                bar.update(1)
            bar.set_postfix(lb=f"{record.lower_bound:.4g}", ub=f"{record.upper_bound:.4g}")

        options.on_record = on_record
        cert = certify_loop(design, options=options)

    out = config.out
    out.mkdir(parents=True, exist_ok=True)
    meta = {"finished_at": time.strftime("%Y-%m-%dT%H:%M:%S"), "backend": config.backend}
    save_json(certificate_to_dict(cert, problem, design.pencil, meta), out / "certificate.json")
    rows = design_table(problem, design.pencil, cert.best_design)
    (out / "table.txt").write_text(format_table(cert) + "\n" + rows, encoding="utf-8")
    save_design(cert.best_design, out / "design.json")

    print()
    print(format_table(cert, timed=True) + "\n" + rows)
    print(f"Certificate: {out / 'certificate.json'}")
    print(f"Design:      {out / 'design.json'}")
    if cert.verdict == Verdict.FAILED:
        return EXIT_SOLVER if cert.solver_failure else EXIT_FAILED
    return EXIT_OK


def _report_kind(problem: FrameProblem, omega: float) -> LmiKind:
    t = problem.thresholds
    if omega == 0.0:
        return LmiKind.STATIC_COMPLIANCE
    return LmiKind.PEAK_POWER if t.pbar is not None else LmiKind.DYN_COMPLIANCE


def _report_threshold(problem: FrameProblem, kind: LmiKind) -> Optional[float]:
    t = problem.thresholds
    if kind == LmiKind.PEAK_POWER:
        return t.pbar
    if kind == LmiKind.STATIC_COMPLIANCE:
        return t.cbar if t.cbar is not None else t.dbar
    return t.dbar


def cmd_analyze(config: RunConfig) -> int:
    problem = resolve_problem(config)
    design = build_design(problem)
    a = load_design(config.design, design.n_vars)
    out = config.out
    out.mkdir(parents=True, exist_ok=True)
    exit_code = EXIT_OK

    feas = check_feasible(design, a)
    if not feas.feasible:
        log.warning("Проект недопустим: запас %.3e", feas.margin)
        exit_code = EXIT_INFEASIBLE

    eig = eigenpairs(design.pencil, a, k=6)
    eig_doc: Dict[str, Any] = {
        "eigenvalues": eig.eigenvalues,
        "frequencies_hz": eig.frequencies_hz,
        "kernel_dim": eig.kernel_dim,
        "lambda_bar": problem.thresholds.lambda_bar,
        "feasible": feas.feasible,
        "margin": feas.margin,
        "weight_kg": design.weight(a),
        "design": design_rows(problem, design.pencil, a),
    }
    save_json(eig_doc, out / "eigen.json")
    print(f"Frequencies, Hz: {', '.join(f'{f:.3f}' for f in eig.frequencies_hz)}")

    if problem.load is None:
        log.info("В задаче нет нагрузки: анализ наихудшего случая пропущен")
        return exit_code

    load = problem.load if config.omega is None else problem.load.with_omega(config.omega)
    kind = _report_kind(problem, load.omega)
    report = worst_case(design.pencil, a, load, kind=kind, threshold=_report_threshold(problem, kind))
    residuals = verify_relations(design.pencil, a, load, report)
    series = time_histories(report, c1=load.phase[0], c2=load.phase[1], n_samples=config.samples)

    save_json(
        {
            "omega": report.omega,
            "kind": report.kind.value,
            "d_R": report.d_R,
            "p_R": report.p_R,
            "utilization": report.utilization,
            "multiplicity": report.multiplicity,
            "gram_eigenvalues": report.gram_eigenvalues,
            "r_q": report.r_q,
            "nodal": [asdict(n) for n in report.nodal],
            "relations": residuals.as_dict(),
            "history_peaks": series.summary(),
        },
        out / "worst_case.json",
    )
    save_history_csv(series, out / "history.csv")
    if config.plot:
        from src.analysis.plotting import plot_design, plot_histories

        plot_histories(series, out / "history.png", title=problem.name)
        plot_design(problem, a, out / "design.png")

    print(f"d_R = {report.d_R:.6g} N·m, p_R = {report.p_R:.6g} W")
    for n in report.nodal:
        print(f"  node {n.node}: |f| = {n.magnitude:.4g} N, angle from x = {n.angle_x_deg:.2f}°, "
              f"from downward vertical = {n.angle_down_deg:.2f}°")
    print(f"Reports: {out}")
    return exit_code


def cmd_export_sdpa(config: RunConfig) -> int:
    problem = resolve_problem(config)
    design = build_design(problem)
    order = max(config.r_min or 1, design.r_min)
    _, wbar = initial_feasible(design)
    lmis = compactification_lmis(design.pencil, wbar) + list(design.lmis)
    sdp = build_relaxation(design.pencil, lmis, order, basis=config.basis,
                           variable_scale=wbar / design.pencil.weights, block_scaling=True)
    path = write_sdpa(sdp, config.out / "problem.dat-s")
    print(f"r={order}: blocks {sdp.block_summary()}, n={sdp.n_free}")
    print(f"SDPA: {path}")
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "analyze": cmd_analyze, "export-sdpa": cmd_export_sdpa}


# -----------------------------
# CLI
# -----------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        description="Нижние оценки и сертификаты глобальной оптимальности для рам минимального веса."
    )
    p.add_argument("--log-level", type=str, default="INFO", help="Уровень логирования (DEBUG, INFO, WARNING).")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--builtin", type=str, help="Встроенная задача NAME:VARIANT, например ten-segment:peak-power.")
    src.add_argument("--problem", type=Path, help="JSON-файл задачи.")
    common.add_argument("--consistent-load", action="store_true",
                        help="Согласованный радиус эллипсоида нагрузок для встроенных задач.")
    common.add_argument("--out", type=Path, default=Path("out"), help="Каталог результатов.")
    common.add_argument("--r-min", type=int, default=None, help="Начальный порядок релаксации.")
    common.add_argument("--basis", type=str, default="nmt", choices=["nmt", "canonical"], help="Мономиальный базис.")

    s = sub.add_parser("solve", parents=[common], help="Цикл оценок и сертификат.")
    s.add_argument("--r-max", type=int, default=3, help="Максимальный порядок релаксации.")
    s.add_argument("--eps", type=float, default=1e-2, help="Допустимый относительный зазор.")
    s.add_argument("--backend", type=str, default="auto", help="auto, mosek, clarabel, scs, cvxopt или csdp.")
    s.add_argument("--tolerance", type=float, default=1e-8, help="Точность SDP-решателя.")
    s.add_argument("--time-budget", type=float, default=None, help="Бюджет времени, с.")

    a = sub.add_parser("analyze", parents=[common], help="Собственные частоты и наихудшая нагрузка для проекта.")
    a.add_argument("--design", type=Path, required=True, help="JSON-массив площадей, м².")
    a.add_argument("--omega", type=float, default=None, help="Частота нагрузки, рад/с (0 — статика).")
    a.add_argument("--samples", type=int, default=1000, help="Число точек временных рядов.")
    a.add_argument("--plot", action="store_true", help="Сохранить графики PNG.")

    sub.add_parser("export-sdpa", parents=[common], help="Релаксация порядка r_min в формате SDPA.")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = {k: v for k, v in vars(args).items() if k != "log_level" and v is not None}
    return RunConfig.model_validate(fields)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        config = config_from_args(args)
    except ValidationError as exc:
        print(f"Неверные параметры: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT

    try:
        return COMMANDS[config.command](config)
    except (FileNotFoundError, ProblemValidationError, ValueError) as exc:
        print(f"Ошибка входных данных: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (ResonanceError, InfeasibleScalingError) as exc:
        print(f"Недопустимый проект: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SolverError as exc:
        print(f"Сбой решателя: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except FrameSdpError as exc:
        print(f"Ошибка: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    raise SystemExit(main())
