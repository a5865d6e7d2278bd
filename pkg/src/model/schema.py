# -*- coding: utf-8 -*-
"""
schema.py — JSON-документ задачи: разбор и выдача.

Схема описана моделями pydantic (extra="forbid": неизвестные поля —
ошибка). Разбор возвращает FrameProblem в СИ; emit_problem(parse(...))
сохраняет все поля.

Пример минимального документа:
{
  "nodes": [[0, 0], [1, 0]],
  "materials": {"al": {"young_modulus": 6.89e10, "density": 2770}},
  "sections": {"round": {"kind": "circular"}},
  "segments": [{"i": 0, "j": 1, "material": "al", "section": "round", "mesh": 1}],
  "supports": [{"node": 0, "fixed": [true, true, true]}],
  "constraints": {"fmin_hz": 10}
}
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

from pydantic import (
    BaseModel,
    ConfigDict,
    NonNegativeFloat,
    NonNegativeInt,
    PositiveFloat,
    PositiveInt,
    ValidationError,
    model_validator,
)

from src.errors import ProblemValidationError
from src.model.types import (
    PHASE_TOL,
    CrossSectionLaw,
    FrameProblem,
    HarmonicLoadSpec,
    LoadColumn,
    Material,
    SectionKind,
    Segment,
    Thresholds,
    lambda_from_hz,
)


# -----------------------------
# Модели документа
# -----------------------------

class _Doc(BaseModel):
    model_config = ConfigDict(extra="forbid")


class MaterialDoc(_Doc):
    young_modulus: PositiveFloat
    density: PositiveFloat


class SectionDoc(_Doc):
    kind: Literal["circular", "rectangular"]
    width: Optional[PositiveFloat] = None


class SegmentDoc(_Doc):
    i: NonNegativeInt
    j: NonNegativeInt
    material: str
    section: str
    link: Optional[PositiveInt] = None
    mesh: PositiveInt = 2


class SupportDoc(_Doc):
    node: NonNegativeInt
    fixed: Tuple[bool, bool, bool] = (True, True, True)


class MassDoc(_Doc):
    node: NonNegativeInt
    mass: NonNegativeFloat


class ColumnDoc(_Doc):
    node: NonNegativeInt
    dir: Tuple[float, float]
    scale: PositiveFloat


class LoadDoc(_Doc):
    omega: NonNegativeFloat
    phase: Tuple[float, float] = (1.0, 0.0)
    columns: Optional[List[ColumnDoc]] = None
    amplitude: Optional[List[float]] = None

    @model_validator(mode="after")
    def _check(self) -> "LoadDoc":
        c1, c2 = self.phase
        if abs(c1 * c1 + c2 * c2 - 1.0) > PHASE_TOL:
            raise ValueError(f"phase not normalized: c1²+c2² = {c1 * c1 + c2 * c2:.6g}")
        if (self.columns is None) == (self.amplitude is None):
            raise ValueError("exactly one of 'columns' or 'amplitude' is required")
        if self.columns is not None and not self.columns:
            raise ValueError("'columns' must not be empty")
        return self


class ConstraintsDoc(_Doc):
    fmin_hz: Optional[PositiveFloat] = None
    lambda_bar: Optional[PositiveFloat] = None
    cbar: Optional[PositiveFloat] = None
    dbar: Optional[PositiveFloat] = None
    pbar: Optional[PositiveFloat] = None

    @model_validator(mode="after")
    def _check(self) -> "ConstraintsDoc":
        if self.fmin_hz is not None and self.lambda_bar is not None:
            raise ValueError("give either 'fmin_hz' or 'lambda_bar', not both")
        return self


class ProblemDoc(_Doc):
    name: str = ""
    nodes: List[Tuple[float, float]]
    materials: Dict[str, MaterialDoc]
    sections: Dict[str, SectionDoc]
    segments: List[SegmentDoc]
    supports: List[SupportDoc]
    masses: List[MassDoc] = []
    load: Optional[LoadDoc] = None
    constraints: ConstraintsDoc = ConstraintsDoc()
    weight_cap: Optional[PositiveFloat] = None


# -----------------------------
# Преобразования документ <-> модель
# -----------------------------

def _format_validation_error(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        path = ".".join(str(p) for p in err.get("loc", ())) or "<root>"
        parts.append(f"{path}: {err.get('msg')}")
    return "; ".join(parts)


def _resolve_links(segs: List[SegmentDoc]) -> List[int]:
    given = [s.link for s in segs]
    if all(v is None for v in given):
        return list(range(1, len(segs) + 1))
    if any(v is None for v in given):
        missing = [k for k, v in enumerate(given) if v is None]
        raise ProblemValidationError(f"segments{missing}.link: связь задана не для всех сегментов")
    return [int(v) for v in given]


def doc_to_problem(doc: ProblemDoc) -> FrameProblem:
    links = _resolve_links(doc.segments)
    segments = tuple(
        Segment(i=s.i, j=s.j, material=s.material, section=s.section, link=link, mesh=s.mesh)
        for s, link in zip(doc.segments, links)
    )
    materials = {k: Material(m.young_modulus, m.density) for k, m in doc.materials.items()}
    sections = {k: CrossSectionLaw(SectionKind(s.kind), s.width) for k, s in doc.sections.items()}

    supports: Dict[int, Tuple[bool, bool, bool]] = {}
    for sup in doc.supports:
        if sup.node in supports:
            raise ProblemValidationError(f"supports: узел {sup.node} указан дважды")
        supports[sup.node] = tuple(bool(x) for x in sup.fixed)  # type: ignore[assignment]

    masses: Dict[int, float] = {}
    for m in doc.masses:
        masses[m.node] = masses.get(m.node, 0.0) + float(m.mass)

    load = None
    if doc.load is not None:
        ld = doc.load
        columns = tuple(LoadColumn(c.node, (float(c.dir[0]), float(c.dir[1])), float(c.scale)) for c in ld.columns or [])
        amplitude = tuple(float(v) for v in ld.amplitude) if ld.amplitude is not None else None
        load = HarmonicLoadSpec(
            omega=float(ld.omega),
            phase=(float(ld.phase[0]), float(ld.phase[1])),
            columns=columns,
            amplitude=amplitude,
        )

    c = doc.constraints
    lam = c.lambda_bar if c.lambda_bar is not None else (lambda_from_hz(c.fmin_hz) if c.fmin_hz is not None else None)
    thresholds = Thresholds(lambda_bar=lam, cbar=c.cbar, dbar=c.dbar, pbar=c.pbar)

    return FrameProblem(
        nodes=tuple((float(x), float(y)) for x, y in doc.nodes),
        segments=segments,
        materials=materials,
        sections=sections,
        supports=supports,
        masses=masses,
        load=load,
        thresholds=thresholds,
        weight_cap=doc.weight_cap,
        name=doc.name,
    )


def problem_to_doc(problem: FrameProblem) -> ProblemDoc:
    load = None
    if problem.load is not None:
        ld = problem.load
        load = LoadDoc(
            omega=ld.omega,
            phase=ld.phase,
            columns=[ColumnDoc(node=c.node, dir=c.direction, scale=c.scale) for c in ld.columns] or None,
            amplitude=list(ld.amplitude) if ld.amplitude is not None else None,
        )
    th = problem.thresholds
    return ProblemDoc(
        name=problem.name,
        nodes=list(problem.nodes),
        materials={k: MaterialDoc(young_modulus=m.young_modulus, density=m.density) for k, m in problem.materials.items()},
        sections={k: SectionDoc(kind=s.kind.value, width=s.width) for k, s in problem.sections.items()},
        segments=[
            SegmentDoc(i=s.i, j=s.j, material=s.material, section=s.section, link=s.link, mesh=s.mesh)
            for s in problem.segments
        ],
        supports=[SupportDoc(node=n, fixed=f) for n, f in sorted(problem.supports.items())],
        masses=[MassDoc(node=n, mass=m) for n, m in sorted(problem.masses.items())],
        load=load,
        constraints=ConstraintsDoc(lambda_bar=th.lambda_bar, cbar=th.cbar, dbar=th.dbar, pbar=th.pbar),
        weight_cap=problem.weight_cap,
    )


# -----------------------------
# Публичный API
# -----------------------------

def parse_problem(text: Union[str, bytes]) -> FrameProblem:
    """Разбирает JSON-документ задачи; ошибки схемы содержат путь к полю."""
    try:
        doc = ProblemDoc.model_validate_json(text)
    except ValidationError as exc:
        raise ProblemValidationError(_format_validation_error(exc)) from exc
    return doc_to_problem(doc)


def emit_problem(problem: FrameProblem) -> str:
    return problem_to_doc(problem).model_dump_json(indent=2, exclude_none=True)


def load_problem(path: Union[str, Path]) -> FrameProblem:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"problem file not found: {p}")
    return parse_problem(p.read_text(encoding="utf-8"))


def save_problem(problem: FrameProblem, path: Union[str, Path]) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(emit_problem(problem) + "\n", encoding="utf-8")
