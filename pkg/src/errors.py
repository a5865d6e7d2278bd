# -*- coding: utf-8 -*-
"""
errors.py — иерархия исключений пакета.

Все ошибки наследуются от FrameSdpError (RuntimeError), поэтому CLI
перехватывает их одним обработчиком и переводит в код возврата.
"""

from __future__ import annotations


class FrameSdpError(RuntimeError):
    """Базовая ошибка пакета."""


class ProblemValidationError(FrameSdpError):
    """Документ задачи не прошёл проверку (схема, единицы, связи переменных)."""


class AssemblyError(FrameSdpError):
    """Ошибка сборки конечно-элементной модели."""


class ConstraintError(FrameSdpError):
    """Некорректные параметры ограничения."""


class RelaxationError(FrameSdpError):
    """Ошибка построения релаксации (порядок, индексы моментов)."""


class SolverError(FrameSdpError):
    """Сбой SDP-решателя или недоступный внешний решатель."""


class InfeasibleScalingError(FrameSdpError):
    """Не найдено допустимое масштабирование проекта (delta <= 2**60)."""


class AnalysisError(FrameSdpError):
    """Ошибка анализа фиксированного проекта."""


class ResonanceError(AnalysisError):
    """Частота возбуждения выше первой собственной частоты (omega**2 > lambda_min)."""
