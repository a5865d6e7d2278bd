"""
Тема: Нижние оценки и сертификаты глобальной оптимальности для рам минимального веса
(моментные SDP-релаксации).
"""

from src.app.cli import main


if __name__ == "__main__":
    raise SystemExit(main())
