"""Published S(n) / M_k(n) tables for the eight reference vectors.

Each table maps a column ``n`` to ``(S, {k: M_k})`` with zero counts dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

FULL_GRID = (20, 30, 40, 50, 60, 70, 80, 90, 100, 110, 120, 130, 140, 150, 200, 500, 1000)
SHORT_GRID = (50, 100, 110, 120, 130, 140, 150, 200, 500, 1000)


@dataclass(frozen=True)
class PublishedTable:
    number: int
    vector: str
    columns: tuple[int, ...]
    s_row: tuple[int, ...]
    m_rows: dict[int, tuple[int, ...]]

    def column(self, n: int) -> tuple[int, dict[int, int]]:
        idx = self.columns.index(n)
        hist = {k: row[idx] for k, row in self.m_rows.items() if row[idx]}
        return self.s_row[idx], hist

    def as_dict(self) -> dict[int, tuple[int, dict[int, int]]]:
        return {n: self.column(n) for n in self.columns}


def _table(number, vector, columns, s_row, **rows) -> PublishedTable:
    m_rows = {int(name[1:]): tuple(vals) for name, vals in rows.items()}
    for vals in (s_row, *m_rows.values()):
        assert len(vals) == len(columns), (number, vals)
    return PublishedTable(number, vector, tuple(columns), tuple(s_row), dict(sorted(m_rows.items())))


TABLES: dict[int, PublishedTable] = {
    1: _table(
        1, "sqrt(2),sqrt(3)", FULL_GRID,
        (6, 6, 6, 6, 6, 8, 8, 7, 8, 7, 7, 7, 7, 7, 7, 7, 10),
        M3=(0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 104, 0),
        M4=(0, 0, 0, 0, 0, 0, 0, 8, 0, 16, 6, 0, 0, 0, 0, 38, 0),
        M5=(6, 8, 12, 30, 24, 24, 30, 14, 18, 12, 32, 44, 44, 44, 40, 276, 328),
        M6=(8, 14, 18, 2, 20, 22, 20, 44, 0, 38, 38, 42, 52, 62, 120, 0, 508),
        M7=(6, 8, 8, 6, 8, 24, 30, 18, 46, 44, 44, 44, 44, 44, 40, 0, 82),
        M8=(0, 0, 2, 12, 8, 0, 0, 6, 36, 0, 0, 0, 0, 0, 0, 82, 0),
        M9=(0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 82),
    ),
    2: _table(
        2, "sqrt(2),sqrt(5)", FULL_GRID,
        (6, 7, 7, 7, 6, 8, 8, 8, 8, 7, 9, 7, 6, 8, 8, 6, 6),
        M4=(0, 0, 0, 16, 26, 22, 12, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0),
        M5=(8, 8, 6, 0, 0, 14, 34, 54, 46, 34, 34, 34, 24, 24, 62, 102, 170),
        M6=(4, 18, 0, 2, 0, 0, 0, 0, 20, 50, 62, 72, 92, 102, 76, 296, 660),
        M7=(8, 0, 22, 32, 16, 10, 10, 10, 22, 18, 14, 14, 24, 24, 62, 102, 170),
        M8=(0, 4, 12, 0, 18, 24, 24, 24, 12, 8, 10, 10, 0, 0, 0, 0, 0),
    ),
    3: _table(
        3, "sqrt(3),sqrt(5)", FULL_GRID,
        (5, 5, 9, 8, 5, 8, 8, 8, 8, 8, 8, 6, 6, 6, 7, 6, 7),
        M4=(0, 0, 8, 8, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 246),
        M5=(2, 8, 8, 4, 6, 14, 16, 14, 14, 16, 14, 6, 26, 46, 60, 60, 0),
        M6=(16, 14, 8, 28, 48, 42, 48, 68, 72, 78, 92, 118, 88, 58, 86, 380, 262),
        M7=(2, 8, 8, 0, 6, 14, 16, 2, 14, 16, 14, 6, 26, 46, 48, 60, 492),
        M8=(0, 0, 8, 10, 0, 0, 0, 6, 0, 0, 0, 0, 0, 0, 6, 0, 0),
    ),
    4: _table(
        4, "sqrt(5),sqrt(6)", FULL_GRID,
        (5, 6, 6, 7, 6, 7, 5, 6, 6, 6, 6, 6, 5, 6, 6, 6, 7),
        M4=(2, 0, 0, 0, 0, 0, 4, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
        M5=(0, 2, 4, 18, 18, 12, 0, 2, 22, 42, 62, 76, 76, 76, 76, 76, 178),
        M6=(14, 26, 32, 14, 26, 52, 68, 86, 56, 34, 14, 6, 26, 26, 48, 348, 644),
        M7=(4, 2, 4, 18, 14, 0, 8, 2, 22, 26, 26, 20, 0, 20, 76, 76, 178),
        M8=(0, 0, 0, 0, 2, 6, 0, 0, 0, 8, 18, 28, 38, 28, 0, 0, 0),
    ),
    5: _table(
        5, "sqrt(2),cbrt(3)", FULL_GRID,
        (4, 6, 6, 7, 7, 4, 6, 6, 6, 7, 7, 7, 5, 7, 7, 8, 7),
        M4=(0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 4, 0, 0, 0),
        M5=(0, 4, 12, 14, 14, 0, 20, 40, 60, 60, 40, 20, 0, 6, 52, 208, 140),
        M6=(20, 22, 16, 22, 38, 70, 48, 28, 8, 20, 60, 100, 140, 126, 96, 84, 720),
        M7=(0, 4, 12, 14, 2, 0, 4, 4, 4, 0, 0, 0, 0, 14, 52, 208, 140),
        M8=(0, 0, 0, 0, 6, 0, 8, 18, 28, 30, 20, 10, 0, 0, 0, 0, 0),
    ),
    6: _table(
        6, "sqrt(2),e", FULL_GRID,
        (6, 8, 7, 6, 6, 8, 7, 6, 6, 6, 6, 6, 6, 6, 6, 8, 7),
        M4=(0, 4, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
        M5=(6, 6, 6, 8, 14, 14, 4, 14, 14, 14, 14, 4, 14, 14, 38, 92, 52),
        M6=(8, 6, 28, 34, 32, 42, 72, 62, 72, 82, 92, 122, 112, 122, 124, 316, 896),
        M7=(6, 14, 6, 8, 14, 14, 4, 14, 14, 14, 14, 4, 14, 14, 38, 92, 52),
    ),
    7: _table(
        7, "cbrt(2),e", SHORT_GRID,
        (4, 6, 7, 7, 7, 7, 7, 6, 7, 6),
        M5=(8, 8, 8, 8, 8, 8, 8, 38, 8, 362),
        M6=(34, 84, 94, 104, 114, 124, 134, 124, 484, 284),
        M7=(8, 8, 8, 8, 8, 8, 8, 38, 8, 346),
        M8=(0, 0, 0, 0, 0, 0, 0, 0, 0, 8),
    ),
    8: _table(
        8, "e,pi", SHORT_GRID,
        (4, 12, 13, 11, 10, 12, 13, 10, 11, 6),
        M4=(0, 42, 32, 22, 26, 16, 6, 0, 0, 0),
        M5=(6, 22, 22, 22, 4, 40, 80, 56, 58, 142),
        M6=(38, 22, 42, 62, 76, 56, 36, 122, 428, 716),
        M7=(6, 0, 0, 0, 10, 14, 14, 8, 0, 142),
        M9=(0, 0, 0, 0, 10, 0, 0, 8, 0, 0),
        M10=(0, 0, 0, 4, 4, 12, 0, 6, 12, 0),
        M11=(0, 0, 0, 10, 0, 2, 6, 0, 2, 0),
        M12=(0, 0, 12, 0, 0, 0, 8, 0, 0, 0),
        M13=(0, 6, 2, 0, 0, 0, 0, 0, 0, 0),
        M14=(0, 8, 0, 0, 0, 0, 0, 0, 0, 0),
    ),
}
