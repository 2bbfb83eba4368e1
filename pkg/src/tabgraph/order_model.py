"""Line/column/table orders over labeled tokens and well-formed table repair."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, Optional

from .alignment import LabeledDocument


def placeholder_id(row: int, col: int) -> str:
    return f"empty:{row}:{col}"


@dataclass(frozen=True)
class CellRef:
    row: int
    col: int
    tokens: tuple[str, ...] = ()

    @property
    def is_placeholder(self) -> bool:
        return not self.tokens

    @property
    def ident(self) -> str:
        """Stable id of the cell; placeholders get a synthetic ``empty:r:c`` id."""
        return placeholder_id(self.row, self.col) if self.is_placeholder else "+".join(self.tokens)


@dataclass(frozen=True)
class TableCandidate:
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    cells: Mapping[tuple[int, int], CellRef]
    # tokens that had to be duplicated because two rows (or columns) shared them
    duplicated: frozenset[str] = field(default=frozenset())

    @property
    def bottom(self) -> Optional[CellRef]:
        return self.cells.get((self.rows[0], self.cols[0])) if self.rows and self.cols else None

    @property
    def top(self) -> Optional[CellRef]:
        return self.cells.get((self.rows[-1], self.cols[-1])) if self.rows and self.cols else None

    def tokens(self) -> list[str]:
        return [t for key in sorted(self.cells) for t in self.cells[key].tokens]

    def is_lattice(self) -> bool:
        """Every pair of occupied cells has its coordinate-wise sup and inf occupied."""
        occupied = list(self.cells)
        if self.bottom is None or self.top is None:
            return False
        keys = set(occupied)
        for (r1, c1), (r2, c2) in product(occupied, repeat=2):
            if (max(r1, r2), max(c1, c2)) not in keys or (min(r1, r2), min(c1, c2)) not in keys:
                return False
        return True

    def line(self, row: int) -> list[CellRef]:
        return [self.cells[(row, c)] for c in self.cols if (row, c) in self.cells]

    def column(self, col: int) -> list[CellRef]:
        return [self.cells[(r, col)] for r in self.rows if (r, col) in self.cells]


def _labels(doc: LabeledDocument, t: str) -> tuple[int, int]:
    return doc.row_label[t], doc.col_label[t]


def precedes_line(t1: str, t2: str, doc: LabeledDocument) -> bool:
    (l1, c1), (l2, c2) = _labels(doc, t1), _labels(doc, t2)
    return l1 < l2 and c1 == c2


def precedes_col(t1: str, t2: str, doc: LabeledDocument) -> bool:
    (l1, c1), (l2, c2) = _labels(doc, t1), _labels(doc, t2)
    return c1 < c2 and l1 == l2


def precedes_table(t1: str, t2: str, doc: LabeledDocument) -> bool:
    (l1, c1), (l2, c2) = _labels(doc, t1), _labels(doc, t2)
    return l1 <= l2 and c1 <= c2


def full_lines(doc: LabeledDocument) -> list[frozenset[str]]:
    groups: list[set[str]] = [set() for _ in range(doc.row_count)]
    for tid, r in doc.row_label.items():
        groups[r].add(tid)
    return [frozenset(g) for g in groups]


def full_columns(doc: LabeledDocument) -> list[frozenset[str]]:
    groups: list[set[str]] = [set() for _ in range(doc.col_count)]
    for tid, c in doc.col_label.items():
        groups[c].add(tid)
    return [frozenset(g) for g in groups]


def candidate_from_cells(
    rows: Iterable[int], cols: Iterable[int], cells: Mapping[tuple[int, int], Iterable[str]]
) -> TableCandidate:
    rows, cols = tuple(sorted(set(rows))), tuple(sorted(set(cols)))
    picked = {}
    for r, c in product(rows, cols):
        toks = tuple(cells.get((r, c), ()))
        if toks:
            picked[(r, c)] = CellRef(r, c, toks)
    return TableCandidate(rows, cols, picked)


def smallest_subtable(t1: str, t2: str, doc: LabeledDocument) -> TableCandidate:
    (l1, c1), (l2, c2) = _labels(doc, t1), _labels(doc, t2)
    rows = range(min(l1, l2), max(l1, l2) + 1)
    cols = range(min(c1, c2), max(c1, c2) + 1)
    return candidate_from_cells(rows, cols, doc.cells())


def is_well_formed(tc: TableCandidate) -> bool:
    if not tc.rows or not tc.cols:
        return False
    return set(tc.cells) == set(product(tc.rows, tc.cols))


def repair(tc: TableCandidate, doc: LabeledDocument | None = None) -> TableCandidate:
    """Complete ``tc`` into a well-formed full table.

    Missing intersections get empty placeholder cells. A token found in cells
    of two different rows (or columns) is kept in each of them, i.e. it is
    duplicated so that the row sets become disjoint token instances; the ids
    are recorded in ``duplicated``.
    """
    if not tc.rows or not tc.cols:
        raise ValueError("cannot repair a candidate without rows or columns")
    seen_row: dict[str, int] = {}
    seen_col: dict[str, int] = {}
    duplicated = set(tc.duplicated)
    for (r, c), cell in tc.cells.items():
        for t in cell.tokens:
            if seen_row.setdefault(t, r) != r or seen_col.setdefault(t, c) != c:
                duplicated.add(t)
    # cells keyed outside the declared span widen it rather than being dropped
    rows = tuple(sorted(set(tc.rows) | {r for r, _ in tc.cells}))
    cols = tuple(sorted(set(tc.cols) | {c for _, c in tc.cells}))
    cells = dict(tc.cells)
    for r, c in product(rows, cols):
        if (r, c) not in cells:
            cells[(r, c)] = CellRef(r, c, ())
    return TableCandidate(rows, cols, cells, frozenset(duplicated))
