"""Typed Hasse graph of full lines and full columns.

Vertices are the full lines (``L0..``) and full columns (``C0..``). Line
arcs and column arcs are the covering pairs of the two chains; an undirected
intersection edge joins line ``i`` and column ``j`` when some token carries
both labels.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .alignment import LabeledDocument
from .document import Token


class EmptyRegionError(ValueError):
    pass


Rect = tuple[float, float, float, float]  # x0, y0, x1, y1


def hasse_arcs(n: int) -> list[tuple[int, int]]:
    return [(i, i + 1) for i in range(max(0, n - 1))]


@dataclass(frozen=True)
class TypedGraph:
    n_lines: int
    n_cols: int
    edges: frozenset[tuple[int, int]]
    # token ids at each (line, col) intersection, ordered by X then id
    cells: Mapping[tuple[int, int], tuple[str, ...]] = field(default_factory=dict)
    line_payload: tuple[frozenset[str], ...] = ()
    col_payload: tuple[frozenset[str], ...] = ()

    def __post_init__(self) -> None:
        for i, j in self.edges:
            if not (0 <= i < self.n_lines and 0 <= j < self.n_cols):
                raise ValueError(f"intersection edge ({i}, {j}) out of range")

    @property
    def line_vertices(self) -> list[str]:
        return [f"L{i}" for i in range(self.n_lines)]

    @property
    def col_vertices(self) -> list[str]:
        return [f"C{j}" for j in range(self.n_cols)]

    @property
    def arcs_l(self) -> list[tuple[int, int]]:
        return hasse_arcs(self.n_lines)

    @property
    def arcs_c(self) -> list[tuple[int, int]]:
        return hasse_arcs(self.n_cols)

    def vertex_payload(self, vertex: str) -> frozenset[str]:
        kind, idx = vertex[0], int(vertex[1:])
        if kind == "L":
            return self.line_payload[idx] if self.line_payload else frozenset()
        return self.col_payload[idx] if self.col_payload else frozenset()

    def col_masks(self) -> list[int]:
        """Bitset of intersecting lines, one per column vertex."""
        masks = [0] * self.n_cols
        for i, j in self.edges:
            masks[j] |= 1 << i
        return masks

    def line_masks(self) -> list[int]:
        masks = [0] * self.n_lines
        for i, j in self.edges:
            masks[i] |= 1 << j
        return masks

    def to_dot(self) -> str:
        lines = ["graph table {"]
        for v in self.line_vertices + self.col_vertices:
            lines.append(f"  {v} [tokens={len(self.vertex_payload(v))}];")
        for a, b in self.arcs_l:
            lines.append(f"  L{a} -> L{b};")
        for a, b in self.arcs_c:
            lines.append(f"  C{a} -> C{b};")
        for i, j in sorted(self.edges):
            lines.append(f"  L{i} -- C{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _inside(t: Token, region: Rect) -> bool:
    x0, y0, x1, y1 = region
    return t.x >= x0 and t.end_x <= x1 and t.y >= y0 and t.end_y <= y1


def _bucket(v: float, cuts: Sequence[float]) -> Optional[int]:
    # gap k is (cuts[k], cuts[k+1]]; a center on a cut goes to the left/upper gap
    if v < cuts[0] or v > cuts[-1]:
        return None
    return max(0, bisect_left(cuts, v) - 1)


def build_document_graph(
    doc: LabeledDocument,
    region: Optional[Rect] = None,
    fixed_cols: Optional[Sequence[float]] = None,
    fixed_rows: Optional[Sequence[float]] = None,
) -> TypedGraph:
    """Build the typed graph of ``doc``, optionally restricted and bucketed.

    With ``fixed_cols`` (sorted X cuts), column vertices are the gaps between
    consecutive cuts and a token's column is the gap holding its center;
    ``fixed_rows`` does the same on Y. Buckets without tokens stay as empty
    vertices. Tokens whose center falls outside the cuts are dropped.
    """
    tokens = [t for t in doc.page.tokens if region is None or _inside(t, region)]
    if fixed_cols is not None:
        fixed_cols = sorted(fixed_cols)
        if len(fixed_cols) < 2:
            raise ValueError("fixed_cols needs at least two cuts")
    if fixed_rows is not None:
        fixed_rows = sorted(fixed_rows)
        if len(fixed_rows) < 2:
            raise ValueError("fixed_rows needs at least two cuts")

    placed: list[tuple[Token, int, int]] = []
    for t in tokens:
        r = _bucket(t.center_y, fixed_rows) if fixed_rows is not None else doc.row_label[t.id]
        c = _bucket(t.center_x, fixed_cols) if fixed_cols is not None else doc.col_label[t.id]
        if r is not None and c is not None:
            placed.append((t, r, c))
    if not placed:
        raise EmptyRegionError("no tokens in scope")

    # bucketed dimensions keep every gap; label dimensions keep only labels in scope
    if fixed_rows is not None:
        row_ids = list(range(len(fixed_rows) - 1))
    else:
        row_ids = sorted({r for _, r, _ in placed})
    if fixed_cols is not None:
        col_ids = list(range(len(fixed_cols) - 1))
    else:
        col_ids = sorted({c for _, _, c in placed})
    row_pos = {r: k for k, r in enumerate(row_ids)}
    col_pos = {c: k for k, c in enumerate(col_ids)}

    cell_tokens: dict[tuple[int, int], list[Token]] = {}
    line_payload: list[set[str]] = [set() for _ in row_ids]
    col_payload: list[set[str]] = [set() for _ in col_ids]
    for t, r, c in placed:
        i, j = row_pos[r], col_pos[c]
        cell_tokens.setdefault((i, j), []).append(t)
        line_payload[i].add(t.id)
        col_payload[j].add(t.id)
    cells = {k: tuple(t.id for t in sorted(v, key=lambda t: (t.x, t.id))) for k, v in cell_tokens.items()}
    return TypedGraph(
        n_lines=len(row_ids),
        n_cols=len(col_ids),
        edges=frozenset(cells),
        cells=cells,
        line_payload=tuple(frozenset(p) for p in line_payload),
        col_payload=tuple(frozenset(p) for p in col_payload),
    )
