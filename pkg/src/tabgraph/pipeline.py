"""Two-stage extraction: raster surrogate first, then graph search in its scope."""

from __future__ import annotations

import enum
import logging
import time
from dataclasses import dataclass, field, replace
from typing import Any, Optional

from .alignment import AlignmentConfig, label_document
from .document import FORMAT_VERSION, Cell, ExtractedTable, Page
from .iso_search import Embedding, SearchBudget, SearchResult, embedding_is_valid, find_largest
from .order_model import TableCandidate, candidate_from_cells, placeholder_id, repair
from .pattern import Family, make_pattern
from .table_graph import EmptyRegionError, Rect, TypedGraph, build_document_graph
from .visual import Structure, SurrogateParams, SurrogateReport, analyze_page

log = logging.getLogger(__name__)


class NoRasterError(ValueError):
    pass


class Strategy(enum.Enum):
    EMPTY = "empty"
    AREA = "area"
    COLUMN = "column"
    GRID = "grid"
    DYNAMIC = "dynamic"

    @classmethod
    def parse(cls, name: "str | Strategy") -> "Strategy":
        if isinstance(name, Strategy):
            return name
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(f"unknown strategy {name!r}") from None


_FROM_STRUCTURE = {
    Structure.EMPTY: Strategy.EMPTY,
    Structure.AREA: Strategy.AREA,
    Structure.COLUMN: Strategy.COLUMN,
    Structure.GRID: Strategy.GRID,
}


@dataclass(frozen=True)
class PipelineConfig:
    strategy: Strategy = Strategy.DYNAMIC
    family: Family = Family.BORDER_LEFT_TOP
    budget: float = 300.0
    alignment: AlignmentConfig = field(default_factory=AlignmentConfig)
    surrogate: SurrogateParams = field(default_factory=SurrogateParams)
    # smallest table worth reporting
    min_size: tuple[int, int] = (2, 2)
    max_size: Optional[tuple[int, int]] = None
    omit: frozenset = frozenset()
    adjacent: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "strategy", Strategy.parse(self.strategy))
        object.__setattr__(self, "family", Family.parse(self.family))
        if not self.budget > 0:
            raise ValueError("budget must be > 0 seconds")
        if min(self.min_size) < 1:
            raise ValueError("min_size must be at least 1x1")


@dataclass(frozen=True)
class ExtractionResult:
    table: Optional[ExtractedTable]
    strategy_used: Strategy
    surrogate: Optional[SurrogateReport]
    pattern_family: Family
    elapsed_surrogate: float
    elapsed_search: float
    timeout: bool
    region: Optional[Rect] = None
    candidate: Optional[TableCandidate] = None

    def to_json(self, timing: bool = True, explain: bool = False) -> dict[str, Any]:
        out: dict[str, Any] = {
            "format_version": FORMAT_VERSION,
            "table": self.table.to_json() if self.table is not None else None,
            "strategy": self.strategy_used.value,
            "pattern": self.pattern_family.value,
            "timeout": self.timeout,
        }
        if timing:
            out["elapsed"] = {"surrogate": self.elapsed_surrogate, "search": self.elapsed_search}
        if explain:
            out["surrogate"] = self.surrogate.to_json(timing) if self.surrogate is not None else None
            out["region"] = list(self.region) if self.region is not None else None
        return out


def resolve_dynamic(report: SurrogateReport) -> Strategy:
    return _FROM_STRUCTURE[report.structure]


def _degrade(strategy: Strategy, report: Optional[SurrogateReport]) -> Strategy:
    """Fall back to a weaker strategy when the report lacks what ``strategy`` needs."""
    order = [Strategy.GRID, Strategy.COLUMN, Strategy.AREA, Strategy.EMPTY]
    for s in order[order.index(strategy) :]:
        if s is Strategy.EMPTY:
            return s
        if report is None or report.region is None:
            continue
        if s is Strategy.GRID and (not report.col_cuts or not report.row_cuts):
            continue
        if s is Strategy.COLUMN and not report.col_cuts:
            continue
        return s
    return Strategy.EMPTY


def _crop(page: Page, region: Rect) -> Page:
    x0, y0, x1, y1 = region
    inside = [t for t in page.tokens if t.x >= x0 and t.end_x <= x1 and t.y >= y0 and t.end_y <= y1]
    return page.with_tokens(inside)


def _table_from(graph: TypedGraph, rows: list[int], cols: list[int]) -> TableCandidate:
    return repair(candidate_from_cells(rows, cols, graph.cells))


def _render(tc: TableCandidate, page: Page, strategy: Strategy, size: tuple[int, int], elapsed: float) -> ExtractedTable:
    cells = []
    for i, r in enumerate(tc.rows):
        row = []
        for j, c in enumerate(tc.cols):
            ref = tc.cells[(r, c)]
            text = " ".join(page.token(t).text for t in ref.tokens)
            row.append(Cell(ref.tokens, text, placeholder_id(i, j) if ref.is_placeholder else None))
        cells.append(tuple(row))
    meta = {"duplicated": sorted(tc.duplicated)} if tc.duplicated else {}
    return ExtractedTable(tuple(cells), strategy.value, size, elapsed, meta)


def _grid_fast_path(graph: TypedGraph, cfg: PipelineConfig) -> Optional[SearchResult]:
    """With both cut sets fixed the table is the bucket grid; only check the pattern holds."""
    n, m = graph.n_lines, graph.n_cols
    if n < cfg.min_size[0] or m < cfg.min_size[1]:
        return None
    if cfg.max_size is not None and (n > cfg.max_size[0] or m > cfg.max_size[1]):
        return None
    try:
        pattern = make_pattern(cfg.family, n, m, cfg.omit)
    except ValueError:
        return None
    emb = Embedding(tuple(range(n)), tuple(range(m)))
    if not embedding_is_valid(pattern, graph, emb, cfg.adjacent):
        return None
    return SearchResult(pattern, emb, False, 0.0, sizes_tried=1)


def _search(page: Page, strategy: Strategy, report: Optional[SurrogateReport], cfg: PipelineConfig):
    region = report.region if strategy is not Strategy.EMPTY and report is not None else None
    scoped = _crop(page, region) if region is not None else page
    if not scoped.tokens:
        raise EmptyRegionError("no tokens inside the detected region")
    doc = label_document(scoped, cfg.alignment)
    fixed_cols = report.col_cuts if strategy in (Strategy.COLUMN, Strategy.GRID) else None
    fixed_rows = report.row_cuts if strategy is Strategy.GRID else None
    graph = build_document_graph(doc, fixed_cols=fixed_cols, fixed_rows=fixed_rows)

    result = _grid_fast_path(graph, cfg) if strategy is Strategy.GRID else None
    if result is None:
        n_max, m_max = cfg.max_size or (graph.n_lines, graph.n_cols)
        bounds = (n_max, m_max, cfg.min_size[0], cfg.min_size[1])
        result = find_largest(cfg.family, graph, bounds, SearchBudget(cfg.budget), cfg.omit, cfg.adjacent)
    return scoped, graph, result, region


def extract(page: Page, cfg: PipelineConfig | None = None, report: Optional[SurrogateReport] = None) -> ExtractionResult:
    """Extract the largest table of ``page``.

    ``report`` may carry a precomputed surrogate; otherwise the raster is
    analyzed whenever the strategy needs it. A forced visual strategy whose
    report lacks a region or cuts falls back to the next weaker one.
    """
    cfg = cfg or PipelineConfig()
    elapsed_surrogate = 0.0
    if report is None and cfg.strategy is not Strategy.EMPTY:
        if page.raster is None:
            if cfg.strategy is Strategy.DYNAMIC:
                raise NoRasterError("the dynamic strategy needs a raster")
            raise NoRasterError(f"the {cfg.strategy.value} strategy needs a raster or a surrogate report")
        report = analyze_page(page, cfg.surrogate)
        elapsed_surrogate = report.elapsed
    strategy = resolve_dynamic(report) if cfg.strategy is Strategy.DYNAMIC else cfg.strategy
    used = _degrade(strategy, report)
    if used is not strategy:
        log.info("strategy %s lacks surrogate support on this page, using %s", strategy.value, used.value)

    t0 = time.perf_counter()
    _, graph, result, region = _search(page, used, report, cfg)
    table = candidate = None
    if result.found:
        emb = result.embedding
        candidate = _table_from(graph, list(emb.line_map), list(emb.col_map))
    elapsed_search = time.perf_counter() - t0
    if candidate is not None:
        table = _render(candidate, page, used, result.pattern.size, elapsed_search)
    return ExtractionResult(
        table, used, report, cfg.family, elapsed_surrogate, elapsed_search, result.timeout, region, candidate
    )


def extract_all(page: Page, cfg: PipelineConfig | None = None, limit: int = 8) -> list[ExtractionResult]:
    """Extract, drop the found table's tokens and repeat until nothing is found.

    Only the first pass uses ``cfg.strategy``. The raster still shows the rules
    of tables already taken, so later passes search the remaining tokens
    with the whole-page strategy.
    """
    cfg = cfg or PipelineConfig()
    results: list[ExtractionResult] = []
    for k in range(limit):
        if not page.tokens:
            break
        try:
            res = extract(page, cfg if k == 0 else replace(cfg, strategy=Strategy.EMPTY))
        except EmptyRegionError:
            break
        if res.table is None:
            break
        results.append(res)
        used = {t for row in res.table.token_rows() for cell in row for t in cell}
        page = page.with_tokens(t for t in page.tokens if t.id not in used)
    return results


__all__ = [
    "ExtractionResult",
    "NoRasterError",
    "PipelineConfig",
    "Strategy",
    "extract",
    "extract_all",
    "resolve_dynamic",
]
