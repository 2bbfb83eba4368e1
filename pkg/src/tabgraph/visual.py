"""Cheap raster analysis that guesses the table structure of a page.

Ruling lines are found by run-length analysis of the binarized raster: long
horizontal (resp. vertical) ink runs, with short gaps bridged, are grouped
across adjacent rows (resp. columns) and kept when the group is thin. The
segments are then clustered and the best cluster decides whether the page
looks like a ruled grid, a column layout, a framed area, or nothing at all.
"""

from __future__ import annotations

import enum
import statistics
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from .document import Page, Raster

Rect = tuple[float, float, float, float]

HORIZONTAL = "horizontal"
VERTICAL = "vertical"


class Structure(enum.Enum):
    EMPTY = "empty"
    AREA = "area"
    COLUMN = "column"
    GRID = "grid"


_RANK = {Structure.EMPTY: 0, Structure.AREA: 1, Structure.COLUMN: 2, Structure.GRID: 3}


@dataclass(frozen=True)
class SurrogateParams:
    threshold: int = 128
    min_len_frac: float = 0.25
    gap_tol_px: int = 3
    max_thickness_px: int = 8

    def __post_init__(self) -> None:
        if not 0 <= self.threshold <= 255:
            raise ValueError("threshold must be in 0..255")
        if not 0 < self.min_len_frac <= 1:
            raise ValueError("min_len_frac must be in (0, 1]")
        if self.gap_tol_px < 0 or self.max_thickness_px < 1:
            raise ValueError("gap_tol_px must be >= 0 and max_thickness_px >= 1")


@dataclass(frozen=True)
class Segment:
    orientation: str
    fixed_coord: float
    start: float
    end: float
    thickness_px: int

    @property
    def span(self) -> tuple[float, float]:
        return self.start, self.end

    @property
    def length(self) -> float:
        return self.end - self.start

    def bbox(self) -> Rect:
        if self.orientation == HORIZONTAL:
            return (self.start, self.fixed_coord, self.end, self.fixed_coord)
        return (self.fixed_coord, self.start, self.fixed_coord, self.end)


@dataclass(frozen=True)
class SurrogateReport:
    structure: Structure
    region: Optional[Rect] = None
    col_cuts: Optional[tuple[float, ...]] = None
    row_cuts: Optional[tuple[float, ...]] = None
    elapsed: float = field(default=0.0, compare=False)
    segments: tuple[Segment, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        s = self.structure
        if s is Structure.EMPTY and (self.region or self.col_cuts or self.row_cuts):
            raise ValueError("an Empty report carries no region or cuts")
        if s is not Structure.EMPTY and self.region is None:
            raise ValueError(f"a {s.value} report needs a region")
        if s in (Structure.COLUMN, Structure.GRID) and not self.col_cuts:
            raise ValueError(f"a {s.value} report needs column cuts")
        if s is Structure.GRID and not self.row_cuts:
            raise ValueError("a grid report needs row cuts")

    def to_json(self, timing: bool = True) -> dict[str, Any]:
        out: dict[str, Any] = {
            "structure": self.structure.value,
            "region": list(self.region) if self.region else None,
            "col_cuts": list(self.col_cuts) if self.col_cuts else None,
            "row_cuts": list(self.row_cuts) if self.row_cuts else None,
            "segments": [asdict(s) for s in self.segments],
        }
        if timing:
            out["elapsed"] = self.elapsed
        return out

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "SurrogateReport":
        def tup(v):
            return tuple(float(x) for x in v) if v else None

        return cls(
            structure=Structure(obj["structure"]),
            region=tup(obj.get("region")),
            col_cuts=tup(obj.get("col_cuts")),
            row_cuts=tup(obj.get("row_cuts")),
            elapsed=float(obj.get("elapsed", 0.0)),
            segments=tuple(Segment(**s) for s in obj.get("segments", [])),
        )


def binarize(raster: Raster | np.ndarray, threshold: int = 128) -> np.ndarray:
    """Boolean ink mask: True where the pixel is darker than ``threshold``."""
    pixels = raster.pixels if isinstance(raster, Raster) else np.asarray(raster)
    if pixels.size == 0:
        raise ValueError("empty raster")
    return pixels < threshold


def _row_runs(bitmap: np.ndarray, min_len: int, gap_tol: int) -> list[list[tuple[int, int]]]:
    """Per row, the ink runs (start, end-exclusive) of length >= min_len after bridging gaps."""
    out: list[list[tuple[int, int]]] = [[] for _ in range(bitmap.shape[0])]
    counts = bitmap.sum(axis=1)
    floor = max(1, min_len // (gap_tol + 1))
    for y in np.flatnonzero(counts >= floor):
        idx = np.flatnonzero(bitmap[y])
        breaks = np.flatnonzero(np.diff(idx) > gap_tol + 1)
        starts = np.concatenate(([idx[0]], idx[breaks + 1]))
        ends = np.concatenate((idx[breaks], [idx[-1]])) + 1
        keep = ends - starts >= min_len
        out[y] = list(zip(starts[keep].tolist(), ends[keep].tolist()))
    return out


def _group_runs(runs: list[list[tuple[int, int]]]) -> list[list[int]]:
    """Merge overlapping runs of consecutive rows; returns [y0, y1, x0, x1] groups (inclusive y)."""
    done: list[list[int]] = []
    open_groups: list[list[int]] = []
    for y, row in enumerate(runs):
        next_open: list[list[int]] = []
        for x0, x1 in row:
            g = [y, y, x0, x1]
            for other in open_groups + next_open:
                if other is g or other[0] < 0:
                    continue
                if other[1] >= y - 1 and other[2] < g[3] and g[2] < other[3]:
                    g = [min(g[0], other[0]), y, min(g[2], other[2]), max(g[3], other[3])]
                    other[0] = -1  # absorbed
            next_open.append(g)
        for g in open_groups:
            if g[0] >= 0:
                done.append(g)
        open_groups = [g for g in next_open if g[0] >= 0]
    done.extend(open_groups)
    return [g for g in done if g[0] >= 0]


def detect_segments(
    bitmap: np.ndarray,
    min_len_frac: float = 0.25,
    gap_tol_px: int = 3,
    max_thickness_px: int = 8,
    scale: float = 1.0,
) -> list[Segment]:
    if not 0 < min_len_frac <= 1:
        raise ValueError("min_len_frac must be in (0, 1]")
    bitmap = np.asarray(bitmap, dtype=bool)
    h, w = bitmap.shape
    segments: list[Segment] = []
    for orientation, bm, dim in ((HORIZONTAL, bitmap, w), (VERTICAL, bitmap.T, h)):
        min_len = max(1, int(np.ceil(min_len_frac * dim)))
        for y0, y1, x0, x1 in _group_runs(_row_runs(bm, min_len, gap_tol_px)):
            thickness = y1 - y0 + 1
            if thickness > max_thickness_px:
                continue
            segments.append(
                Segment(orientation, (y0 + y1 + 1) / 2.0 * scale, x0 * scale, x1 * scale, thickness)
            )
    segments.sort(key=lambda s: (s.orientation, s.fixed_coord, s.start))
    return segments


def median_token_height(page: Page) -> float:
    hs = [t.height for t in page.tokens if t.height > 0]
    return statistics.median(hs) if hs else 0.01 * page.height


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _span_overlap(a: Segment, b: Segment) -> float:
    return min(a.end, b.end) - max(a.start, b.start)


def _linked(a: Segment, b: Segment, pad: float, page: Page) -> bool:
    ax0, ay0, ax1, ay1 = a.bbox()
    bx0, by0, bx1, by1 = b.bbox()
    if ax0 - pad <= bx1 + pad and bx0 - pad <= ax1 + pad and ay0 - pad <= by1 + pad and by0 - pad <= ay1 + pad:
        return True
    if a.orientation != b.orientation:
        return False
    # parallel rules sharing most of their extent belong to one layout block
    across = page.width if a.orientation == VERTICAL else page.height
    shorter = min(a.length, b.length)
    return _span_overlap(a, b) >= 0.5 * shorter and abs(a.fixed_coord - b.fixed_coord) <= 0.5 * across


def _crosses(h: Segment, v: Segment, tol: float) -> bool:
    return h.start - tol <= v.fixed_coord <= h.end + tol and v.start - tol <= h.fixed_coord <= v.end + tol


def _dedupe(coords: Sequence[float], tol: float) -> tuple[float, ...]:
    out: list[float] = []
    for c in sorted(coords):
        if out and c - out[-1] <= tol:
            continue
        out.append(c)
    return tuple(out)


def _classify_cluster(segs: list[Segment], tol: float) -> tuple[Structure, list[Segment], list[Segment]]:
    hs = [s for s in segs if s.orientation == HORIZONTAL]
    vs = [s for s in segs if s.orientation == VERTICAL]
    h_cross = [h for h in hs if sum(_crosses(h, v, tol) for v in vs) >= 2]
    v_cross = [v for v in vs if sum(_crosses(h, v, tol) for h in hs) >= 2]
    if len(h_cross) >= 3 and len(v_cross) >= 3:
        return Structure.GRID, h_cross, v_cross
    overlapping = [
        v for v in vs if any(u is not v and _span_overlap(u, v) >= 0.5 * min(u.length, v.length) for u in vs)
    ]
    # a bare frame (two verticals closed by two crossing horizontals) is an area, not columns
    if len(overlapping) >= 2 and (len(h_cross) < 2 or len(overlapping) >= 3):
        return Structure.COLUMN, [], overlapping
    if len(segs) >= 2:
        return Structure.AREA, [], []
    return Structure.EMPTY, [], []


def classify_structure(segments: Sequence[Segment], page: Page) -> SurrogateReport:
    if not segments:
        return SurrogateReport(Structure.EMPTY)
    pad = median_token_height(page)
    uf = _UnionFind(len(segments))
    for a in range(len(segments)):
        for b in range(a + 1, len(segments)):
            if _linked(segments[a], segments[b], pad, page):
                uf.union(a, b)
    clusters: dict[int, list[Segment]] = {}
    for k, s in enumerate(segments):
        clusters.setdefault(uf.find(k), []).append(s)

    best = None
    for members in clusters.values():
        structure, h_cut, v_cut = _classify_cluster(members, pad / 2)
        if structure is Structure.EMPTY:
            continue
        x0 = min(s.bbox()[0] for s in members)
        y0 = min(s.bbox()[1] for s in members)
        x1 = max(s.bbox()[2] for s in members)
        y1 = max(s.bbox()[3] for s in members)
        key = (_RANK[structure], (x1 - x0) * (y1 - y0))
        if best is None or key > best[0]:
            best = (key, structure, (x0, y0, x1, y1), h_cut, v_cut)
    if best is None:
        return SurrogateReport(Structure.EMPTY, segments=tuple(segments))
    _, structure, (x0, y0, x1, y1), h_cut, v_cut = best
    region = (max(0.0, x0 - pad), max(0.0, y0 - pad), min(page.width, x1 + pad), min(page.height, y1 + pad))
    col_cuts = _dedupe([v.fixed_coord for v in v_cut], pad / 2) if v_cut else None
    row_cuts = _dedupe([h.fixed_coord for h in h_cut], pad / 2) if h_cut else None
    return SurrogateReport(structure, region, col_cuts, row_cuts, segments=tuple(segments))


def analyze_page(page: Page, params: SurrogateParams | None = None) -> SurrogateReport:
    """Binarize, detect and classify; requires ``page.raster``."""
    if page.raster is None:
        raise ValueError("page has no raster")
    params = params or SurrogateParams()
    t0 = time.perf_counter()
    bitmap = binarize(page.raster, params.threshold)
    segs = detect_segments(bitmap, params.min_len_frac, params.gap_tol_px, params.max_thickness_px, page.raster.scale)
    report = classify_structure(segs, page)
    elapsed = time.perf_counter() - t0
    return SurrogateReport(
        report.structure, report.region, report.col_cuts, report.row_cuts, elapsed, report.segments
    )
