"""Deterministic synthetic invoice pages with a labeled table.

A page is A4 in points. Text tokens are rendered as filled gray boxes; rules
are 2 px black lines. The table occupies the middle of the page, flanked by
header and footer blocks that act as distractors for whole-page searches.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .document import GroundTruthTable, Page, Raster, Token, dump_document, dump_ground_truth, write_pgm

PAGE_W, PAGE_H = 595.0, 842.0
SCALE = 0.48  # points per pixel, about 150 dpi
TOKEN_H = 10.0
CHAR_W = 5.5
CELL_PAD = 4.0
TABLE_X0, TABLE_X1 = 50.0, 545.0
TABLE_TOP = 130.0
DISTRACTOR_GAP = 30.0
LINE_STEP = 14.0
TEXT_GRAY = 96
RULE_PX = 2

FAMILIES = ("grid", "column", "area", "empty")

_HEADERS = ["Code", "Description", "Qty", "Unit", "Price", "Amount", "Tax", "Total"]
_WORDS = ["Widget", "Bolt", "Panel", "Cable", "Bracket", "Valve", "Sensor", "Filter", "Hinge", "Gasket"]
_HEADER_TEXT = [
    ["ACME", "Supplies", "Ltd"],
    ["12", "Harbour", "Road"],
    ["Springfield", "40213"],
    ["Invoice", "No", "2024-0117"],
    ["Date", "2024-03-05"],
    ["Customer", "C-5521"],
]
_FOOTER_TEXT = [
    ["Payment", "due", "within", "30", "days"],
    ["IBAN", "DE44", "5001", "0517", "5407"],
    ["Thank", "you", "for", "your", "order"],
    ["VAT", "ID", "DE129273398"],
]


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class SynthSpec:
    family: str = "grid"
    n_rows: int = 5
    n_cols: int = 4
    missing_cell_rate: float = 0.0
    jitter: float = 0.0
    distractor_tokens: int = 12
    seed: int = 0
    # frame drawn around the address block; fools the surrogate into "area" on unruled pages
    decoy_frame: bool = False

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise SpecError(f"unknown family {self.family!r}")
        if not 0.0 <= self.missing_cell_rate <= 1.0:
            raise SpecError("missing_cell_rate must be in [0, 1]")
        if not 0.0 <= self.jitter <= 2.0:
            raise SpecError("jitter must be in [0, 2] points")
        if self.distractor_tokens < 0:
            raise SpecError("distractor_tokens must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise SpecError("seed must be a 64-bit unsigned integer")
        if self.n_rows < 0 or self.n_cols < 0:
            raise SpecError("table size must be non-negative")
        has_table = self.n_rows > 0 and self.n_cols > 0
        if self.family != "empty" and not has_table:
            raise SpecError(f"family {self.family!r} needs n_rows, n_cols >= 1")
        if self.family == "grid" and (self.n_rows < 2 or self.n_cols < 2):
            raise SpecError("a ruled grid needs at least 2x2 cells")


@dataclass
class SynthPage:
    page: Page
    ground_truth: Optional[GroundTruthTable]
    spec: SynthSpec
    table_box: Optional[tuple[float, float, float, float]] = None


def row_pitch(n_rows: int) -> float:
    # tall enough that vertical rules clear the surrogate's minimum length
    return max(15.0, 0.3 * PAGE_H / max(n_rows, 1))


def _column_widths(rng: np.random.Generator, m: int) -> list[float]:
    weights = rng.uniform(0.8, 1.2, size=m)
    if m >= 2:
        weights[1] *= 2.2
    total = TABLE_X1 - TABLE_X0
    return [float(w) for w in weights / weights.sum() * total]


def _cell_text(rng: np.random.Generator, r: int, c: int) -> str:
    if r == 0:
        return _HEADERS[c] if c < len(_HEADERS) else f"Col{c}"
    if c == 0:
        return f"A{int(rng.integers(100, 1000))}"
    if c == 1:
        return _WORDS[int(rng.integers(len(_WORDS)))]
    return f"{rng.uniform(1, 999):.2f}"


class _Canvas:
    def __init__(self) -> None:
        self.w = int(round(PAGE_W / SCALE))
        self.h = int(round(PAGE_H / SCALE))
        self.pixels = np.full((self.h, self.w), 255, dtype=np.uint8)

    def _px(self, v: float) -> int:
        return int(round(v / SCALE))

    def box(self, x0: float, y0: float, x1: float, y1: float, gray: int) -> None:
        self.pixels[self._px(y0) : max(self._px(y1), self._px(y0) + 1), self._px(x0) : max(self._px(x1), self._px(x0) + 1)] = gray

    def hrule(self, y: float, x0: float, x1: float) -> None:
        py = self._px(y) - RULE_PX // 2
        self.pixels[py : py + RULE_PX, self._px(x0) - 1 : self._px(x1) + 1] = 0

    def vrule(self, x: float, y0: float, y1: float) -> None:
        px = self._px(x) - RULE_PX // 2
        self.pixels[self._px(y0) - 1 : self._px(y1) + 1, px : px + RULE_PX] = 0


def generate(spec: SynthSpec) -> SynthPage:
    """Build one page; the same spec always yields the same page."""
    spec.validate()
    # separate streams so that adding noise leaves the table content unchanged
    rng, drop_rng, jitter_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(spec.seed).spawn(3))
    canvas = _Canvas()
    tokens: list[Token] = []

    def jit() -> float:
        return float(jitter_rng.uniform(-spec.jitter, spec.jitter)) if spec.jitter > 0 else 0.0

    def add(tid: str, text: str, x: float, y: float) -> Token:
        w = len(text) * CHAR_W
        dx, dy = jit(), jit()
        x0 = round(min(max(0.0, x + dx), PAGE_W - w), 2)
        y0 = round(min(max(0.0, y + dy), PAGE_H - TOKEN_H), 2)
        tok = Token(tid, text, x0, round(x0 + w, 2), y0, round(y0 + TOKEN_H, 2))
        tokens.append(tok)
        canvas.box(tok.x, tok.y, tok.end_x, tok.end_y, TEXT_GRAY)
        return tok

    n, m = spec.n_rows, spec.n_cols
    has_table = n > 0 and m > 0
    gt = None
    table_box = None
    top, bottom = TABLE_TOP, TABLE_TOP
    if has_table:
        pitch = row_pitch(n)
        bottom = top + n * pitch
        if bottom > PAGE_H - 60:
            raise SpecError(f"{n} rows do not fit on the page")
        widths = _column_widths(rng, m)
        edges = [TABLE_X0]
        for w in widths:
            edges.append(edges[-1] + w)
        max_chars = [int((w - 2 * CELL_PAD) // CHAR_W) for w in widths]
        if min(max_chars) < 1:
            raise SpecError(f"{m} columns are too narrow for any text")
        rows = []
        for r in range(n):
            y = top + r * pitch + (pitch - TOKEN_H) / 2
            row = []
            for c in range(m):
                text = _cell_text(rng, r, c)[: max_chars[c]]
                drop = r >= 1 and c >= 1 and drop_rng.random() < spec.missing_cell_rate
                if drop:
                    row.append(())
                    continue
                if c <= 1:
                    x = edges[c] + CELL_PAD
                else:
                    x = edges[c + 1] - CELL_PAD - len(text) * CHAR_W
                tok = add(f"t{r}_{c}", text, x, y)
                row.append((tok.id,))
            rows.append(tuple(row))
        gt = GroundTruthTable(tuple(rows))
        table_box = (TABLE_X0, top, TABLE_X1, bottom)
        if spec.family == "grid":
            for r in range(n + 1):
                canvas.hrule(top + r * pitch, TABLE_X0, TABLE_X1)
            for x in edges:
                canvas.vrule(x, top, bottom)
        elif spec.family == "column":
            for x in edges:
                canvas.vrule(x, top, bottom)
        elif spec.family == "area":
            canvas.hrule(top, TABLE_X0, TABLE_X1)
            canvas.hrule(bottom, TABLE_X0, TABLE_X1)
            canvas.vrule(TABLE_X0, top, bottom)
            canvas.vrule(TABLE_X1, top, bottom)

    _add_distractors(spec, add, canvas, top, bottom if has_table else TABLE_TOP)
    page = Page(PAGE_W, PAGE_H, tuple(tokens), Raster(canvas.pixels, SCALE))
    return SynthPage(page, gt, spec, table_box)


def _add_distractors(spec: SynthSpec, add, canvas: _Canvas, top: float, bottom: float) -> None:
    budget = spec.distractor_tokens
    placed = 0
    # address block on the left, invoice details on the right
    for k, words in enumerate(_HEADER_TEXT):
        if placed >= budget:
            break
        line = k % 3
        y = 30.0 + line * LINE_STEP
        x = 60.0 if k < 3 else 340.0
        for word in words:
            if placed >= budget:
                break
            add(f"d{placed}", word, x, y)
            x += len(word) * CHAR_W + CHAR_W
            placed += 1
    if spec.decoy_frame and placed:
        canvas.hrule(22.0, 50.0, 250.0)
        canvas.hrule(30.0 + 3 * LINE_STEP, 50.0, 250.0)
    y = bottom + DISTRACTOR_GAP
    k = 0
    while placed < budget:
        if y + TOKEN_H > PAGE_H - 10:
            raise SpecError("not enough room for the requested distractor tokens")
        x = 60.0
        for word in _FOOTER_TEXT[k % len(_FOOTER_TEXT)]:
            if placed >= budget:
                break
            add(f"d{placed}", word, x, y)
            x += len(word) * CHAR_W + CHAR_W
            placed += 1
        y += LINE_STEP
        k += 1


def write_instance(sp: SynthPage, out_dir: str | Path) -> Path:
    """Write ``tokens.json``, ``page.pgm``, ``gt.json`` (and ``spec.json``) into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    assert sp.page.raster is not None
    (out / "page.pgm").write_bytes(write_pgm(sp.page.raster.pixels))
    (out / "tokens.json").write_bytes(dump_document(sp.page, "page.pgm"))
    tables = [sp.ground_truth] if sp.ground_truth is not None else []
    (out / "gt.json").write_bytes(dump_ground_truth(tables))
    (out / "spec.json").write_text(json.dumps(asdict(sp.spec), indent=1, sort_keys=True))
    return out


def corpus_specs(
    per_family: int = 10,
    seed: int = 0,
    missing_cell_rate: float = 0.0,
    jitter: float = 0.0,
    families: tuple[str, ...] = FAMILIES,
) -> list[tuple[str, SynthSpec]]:
    """Named specs for a small benchmark corpus with seeded table sizes."""
    rng = np.random.default_rng(seed)
    out = []
    for family in families:
        for k in range(per_family):
            n = int(rng.integers(3, 16))
            m = int(rng.integers(3, 8))
            s = int(rng.integers(0, 2**63))
            out.append((f"{family}_{k:02d}", SynthSpec(family, n, m, missing_cell_rate, jitter, 12, s)))
    return out
