"""Tokens, pages, ground truth tables and the JSON/PGM file formats."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Optional

import numpy as np

FORMAT_VERSION = 1


class DocumentError(ValueError):
    """Base class for every input validation failure."""


class SchemaError(DocumentError):
    pass


class GeometryError(DocumentError):
    pass


class DanglingTokenError(DocumentError):
    pass


class RaggedTableError(DocumentError):
    pass


@dataclass(frozen=True)
class Token:
    id: str
    text: str
    x: float
    end_x: float
    y: float
    end_y: float

    @property
    def width(self) -> float:
        return self.end_x - self.x

    @property
    def height(self) -> float:
        return self.end_y - self.y

    @property
    def center_x(self) -> float:
        return (self.x + self.end_x) / 2.0

    @property
    def center_y(self) -> float:
        return (self.y + self.end_y) / 2.0


@dataclass(frozen=True, eq=False)
class Raster:
    """8-bit grayscale bitmap; ``scale`` is doc-units per pixel."""

    pixels: np.ndarray
    scale: float

    def __post_init__(self) -> None:
        if self.pixels.ndim != 2 or self.pixels.size == 0:
            raise SchemaError("raster must be a non-empty 2-D array")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise SchemaError(f"raster scale must be > 0, got {self.scale}")

    @property
    def width_px(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height_px(self) -> int:
        return int(self.pixels.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Raster):
            return NotImplemented
        return self.scale == other.scale and np.array_equal(self.pixels, other.pixels)


@dataclass(frozen=True)
class Page:
    width: float
    height: float
    tokens: tuple[Token, ...]
    raster: Optional[Raster] = None

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for t in self.tokens:
            if t.id in seen:
                raise SchemaError(f"duplicate token id {t.id!r}")
            seen.add(t.id)
            if t.x > t.end_x or t.y > t.end_y:
                raise GeometryError(f"token {t.id!r} has inverted box")
            if t.x < 0 or t.y < 0 or t.end_x > self.width or t.end_y > self.height:
                raise GeometryError(f"token {t.id!r} lies outside the page")

    def token(self, token_id: str) -> Token:
        return self.by_id[token_id]

    @cached_property
    def by_id(self) -> dict[str, Token]:
        return {t.id: t for t in self.tokens}

    def with_tokens(self, tokens: Iterable[Token]) -> "Page":
        return Page(self.width, self.height, tuple(tokens), self.raster)


@dataclass(frozen=True)
class GroundTruthTable:
    """Rows of cells; each cell is a tuple of token ids (empty tuple = empty cell)."""

    rows: tuple[tuple[tuple[str, ...], ...], ...]

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def m(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def columns(self) -> list[list[tuple[str, ...]]]:
        return [[row[j] for row in self.rows] for j in range(self.m)]

    def to_json(self) -> dict[str, Any]:
        return {"rows": [[list(cell) for cell in row] for row in self.rows]}


@dataclass(frozen=True)
class Cell:
    tokens: tuple[str, ...]
    text: str
    placeholder: Optional[str] = None


@dataclass(frozen=True)
class ExtractedTable:
    """An n x m grid of cells plus provenance of how it was found."""

    cells: tuple[tuple[Cell, ...], ...]
    strategy: str = ""
    pattern_size: tuple[int, int] = (0, 0)
    elapsed: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def n(self) -> int:
        return len(self.cells)

    @property
    def m(self) -> int:
        return len(self.cells[0]) if self.cells else 0

    def token_rows(self) -> list[list[tuple[str, ...]]]:
        return [[c.tokens for c in row] for row in self.cells]

    def to_json(self) -> dict[str, Any]:
        out_rows = []
        for row in self.cells:
            out_row = []
            for c in row:
                d: dict[str, Any] = {"tokens": list(c.tokens), "text": c.text}
                if c.placeholder is not None:
                    d["placeholder"] = c.placeholder
                out_row.append(d)
            out_rows.append(out_row)
        return {"n": self.n, "m": self.m, "cells": out_rows}

    @classmethod
    def from_json(cls, obj: Any) -> "ExtractedTable":
        if obj is None:
            return cls(cells=())
        if not isinstance(obj, dict) or not isinstance(obj.get("cells"), list):
            raise SchemaError("table must be an object with a 'cells' list")
        rows = []
        for row in obj["cells"]:
            if not isinstance(row, list):
                raise SchemaError("table row must be a list")
            cells = []
            for c in row:
                if not isinstance(c, dict) or not isinstance(c.get("tokens"), list):
                    raise SchemaError("cell must be an object with a 'tokens' list")
                if not all(isinstance(t, str) for t in c["tokens"]):
                    raise SchemaError("cell token ids must be strings")
                cells.append(Cell(tuple(c["tokens"]), str(c.get("text", "")), c.get("placeholder")))
            rows.append(tuple(cells))
        if len({len(r) for r in rows}) > 1:
            raise RaggedTableError("output table rows differ in length")
        return cls(cells=tuple(rows))


# ---------------------------------------------------------------- loading


def _parse_json(data: bytes | str) -> Any:
    try:
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        return json.loads(data)
    except (UnicodeDecodeError, json.JSONDecodeError, RecursionError) as exc:
        raise SchemaError(f"not valid UTF-8 JSON: {exc}") from None


def _number(obj: dict, key: str, where: str) -> float:
    if key not in obj:
        raise SchemaError(f"{where}: missing field {key!r}")
    v = obj[key]
    # bool is an int subclass; reject it explicitly
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"{where}: field {key!r} must be a number")
    try:
        v = float(v)
    except OverflowError:
        raise SchemaError(f"{where}: field {key!r} out of range") from None
    if not math.isfinite(v):
        raise SchemaError(f"{where}: field {key!r} must be finite")
    return v


def _string(obj: dict, key: str, where: str) -> str:
    if key not in obj:
        raise SchemaError(f"{where}: missing field {key!r}")
    if not isinstance(obj[key], str):
        raise SchemaError(f"{where}: field {key!r} must be a string")
    return obj[key]


def _parse_page(obj: Any, base_dir: Optional[Path]) -> Page:
    if not isinstance(obj, dict):
        raise SchemaError("token file must be a JSON object")
    page = obj.get("page")
    if not isinstance(page, dict):
        raise SchemaError("missing 'page' object")
    width = _number(page, "width", "page")
    height = _number(page, "height", "page")
    if width <= 0 or height <= 0:
        raise GeometryError("page dimensions must be positive")
    raw_tokens = obj.get("tokens")
    if not isinstance(raw_tokens, list):
        raise SchemaError("missing 'tokens' list")
    tokens = []
    for k, t in enumerate(raw_tokens):
        where = f"tokens[{k}]"
        if not isinstance(t, dict):
            raise SchemaError(f"{where}: must be an object")
        tokens.append(
            Token(
                id=_string(t, "id", where),
                text=_string(t, "text", where),
                x=_number(t, "x", where),
                end_x=_number(t, "end_x", where),
                y=_number(t, "y", where),
                end_y=_number(t, "end_y", where),
            )
        )
    raster = None
    if obj.get("raster") is not None:
        r = obj["raster"]
        if not isinstance(r, dict):
            raise SchemaError("'raster' must be an object")
        path = Path(_string(r, "path", "raster"))
        scale = _number(r, "scale", "raster")
        if scale <= 0:
            raise SchemaError("raster scale must be > 0")
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
        try:
            pixels = read_pgm(path.read_bytes())
        except OSError as exc:
            raise SchemaError(f"cannot read raster {path}: {exc}") from None
        raster = Raster(pixels, scale)
    return Page(width, height, tuple(tokens), raster)


def load_document(data: bytes | str, base_dir: str | os.PathLike | None = None) -> Page:
    """Parse a token file. Raster paths resolve against ``base_dir``."""
    obj = _parse_json(data)
    return _parse_page(obj, Path(base_dir) if base_dir is not None else None)


def load_documents(data: bytes | str, base_dir: str | os.PathLike | None = None) -> list[Page]:
    """Like :func:`load_document` but also accepts ``{"pages": [...]}`` multi-page files."""
    obj = _parse_json(data)
    base = Path(base_dir) if base_dir is not None else None
    if isinstance(obj, dict) and "pages" in obj:
        if not isinstance(obj["pages"], list):
            raise SchemaError("'pages' must be a list")
        return [_parse_page(p, base) for p in obj["pages"]]
    return [_parse_page(obj, base)]


def load_page_file(path: str | os.PathLike) -> Page:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from None
    return load_document(data, base_dir=path.parent)


def page_to_json(page: Page, raster_path: Optional[str] = None) -> dict[str, Any]:
    out: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "page": {"width": page.width, "height": page.height},
        "tokens": [
            {"id": t.id, "text": t.text, "x": t.x, "end_x": t.end_x, "y": t.y, "end_y": t.end_y}
            for t in page.tokens
        ],
    }
    if raster_path is not None and page.raster is not None:
        out["raster"] = {"path": raster_path, "scale": page.raster.scale}
    return out


def dump_document(page: Page, raster_path: Optional[str] = None) -> bytes:
    return json.dumps(page_to_json(page, raster_path), indent=1, ensure_ascii=False).encode("utf-8")


def load_ground_truth(data: bytes | str, page: Optional[Page] = None) -> list[GroundTruthTable]:
    """Parse a ground-truth file; with ``page`` given, every token id must exist on it."""
    obj = _parse_json(data)
    if not isinstance(obj, dict) or not isinstance(obj.get("tables"), list):
        raise SchemaError("ground truth must be an object with a 'tables' list")
    known = {t.id for t in page.tokens} if page is not None else None
    tables = []
    for k, tbl in enumerate(obj["tables"]):
        if not isinstance(tbl, dict) or not isinstance(tbl.get("rows"), list):
            raise SchemaError(f"tables[{k}]: missing 'rows' list")
        rows = []
        for row in tbl["rows"]:
            if not isinstance(row, list):
                raise SchemaError(f"tables[{k}]: each row must be a list of cells")
            cells = []
            for cell in row:
                if not isinstance(cell, list) or not all(isinstance(t, str) for t in cell):
                    raise SchemaError(f"tables[{k}]: each cell must be a list of token ids")
                for tid in cell:
                    if known is not None and tid not in known:
                        raise DanglingTokenError(f"tables[{k}]: unknown token id {tid!r}")
                cells.append(tuple(cell))
            rows.append(tuple(cells))
        if len({len(r) for r in rows}) > 1:
            raise RaggedTableError(f"tables[{k}]: row lengths {[len(r) for r in rows]}")
        tables.append(GroundTruthTable(tuple(rows)))
    return tables


def dump_ground_truth(tables: Iterable[GroundTruthTable]) -> bytes:
    obj = {"format_version": FORMAT_VERSION, "tables": [t.to_json() for t in tables]}
    return json.dumps(obj, indent=1).encode("utf-8")


# ------------------------------------------------------------------- PGM


def read_pgm(data: bytes) -> np.ndarray:
    """Decode a binary (P5) 8-bit PGM."""
    fields: list[bytes] = []
    pos = 0
    n = len(data)
    while len(fields) < 4:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise SchemaError("truncated PGM header")
        fields.append(data[start:pos])
    pos += 1  # single whitespace byte after maxval
    if fields[0] != b"P5":
        raise SchemaError("raster must be a binary P5 PGM")
    try:
        w, h, maxval = (int(f) for f in fields[1:])
    except ValueError:
        raise SchemaError("bad PGM header") from None
    if w <= 0 or h <= 0 or not (0 < maxval < 256):
        raise SchemaError("only 8-bit PGM rasters are supported")
    body = data[pos : pos + w * h]
    if len(body) != w * h:
        raise SchemaError("truncated PGM body")
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w).copy()


def write_pgm(pixels: np.ndarray) -> bytes:
    arr = np.ascontiguousarray(pixels, dtype=np.uint8)
    h, w = arr.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + arr.tobytes()
