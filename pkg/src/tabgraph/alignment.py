"""Alignment relations between tokens and their normalization into row/column labels.

The raw relations are not transitive: a slow drift of baselines down the page
chains tokens that are visibly on different lines. Labels are produced by a
greedy chaining pass that caps how far a chain may drift, which turns the
relations into equivalence classes.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

from .document import Page, SchemaError, Token

Auto = str  # the literal "auto"
Param = Union[float, Auto]

TAU_Y_FACTOR = 0.6
DRIFT_FACTOR = 1.5
TAU_X_FACTOR = 0.5
# used when a page has only degenerate (zero-size) boxes
FALLBACK_SIZE = 1.0


def related_horizontal(t1: Token, t2: Token, tau_y: float) -> bool:
    return abs(t1.y - t2.y) < tau_y


def related_vertical_threshold(t1: Token, t2: Token, tau_x: float) -> bool:
    return abs(t1.x - t2.x) < tau_x


def related_vertical_interval(t1: Token, t2: Token) -> bool:
    """True iff the left edge of either token lies inside the other's X-interval."""
    return t2.x <= t1.x <= t2.end_x or t1.x <= t2.x <= t1.end_x


@dataclass(frozen=True)
class AlignmentConfig:
    tau_y: Param = "auto"
    tau_x: Param = "auto"
    chain_drift_limit: Param = "auto"

    def __post_init__(self) -> None:
        for name in ("tau_y", "tau_x", "chain_drift_limit"):
            v = getattr(self, name)
            if v == "auto":
                continue
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
                raise ValueError(f"{name} must be > 0 or 'auto', got {v!r}")

    def resolve(self, page: Page) -> "AlignmentConfig":
        """Replace every "auto" by its scale-free default for ``page``."""
        heights = [t.height for t in page.tokens]
        widths = [t.width for t in page.tokens]
        med_h = statistics.median(heights) if heights else 0.0
        med_w = statistics.median(widths) if widths else 0.0
        med_h = med_h if med_h > 0 else FALLBACK_SIZE
        med_w = med_w if med_w > 0 else FALLBACK_SIZE

        def pick(v: Param, default: float) -> float:
            return float(default if v == "auto" else v)

        return AlignmentConfig(
            tau_y=pick(self.tau_y, TAU_Y_FACTOR * med_h),
            tau_x=pick(self.tau_x, TAU_X_FACTOR * med_w),
            chain_drift_limit=pick(self.chain_drift_limit, DRIFT_FACTOR * med_h),
        )

    @classmethod
    def from_mapping(cls, obj: Mapping) -> "AlignmentConfig":
        unknown = set(obj) - {"tau_y", "tau_x", "chain_drift_limit"}
        if unknown:
            raise SchemaError(f"unknown alignment keys: {sorted(unknown)}")
        try:
            return cls(**obj)
        except (TypeError, ValueError) as exc:
            raise SchemaError(str(exc)) from None

    @classmethod
    def from_json(cls, data: bytes | str) -> "AlignmentConfig":
        try:
            obj = json.loads(data)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise SchemaError(str(exc)) from None
        if not isinstance(obj, dict):
            raise SchemaError("alignment config must be an object")
        return cls.from_mapping(obj)


@dataclass(frozen=True)
class LabeledDocument:
    page: Page
    row_label: Mapping[str, int]
    col_label: Mapping[str, int]
    row_count: int
    col_count: int

    def label(self, token_id: str) -> tuple[int, int]:
        return self.row_label[token_id], self.col_label[token_id]

    def cells(self) -> dict[tuple[int, int], list[str]]:
        """Token ids per (row, col) label pair, each list ordered by X then id."""
        out: dict[tuple[int, int], list[Token]] = {}
        for t in self.page.tokens:
            out.setdefault(self.label(t.id), []).append(t)
        return {k: [t.id for t in sorted(v, key=lambda t: (t.x, t.id))] for k, v in out.items()}


def _index_classes(classes: list[list[Token]], key) -> dict[str, int]:
    # order classes by centroid, ties by smallest member id
    def centroid(cls: list[Token]) -> tuple[float, str]:
        return (sum(key(t) for t in cls) / len(cls), min(t.id for t in cls))

    ordered = sorted(classes, key=centroid)
    return {t.id: k for k, cls in enumerate(ordered) for t in cls}


def assign_row_labels(page: Page, cfg: AlignmentConfig) -> dict[str, int]:
    cfg = cfg.resolve(page)
    tokens = sorted(page.tokens, key=lambda t: (t.y, t.id))
    classes: list[list[Token]] = []
    for t in tokens:
        if classes:
            chain = classes[-1]
            if related_horizontal(chain[-1], t, cfg.tau_y) and t.y - chain[0].y <= cfg.chain_drift_limit:
                chain.append(t)
                continue
        classes.append([t])
    return _index_classes(classes, lambda t: t.y)


def column_drift(members: Sequence[Token]) -> float:
    """How far a chain of X-intervals spreads beyond its widest member."""
    lo = min(t.x for t in members)
    hi = max(t.end_x for t in members)
    return (hi - lo) - max(t.width for t in members)


def assign_col_labels(page: Page, cfg: AlignmentConfig) -> dict[str, int]:
    cfg = cfg.resolve(page)
    tokens = sorted(page.tokens, key=lambda t: (t.x, t.end_x, t.id))
    classes: list[list[Token]] = []
    reach = float("-inf")  # max end_x of the open class
    lo = hi = widest = 0.0
    for t in tokens:
        if classes and t.x <= reach:
            # t relates to at least one member: every member starts at or before t.x
            n_lo, n_hi, n_w = min(lo, t.x), max(hi, t.end_x), max(widest, t.width)
            if (n_hi - n_lo) - n_w <= cfg.chain_drift_limit:
                classes[-1].append(t)
                reach = max(reach, t.end_x)
                lo, hi, widest = n_lo, n_hi, n_w
                continue
        classes.append([t])
        reach, lo, hi, widest = t.end_x, t.x, t.end_x, t.width
    return _index_classes(classes, lambda t: t.x)


def label_document(page: Page, cfg: AlignmentConfig | None = None) -> LabeledDocument:
    cfg = cfg or AlignmentConfig()
    rows = assign_row_labels(page, cfg)
    cols = assign_col_labels(page, cfg)
    return LabeledDocument(
        page=page,
        row_label=rows,
        col_label=cols,
        row_count=len(set(rows.values())),
        col_count=len(set(cols.values())),
    )
