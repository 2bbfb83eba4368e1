"""Scoring of an extracted table against a labeled ground truth table."""

from __future__ import annotations

from collections import Counter
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

from .document import ExtractedTable, GroundTruthTable


class ZeroExpectedColumns(ValueError):
    pass


# with these coefficients a perfect structural match scores 2/3
PERFECT_STRUCTURE = 2.0 / 3.0


def table_accuracy(t_w: int, t_f: int, t_t: int) -> float:
    """Token-level accuracy: a precision-like factor times a recall-like factor."""
    if t_w == 0 and t_f == 0:
        return 1.0
    if t_w + t_f == 0 or t_w + t_t == 0:
        return 0.0
    return (1 - abs(t_w - t_f) / (t_w + t_f)) * (1 - abs(t_w - t_t) / (t_w + t_t))


def table_accuracy_factors(t_w: int, t_f: int, t_t: int) -> tuple[float, float]:
    first = 1 - abs(t_w - t_f) / (t_w + t_f) if t_w + t_f else 1.0
    second = 1 - abs(t_w - t_t) / (t_w + t_t) if t_w + t_t else 1.0
    return first, second


def column_accuracy(c_c: int, c_p: int, c_w: int, c_t: int) -> float:
    if c_w <= 0:
        raise ZeroExpectedColumns("column accuracy needs at least one expected column")
    return (2 * c_c + c_p) / (3 * c_w) * (1 - abs(c_w - c_t) / (c_w + c_t))


def line_accuracy(l_c: int, l_p: int, l_w: int, l_t: int) -> float:
    if l_w <= 0:
        raise ZeroExpectedColumns("line accuracy needs at least one expected line")
    return column_accuracy(l_c, l_p, l_w, l_t)


def fitness(t_a: float, c_a: float, l_a: float) -> float:
    return (t_a + c_a * l_a) / 2


def normalize_structure(acc: float) -> float:
    """Rescale a column/line accuracy so that a perfect match reads 1.0."""
    return min(1.0, acc / PERFECT_STRUCTURE)


@dataclass(frozen=True)
class ScoreBreakdown:
    t_w: int
    t_f: int
    t_t: int
    c_c: int
    c_p: int
    c_w: int
    c_t: int
    l_c: int
    l_p: int
    l_w: int
    l_t: int
    t_a: float
    c_a: float
    l_a: float
    f: float
    normalized: bool = False

    def to_json(self) -> dict:
        return asdict(self)


def _match_groups(found: Sequence[frozenset[str]], expected: Sequence[frozenset[str]]) -> tuple[int, int]:
    """Count (complete, partial) found groups, each expected group used at most once."""
    pairs = []
    for j, fs in enumerate(found):
        equal = [k for k, es in enumerate(expected) if es == fs]
        if equal:
            # identical groups (e.g. several empty lines) must pair one-to-one
            pairs.extend((len(fs), j, k, True) for k in equal)
            continue
        touching = [k for k, es in enumerate(expected) if es & fs]
        if len(touching) == 1:
            k = touching[0]
            pairs.append((len(fs & expected[k]), j, k, False))
    pairs.sort(key=lambda p: (-p[0], p[1], p[2]))
    used_found: set[int] = set()
    used_exp: set[int] = set()
    complete = partial = 0
    for _, j, k, is_complete in pairs:
        if j in used_found or k in used_exp:
            continue
        used_found.add(j)
        used_exp.add(k)
        if is_complete:
            complete += 1
        else:
            partial += 1
    return complete, partial


def _groups(rows: Sequence[Sequence[Sequence[str]]], by_column: bool) -> list[frozenset[str]]:
    if not rows:
        return []
    if by_column:
        return [frozenset(t for row in rows for t in row[j]) for j in range(len(rows[0]))]
    return [frozenset(t for cell in row for t in cell) for row in rows]


def _structure_accuracy(complete: int, partial: int, expected: int, found: int) -> float:
    if expected == 0:
        return 1.0 if found == 0 else 0.0
    return column_accuracy(complete, partial, expected, found)


def score(
    output: Optional[ExtractedTable], gt: Optional[GroundTruthTable], normalized: bool = False
) -> ScoreBreakdown:
    """Score ``output`` against ``gt``; either may be absent (treated as an empty table)."""
    out_rows = output.token_rows() if output is not None else []
    gt_rows = [list(r) for r in gt.rows] if gt is not None else []

    out_tokens = Counter(t for row in out_rows for cell in row for t in cell)
    gt_tokens = Counter(t for row in gt_rows for cell in row for t in cell)
    t_w, t_f = sum(gt_tokens.values()), sum(out_tokens.values())
    t_t = sum((out_tokens & gt_tokens).values())

    found_cols, exp_cols = _groups(out_rows, True), _groups(gt_rows, True)
    found_lines, exp_lines = _groups(out_rows, False), _groups(gt_rows, False)
    c_c, c_p = _match_groups(found_cols, exp_cols)
    l_c, l_p = _match_groups(found_lines, exp_lines)
    c_w, c_t, l_w, l_t = len(exp_cols), len(found_cols), len(exp_lines), len(found_lines)

    t_a = table_accuracy(t_w, t_f, t_t)
    c_a = _structure_accuracy(c_c, c_p, c_w, c_t)
    l_a = _structure_accuracy(l_c, l_p, l_w, l_t)
    if normalized:
        c_a, l_a = normalize_structure(c_a), normalize_structure(l_a)
    return ScoreBreakdown(
        t_w, t_f, t_t, c_c, c_p, c_w, c_t, l_c, l_p, l_w, l_t, t_a, c_a, l_a, fitness(t_a, c_a, l_a), normalized
    )


def best_ground_truth(output: Optional[ExtractedTable], gts: Sequence[GroundTruthTable]) -> Optional[GroundTruthTable]:
    """The ground-truth table sharing the most tokens with ``output`` (first on ties)."""
    if not gts:
        return None
    if output is None:
        return gts[0]
    found = Counter(t for row in output.token_rows() for cell in row for t in cell)

    def overlap(g: GroundTruthTable) -> int:
        return sum((found & Counter(t for row in g.rows for cell in row for t in cell)).values())

    return max(gts, key=overlap)


def match_tables(
    outputs: Sequence[ExtractedTable], gts: Sequence[GroundTruthTable]
) -> list[tuple[Optional[ExtractedTable], Optional[GroundTruthTable]]]:
    """Pair output and ground-truth tables greedily by token overlap; leftovers pair with None."""
    def toks(rows) -> Counter:
        return Counter(t for row in rows for cell in row for t in cell)

    o_toks = [toks(o.token_rows()) for o in outputs]
    g_toks = [toks(g.rows) for g in gts]
    pairs = sorted(
        ((sum((a & b).values()), i, k) for i, a in enumerate(o_toks) for k, b in enumerate(g_toks)),
        key=lambda p: (-p[0], p[1], p[2]),
    )
    used_o: set[int] = set()
    used_g: set[int] = set()
    out: list[tuple[Optional[ExtractedTable], Optional[GroundTruthTable]]] = []
    for ov, i, k in pairs:
        if ov == 0 or i in used_o or k in used_g:
            continue
        used_o.add(i)
        used_g.add(k)
        out.append((outputs[i], gts[k]))
    out += [(outputs[i], None) for i in range(len(outputs)) if i not in used_o]
    out += [(None, gts[k]) for k in range(len(gts)) if k not in used_g]
    return out
