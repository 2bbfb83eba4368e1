"""Pattern graphs: table templates of a given family and size."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import product
from typing import Iterable

from .table_graph import TypedGraph


class BadSize(ValueError):
    pass


class BadOmission(ValueError):
    pass


class Family(enum.Enum):
    CORNER_LEFT_TOP = "corner-left-top"
    FULL_GRID = "full-grid"
    MISSING_CELLS = "missing-cells"
    BORDER_LEFT_TOP = "border-left-top"

    @classmethod
    def parse(cls, name: "str | Family") -> "Family":
        if isinstance(name, Family):
            return name
        try:
            return cls(name.strip().lower().replace("_", "-"))
        except ValueError:
            choices = ", ".join(f.value for f in cls)
            raise ValueError(f"unknown pattern family {name!r} (choose from {choices})") from None


# Small demo omission set for 4x4 missing-cells patterns.
DEMO_OMISSION_4X4 = frozenset({(1, 2), (2, 1)})


@dataclass(frozen=True)
class Pattern:
    family: Family
    n: int
    m: int
    graph: TypedGraph
    omit: frozenset[tuple[int, int]] = frozenset()

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        return self.graph.edges

    @property
    def size(self) -> tuple[int, int]:
        return self.n, self.m


def required_cells(family: Family, n: int, m: int, omit: Iterable[tuple[int, int]] = ()) -> frozenset:
    family = Family.parse(family)
    if n < 1 or m < 1:
        raise BadSize(f"pattern size must be at least 1x1, got {n}x{m}")
    omit = frozenset(omit)
    if family is Family.CORNER_LEFT_TOP:
        return frozenset({(0, 0)})
    if family is Family.FULL_GRID:
        return frozenset(product(range(n), range(m)))
    if family is Family.BORDER_LEFT_TOP:
        return frozenset({(0, j) for j in range(m)} | {(i, 0) for i in range(n)})
    for i, j in omit:
        if not (0 <= i < n and 0 <= j < m):
            raise BadOmission(f"omitted cell ({i}, {j}) outside a {n}x{m} pattern")
    if (0, 0) in omit:
        raise BadOmission("the top-left cell cannot be omitted")
    return frozenset(product(range(n), range(m))) - omit


def make_pattern(family: "Family | str", n: int, m: int, omit: Iterable[tuple[int, int]] = ()) -> Pattern:
    family = Family.parse(family)
    omit = frozenset(omit) if family is Family.MISSING_CELLS else frozenset()
    edges = required_cells(family, n, m, omit)
    return Pattern(family, n, m, TypedGraph(n, m, edges), omit)


def clip_omission(omit: Iterable[tuple[int, int]], n: int, m: int) -> frozenset[tuple[int, int]]:
    """Drop omitted cells that fall outside an n x m pattern."""
    return frozenset((i, j) for i, j in omit if i < n and j < m and (i, j) != (0, 0))


def shrink_sequence(n_max: int, m_max: int, n_min: int = 1, m_min: int = 1) -> list[tuple[int, int]]:
    """Pattern sizes from largest to smallest: area desc, then more rows, then more columns."""
    if not (n_max >= n_min >= 1 and m_max >= m_min >= 1):
        raise BadSize(f"bad shrink bounds ({n_max},{m_max}) -> ({n_min},{m_min})")
    sizes = product(range(n_min, n_max + 1), range(m_min, m_max + 1))
    return sorted(sizes, key=lambda s: (-s[0] * s[1], -s[0], -s[1]))
