"""Order-preserving typed subgraph search for table patterns.

A pattern embeds into a target graph when its lines and columns can be mapped
to target lines and columns by strictly increasing maps such that every
required intersection edge of the pattern lands on an intersection edge of
the target. Absent pattern edges impose nothing (non-induced matching). With
``adjacent=True`` the maps must also send consecutive vertices to consecutive
vertices.

The solver branches on column assignments only. Once every column is fixed,
each pattern line has a bitset of admissible target lines, and an increasing
choice exists iff the greedy "lowest admissible line above the previous one"
succeeds, so lines never need backtracking. The same greedy test prunes
every partial column assignment.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional

from .pattern import Family, Pattern, clip_omission, make_pattern, shrink_sequence
from .table_graph import TypedGraph

ORACLE_LIMIT = 12


class OracleTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class Embedding:
    line_map: tuple[int, ...]
    col_map: tuple[int, ...]

    @property
    def size(self) -> tuple[int, int]:
        return len(self.line_map), len(self.col_map)


@dataclass(frozen=True)
class SearchBudget:
    wall_limit: float
    best_so_far: Optional[tuple[Pattern, Embedding]] = None

    def __post_init__(self) -> None:
        if not self.wall_limit > 0:
            raise ValueError(f"wall_limit must be > 0, got {self.wall_limit}")


@dataclass(frozen=True)
class SearchResult:
    pattern: Optional[Pattern]
    embedding: Optional[Embedding]
    timeout: bool
    elapsed: float
    # True when the result was salvaged from a partial assignment after a timeout
    partial: bool = False
    sizes_tried: int = 0

    @property
    def found(self) -> bool:
        return self.embedding is not None

    @property
    def exhausted(self) -> bool:
        return self.embedding is None and not self.timeout

    @property
    def area(self) -> int:
        return 0 if self.pattern is None else self.pattern.n * self.pattern.m


class _Clock:
    __slots__ = ("start", "deadline")

    def __init__(self, wall_limit: float, start: Optional[float] = None):
        self.start = time.perf_counter() if start is None else start
        self.deadline = self.start + wall_limit

    def expired(self) -> bool:
        return time.perf_counter() >= self.deadline

    def elapsed(self) -> float:
        return time.perf_counter() - self.start


class _Timeout(Exception):
    pass


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _greedy_lines(cand: list[int], adjacent: bool) -> Optional[list[int]]:
    """Lowest strictly increasing choice of one bit per bitset, or None."""
    if adjacent:
        window = -1
        for i, c in enumerate(cand):
            window &= c >> i
            if not window:
                return None
        start = (window & -window).bit_length() - 1
        return [start + i for i in range(len(cand))]
    rows = []
    pos = -1
    for c in cand:
        rest = c >> (pos + 1)
        if not rest:
            return None
        pos += (rest & -rest).bit_length()
        rows.append(pos)
    return rows


class _Solver:
    def __init__(self, pattern: Pattern, target: TypedGraph, clock: _Clock, adjacent: bool, min_cols: int):
        self.pattern = pattern
        self.n, self.m = pattern.n, pattern.m
        self.N, self.M = target.n_lines, target.n_cols
        self.adjacent = adjacent
        self.clock = clock
        self.min_cols = min_cols
        self.col_mask = target.col_masks()
        self.req_rows: list[list[int]] = [[] for _ in range(self.m)]
        for i, j in sorted(pattern.edges):
            self.req_rows[j].append(i)
        deg = [len(r) for r in self.req_rows]
        self.deg = deg
        # most constrained pattern columns first
        self.var_order = sorted(range(self.m), key=lambda j: (-deg[j], j))
        tdeg = [_popcount(mk) for mk in self.col_mask]
        self.tdeg = tdeg
        self.val_order = sorted(range(self.M), key=lambda t: (-tdeg[t], t))
        self.assign = [-1] * self.m
        self.best_partial: Optional[tuple[int, tuple[int, ...], tuple[int, ...], tuple[int, ...]]] = None

    def run(self) -> Optional[Embedding]:
        if self.n > self.N or self.m > self.M:
            return None
        full = (1 << self.N) - 1
        cand = [full] * self.n
        if _greedy_lines(cand, self.adjacent) is None:
            return None
        return self._extend(0, cand)

    def _window(self, j: int) -> tuple[int, int]:
        g = self.assign
        lo, hi = j, self.M - (self.m - j)
        for jl in range(j - 1, -1, -1):
            if g[jl] >= 0:
                lo = g[jl] + (j - jl)
                if self.adjacent:
                    hi = min(hi, lo)
                break
        for jr in range(j + 1, self.m):
            if g[jr] >= 0:
                hi = min(hi, g[jr] - (jr - j))
                if self.adjacent:
                    lo = max(lo, hi)
                break
        return lo, hi

    def _extend(self, k: int, cand: list[int]) -> Optional[Embedding]:
        if self.clock.expired():
            raise _Timeout
        if k == self.m:
            rows = _greedy_lines(cand, self.adjacent)
            return Embedding(tuple(rows), tuple(self.assign))
        j = self.var_order[k]
        lo, hi = self._window(j)
        if lo > hi:
            return None
        need = self.deg[j]
        req = self.req_rows[j]
        for t in self.val_order:
            if t < lo or t > hi or self.tdeg[t] < need:
                continue
            mask = self.col_mask[t]
            new = list(cand)
            ok = True
            for i in req:
                new[i] &= mask
                if not new[i]:
                    ok = False
                    break
            if not ok:
                continue
            rows = _greedy_lines(new, self.adjacent)
            if rows is None:
                continue
            self.assign[j] = t
            if k + 1 < self.m:
                self._note_partial(k + 1, rows)
            found = self._extend(k + 1, new)
            if found is not None:
                return found
            self.assign[j] = -1
        return None

    def _note_partial(self, k: int, rows: list[int]) -> None:
        if k < self.min_cols or (self.best_partial is not None and self.best_partial[0] >= k):
            return
        cols = tuple(j for j in range(self.m) if self.assign[j] >= 0)
        self.best_partial = (k, cols, tuple(self.assign[j] for j in cols), tuple(rows))


def _restrict(pattern: Pattern, cols: tuple[int, ...]) -> Optional[Pattern]:
    """The pattern of the same family on a subset of columns, if the restriction is one."""
    pos = {j: p for p, j in enumerate(cols)}
    edges = frozenset((i, pos[j]) for i, j in pattern.edges if j in pos)
    omit = frozenset((i, pos[j]) for i, j in pattern.omit if j in pos)
    try:
        sub = make_pattern(pattern.family, pattern.n, len(cols), omit)
    except ValueError:
        return None
    return sub if sub.edges == edges else None


def find_embedding(
    pattern: Pattern,
    target: TypedGraph,
    budget: SearchBudget | float = 300.0,
    adjacent: bool = False,
) -> SearchResult:
    if not isinstance(budget, SearchBudget):
        budget = SearchBudget(float(budget))
    clock = _Clock(budget.wall_limit)
    solver = _Solver(pattern, target, clock, adjacent, min_cols=pattern.m + 1)
    try:
        emb = solver.run()
    except _Timeout:
        return SearchResult(None, None, True, clock.elapsed(), sizes_tried=1)
    return SearchResult(pattern if emb else None, emb, False, clock.elapsed(), sizes_tried=1)


def brute_force_embedding(pattern: Pattern, target: TypedGraph, adjacent: bool = False) -> Optional[Embedding]:
    """Exhaustive enumeration of increasing line/column maps (test oracle)."""
    if target.n_lines > ORACLE_LIMIT or target.n_cols > ORACLE_LIMIT:
        raise OracleTooLarge(f"oracle limited to {ORACLE_LIMIT}x{ORACLE_LIMIT} targets")
    n, m, N, M = pattern.n, pattern.m, target.n_lines, target.n_cols
    if n > N or m > M:
        return None
    tedges = set(target.edges)
    needs = {i: [j for (a, j) in pattern.edges if a == i] for i in range(n)}

    def consecutive(seq: tuple[int, ...]) -> bool:
        return all(b == a + 1 for a, b in zip(seq, seq[1:]))

    for cols in combinations(range(M), m):
        if adjacent and not consecutive(cols):
            continue

        def lines_from(i: int, lo: int, acc: tuple[int, ...]) -> Optional[tuple[int, ...]]:
            if i == n:
                return acc
            for r in range(lo, N):
                if adjacent and i > 0 and r != acc[-1] + 1:
                    break
                if all((r, cols[j]) in tedges for j in needs[i]):
                    got = lines_from(i + 1, r + 1, acc + (r,))
                    if got is not None:
                        return got
            return None

        lines = lines_from(0, 0, ())
        if lines is not None:
            return Embedding(lines, cols)
    return None


def find_largest(
    family: Family | str,
    target: TypedGraph,
    bounds: Optional[tuple[int, int, int, int]] = None,
    budget: SearchBudget | float = 300.0,
    omit: Iterable[tuple[int, int]] = (),
    adjacent: bool = False,
) -> SearchResult:
    """Largest pattern of ``family`` embedding into ``target``.

    ``bounds`` is ``(n_max, m_max, n_min, m_min)``; maxima are clamped to the
    target. Sizes are tried in :func:`shrink_sequence` order and the first hit
    is returned. If the clock runs out, the best partial result seen so far
    (or ``budget.best_so_far``) is returned with ``timeout=True``.
    """
    family = Family.parse(family)
    if not isinstance(budget, SearchBudget):
        budget = SearchBudget(float(budget))
    clock = _Clock(budget.wall_limit)
    omit = frozenset(omit)
    n_max, m_max, n_min, m_min = bounds or (target.n_lines, target.n_cols, 1, 1)
    n_max, m_max = min(n_max, target.n_lines), min(m_max, target.n_cols)
    n_min, m_min = max(1, n_min), max(1, m_min)

    best: Optional[tuple[Pattern, Embedding]] = budget.best_so_far
    if n_max < n_min or m_max < m_min:
        return SearchResult(None, None, False, clock.elapsed())

    def area(pe: Optional[tuple[Pattern, Embedding]]) -> tuple[int, int]:
        return (0, 0) if pe is None else (pe[0].n * pe[0].m, pe[0].n)

    tried = 0
    for n, m in shrink_sequence(n_max, m_max, n_min, m_min):
        if best is not None and area(best) >= (n * m, n):
            # nothing left in the sequence can beat what we already hold
            break
        if clock.expired():
            return _timed_out(best, clock, tried)
        tried += 1
        pattern = make_pattern(family, n, m, clip_omission(omit, n, m))
        solver = _Solver(pattern, target, clock, adjacent, min_cols=m_min)
        try:
            emb = solver.run()
        except _Timeout:
            _absorb_partial(solver, pattern)
            cand = _partial_result(solver, pattern)
            if cand is not None and area(cand) > area(best):
                best = cand
            return _timed_out(best, clock, tried)
        cand = _partial_result(solver, pattern)
        if cand is not None and area(cand) > area(best):
            best = cand
        if emb is not None:
            return SearchResult(pattern, emb, False, clock.elapsed(), sizes_tried=tried)
    # every larger size failed exhaustively, so a held result is exact
    if best is None:
        return SearchResult(None, None, False, clock.elapsed(), sizes_tried=tried)
    return SearchResult(best[0], best[1], False, clock.elapsed(), sizes_tried=tried)


def _absorb_partial(solver: _Solver, pattern: Pattern) -> None:
    # the interrupted branch may hold a deeper assignment than any recorded one
    k = sum(1 for g in solver.assign if g >= 0)
    if k and (solver.best_partial is None or k > solver.best_partial[0]) and k >= solver.min_cols:
        cols = tuple(j for j in range(solver.m) if solver.assign[j] >= 0)
        cand = [(1 << solver.N) - 1] * solver.n
        for j in cols:
            for i in solver.req_rows[j]:
                cand[i] &= solver.col_mask[solver.assign[j]]
        rows = _greedy_lines(cand, solver.adjacent)
        if rows is not None:
            solver.best_partial = (k, cols, tuple(solver.assign[j] for j in cols), tuple(rows))


def _partial_result(solver: _Solver, pattern: Pattern) -> Optional[tuple[Pattern, Embedding]]:
    if solver.best_partial is None:
        return None
    _, cols, targets, rows = solver.best_partial
    sub = _restrict(pattern, cols)
    if sub is None:
        return None
    return sub, Embedding(rows, targets)


def _timed_out(best: Optional[tuple[Pattern, Embedding]], clock: _Clock, tried: int) -> SearchResult:
    if best is None:
        return SearchResult(None, None, True, clock.elapsed(), sizes_tried=tried)
    return SearchResult(best[0], best[1], True, clock.elapsed(), partial=True, sizes_tried=tried)


def embedding_is_valid(pattern: Pattern, target: TypedGraph, emb: Embedding, adjacent: bool = False) -> bool:
    """Check the embedding invariants directly."""
    lm, cm = emb.line_map, emb.col_map
    if len(lm) != pattern.n or len(cm) != pattern.m:
        return False
    for seq, bound in ((lm, target.n_lines), (cm, target.n_cols)):
        if any(not 0 <= v < bound for v in seq):
            return False
        if any(b <= a for a, b in zip(seq, seq[1:])):
            return False
        if adjacent and any(b != a + 1 for a, b in zip(seq, seq[1:])):
            return False
    return all((lm[i], cm[j]) in target.edges for i, j in pattern.edges)


__all__ = [
    "Embedding",
    "OracleTooLarge",
    "SearchBudget",
    "SearchResult",
    "brute_force_embedding",
    "embedding_is_valid",
    "find_embedding",
    "find_largest",
]
