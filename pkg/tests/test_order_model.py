import random
from itertools import product

import pytest

from tabgraph.alignment import label_document
from tabgraph.order_model import (
    CellRef,
    TableCandidate,
    candidate_from_cells,
    full_columns,
    full_lines,
    is_well_formed,
    placeholder_id,
    precedes_col,
    precedes_line,
    precedes_table,
    repair,
    smallest_subtable,
)

from conftest import grid_page


def labeled(n, m, missing=()):
    return label_document(grid_page(n, m, missing=missing))


def test_line_order_definition():
    doc = labeled(2, 2)
    assert precedes_line("r0c0", "r1c0", doc)
    assert not precedes_line("r0c0", "r1c1", doc)
    assert not precedes_line("r0c0", "r0c0", doc)
    assert precedes_col("r0c0", "r0c1", doc)
    assert not precedes_col("r0c0", "r1c1", doc)


def test_table_order_definition():
    doc = labeled(2, 2)
    assert precedes_table("r0c0", "r1c1", doc)
    assert not precedes_table("r0c1", "r1c0", doc)
    assert not precedes_table("r1c0", "r0c1", doc)
    assert precedes_table("r1c0", "r1c0", doc)


def test_full_lines_and_columns():
    doc = labeled(2, 2)
    assert [len(s) for s in full_lines(doc)] == [2, 2]
    assert [len(s) for s in full_columns(doc)] == [2, 2]
    row = labeled(1, 5)
    assert [len(s) for s in full_lines(row)] == [5]
    ell = labeled(2, 2, missing={(1, 1)})
    assert full_lines(ell) == [frozenset({"r0c0", "r0c1"}), frozenset({"r1c0"})]
    assert full_columns(ell) == [frozenset({"r0c0", "r1c0"}), frozenset({"r0c1"})]


def test_full_lines_partition_the_tokens():
    rng = random.Random(3)
    for _ in range(20):
        missing = {(i, j) for i in range(6) for j in range(5) if rng.random() < 0.3}
        doc = labeled(6, 5, missing)
        for parts in (full_lines(doc), full_columns(doc)):
            flat = [t for s in parts for t in s]
            assert sorted(flat) == sorted(t.id for t in doc.page.tokens)


def test_smallest_subtable():
    doc = labeled(2, 2)
    whole = smallest_subtable("r0c0", "r1c1", doc)
    assert whole.rows == (0, 1) and whole.cols == (0, 1) and len(whole.cells) == 4
    one = smallest_subtable("r1c0", "r1c0", doc)
    assert one.rows == (1,) and one.cols == (0,) and one.tokens() == ["r1c0"]
    anti = smallest_subtable("r0c1", "r1c0", doc)
    assert anti.bottom.tokens == ("r0c0",) and anti.top.tokens == ("r1c1",)
    assert anti.is_lattice()


def test_well_formedness_examples():
    full = candidate_from_cells([0, 1], [0, 1], {(i, j): [f"{i}{j}"] for i in range(2) for j in range(2)})
    assert is_well_formed(full)
    holed = candidate_from_cells([0, 1], [0, 1], {(0, 0): ["a"], (0, 1): ["b"], (1, 0): ["c"]})
    assert not is_well_formed(holed)
    patched = TableCandidate(holed.rows, holed.cols, {**holed.cells, (1, 1): CellRef(1, 1, ())})
    assert is_well_formed(patched)


def test_repair_fills_the_hole():
    holed = candidate_from_cells([0, 1], [0, 1], {(0, 0): ["a"], (0, 1): ["b"], (1, 0): ["c"]})
    fixed = repair(holed)
    assert is_well_formed(fixed)
    assert fixed.cells[(1, 1)].is_placeholder
    assert fixed.cells[(1, 1)].ident == placeholder_id(1, 1) == "empty:1:1"
    assert repair(fixed) == fixed


def test_repair_of_sparse_three_by_three():
    cells = {(0, 0): ["a"], (0, 2): ["b"], (2, 0): ["c"], (2, 2): ["d"], (1, 1): ["e"], (0, 1): ["f"], (1, 0): ["g"]}
    fixed = repair(candidate_from_cells(range(3), range(3), cells))
    assert len(fixed.cells) == 9
    assert sum(c.is_placeholder for c in fixed.cells.values()) == 2


def test_repair_records_tokens_shared_between_rows():
    tc = TableCandidate((0, 1), (0,), {(0, 0): CellRef(0, 0, ("x",)), (1, 0): CellRef(1, 0, ("x", "y"))})
    fixed = repair(tc)
    assert fixed.duplicated == frozenset({"x"})
    assert fixed.cells[(0, 0)].tokens == ("x",) and fixed.cells[(1, 0)].tokens == ("x", "y")


def test_repair_rejects_empty_span():
    with pytest.raises(ValueError):
        repair(TableCandidate((), (0,), {}))


def _fuzz_candidate(rng):
    rows = sorted(rng.sample(range(10), rng.randint(1, 8)))
    cols = sorted(rng.sample(range(10), rng.randint(1, 8)))
    cells = {}
    counter = 0
    for r, c in product(rows, cols):
        if rng.random() < 0.6:
            k = rng.randint(1, 2)
            cells[(r, c)] = [f"t{counter + i}" for i in range(k)]
            counter += k
    return candidate_from_cells(rows, cols, cells)


def test_repair_fuzz_well_formed_idempotent_lossless():
    rng = random.Random(11)
    for _ in range(200):
        tc = _fuzz_candidate(rng)
        fixed = repair(tc)
        assert is_well_formed(fixed)
        assert repair(fixed) == fixed
        assert sorted(fixed.tokens()) == sorted(tc.tokens())
        for key, cell in tc.cells.items():
            assert fixed.cells[key] == cell


def _closure(pairs, universe):
    reach = set(pairs)
    changed = True
    while changed:
        changed = False
        for a, b in list(reach):
            for c in universe:
                if (b, c) in reach and (a, c) not in reach:
                    reach.add((a, c))
                    changed = True
    return reach


def test_table_order_is_closure_of_line_and_column_orders():
    for n, m in [(1, 1), (2, 3), (3, 3), (4, 2), (5, 5)]:
        doc = labeled(n, m)
        ids = [t.id for t in doc.page.tokens]
        base = {(a, b) for a in ids for b in ids if precedes_line(a, b, doc) or precedes_col(a, b, doc)}
        reach = _closure(base, ids) | {(a, a) for a in ids}
        table = {(a, b) for a in ids for b in ids if precedes_table(a, b, doc)}
        assert table == reach


def test_full_grid_candidate_is_a_lattice_with_bottom_and_top():
    doc = labeled(3, 4)
    tc = smallest_subtable("r0c0", "r2c3", doc)
    assert tc.is_lattice()
    assert tc.bottom.tokens == ("r0c0",) and tc.top.tokens == ("r2c3",)
    assert [c.tokens for c in tc.line(1)] == [("r1c0",), ("r1c1",), ("r1c2",), ("r1c3",)]
    assert [c.tokens for c in tc.column(2)] == [("r0c2",), ("r1c2",), ("r2c2",)]
