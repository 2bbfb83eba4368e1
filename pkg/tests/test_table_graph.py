import random

import pytest

from tabgraph.alignment import label_document
from tabgraph.document import Page
from tabgraph.table_graph import EmptyRegionError, TypedGraph, build_document_graph, hasse_arcs

from conftest import grid_page, page_of, tok


@pytest.mark.parametrize("n, arcs", [(4, [(0, 1), (1, 2), (2, 3)]), (1, []), (0, [])])
def test_hasse_arcs(n, arcs):
    assert hasse_arcs(n) == arcs


def test_full_two_by_two():
    g = build_document_graph(label_document(grid_page(2, 2)))
    assert (g.n_lines, g.n_cols) == (2, 2)
    assert len(g.arcs_l) == 1 and len(g.arcs_c) == 1 and len(g.edges) == 4


def test_l_shape_misses_one_intersection():
    g = build_document_graph(label_document(grid_page(2, 2, missing={(1, 1)})))
    assert g.edges == frozenset({(0, 0), (0, 1), (1, 0)})


def test_region_excluding_everything():
    with pytest.raises(EmptyRegionError):
        build_document_graph(label_document(grid_page(2, 2)), region=(900, 900, 950, 950))


def test_region_keeps_only_contained_tokens():
    doc = label_document(grid_page(3, 3))
    # columns are 60 apart, rows 20 apart, starting at 50
    g = build_document_graph(doc, region=(40, 40, 180, 80))
    assert (g.n_lines, g.n_cols) == (2, 3)
    assert g.cells[(1, 2)] == ("r1c2",)


def test_fixed_cuts_bucket_by_center_and_keep_empty_gaps():
    doc = label_document(grid_page(2, 2))
    # column centers are 55 and 115; the gap (80, 100] holds nothing
    g = build_document_graph(doc, fixed_cols=[40, 80, 100, 130], fixed_rows=[45, 65, 85])
    assert (g.n_lines, g.n_cols) == (2, 3)
    assert g.col_payload[1] == frozenset()
    assert g.cells[(0, 2)] == ("r0c1",)


def test_center_on_a_cut_goes_left():
    page = page_of(tok("a", 10, 10, w=20))
    doc = label_document(page)
    g = build_document_graph(doc, fixed_cols=[0, 20, 40])
    assert g.cells == {(0, 0): ("a",)}


def test_edges_out_of_range_rejected():
    with pytest.raises(ValueError):
        TypedGraph(1, 1, frozenset({(1, 0)}))


def test_dot_dump():
    g = build_document_graph(label_document(grid_page(2, 2, missing={(1, 1)})))
    dot = g.to_dot()
    assert "L0 -> L1;" in dot and "C0 -> C1;" in dot
    assert "L1 -- C0;" in dot and "L1 -- C1;" not in dot


def test_counts_and_order_invariance():
    rng = random.Random(5)
    for _ in range(30):
        missing = {(i, j) for i in range(5) for j in range(4) if rng.random() < 0.3 and (i, j) != (0, 0)}
        page = grid_page(5, 4, missing=missing)
        doc = label_document(page)
        g = build_document_graph(doc)
        assert len(g.arcs_l) == max(0, g.n_lines - 1) and len(g.arcs_c) == max(0, g.n_cols - 1)
        assert len(g.edges) == len({doc.label(t.id) for t in page.tokens})
        shuffled = list(page.tokens)
        rng.shuffle(shuffled)
        again = build_document_graph(label_document(Page(page.width, page.height, tuple(shuffled))))
        assert again == g
