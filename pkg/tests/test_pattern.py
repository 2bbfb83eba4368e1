import pytest

from tabgraph.pattern import (
    DEMO_OMISSION_4X4,
    BadOmission,
    BadSize,
    Family,
    make_pattern,
    shrink_sequence,
)


def test_full_grid_four_by_four_counts():
    p = make_pattern(Family.FULL_GRID, 4, 4)
    g = p.graph
    assert len(g.line_vertices) + len(g.col_vertices) == 8
    assert len(g.arcs_l) + len(g.arcs_c) == 6
    assert len(g.edges) == 16
    assert len(g.arcs_l) + len(g.arcs_c) + len(g.edges) == 22


def test_border_left_top_and_corner():
    assert len(make_pattern("border-left-top", 4, 4).edges) == 7
    assert make_pattern("border-left-top", 3, 2).edges == frozenset({(0, 0), (0, 1), (1, 0), (2, 0)})
    c = make_pattern(Family.CORNER_LEFT_TOP, 1, 1)
    assert (c.graph.n_lines, c.graph.n_cols, c.graph.arcs_l, c.edges) == (1, 1, [], frozenset({(0, 0)}))


def test_missing_cells():
    p = make_pattern(Family.MISSING_CELLS, 4, 4, DEMO_OMISSION_4X4)
    assert len(p.edges) == 14 and (1, 2) not in p.edges
    with pytest.raises(BadOmission):
        make_pattern(Family.MISSING_CELLS, 2, 2, {(0, 0)})
    with pytest.raises(BadOmission):
        make_pattern(Family.MISSING_CELLS, 2, 2, {(5, 1)})


def test_bad_sizes_and_names():
    with pytest.raises(BadSize):
        make_pattern(Family.FULL_GRID, 0, 3)
    with pytest.raises(ValueError):
        Family.parse("diagonal")
    assert Family.parse("Full_Grid") is Family.FULL_GRID


@pytest.mark.parametrize(
    "args, expected",
    [
        ((3, 3, 2, 2), [(3, 3), (3, 2), (2, 3), (2, 2)]),
        ((2, 2, 2, 2), [(2, 2)]),
        ((1, 3, 1, 1), [(1, 3), (1, 2), (1, 1)]),
    ],
)
def test_shrink_sequence(args, expected):
    assert shrink_sequence(*args) == expected


def test_shrink_sequence_rejects_inverted_bounds():
    with pytest.raises(BadSize):
        shrink_sequence(1, 1, 2, 2)


@pytest.mark.parametrize("n, m", [(1, 1), (2, 5), (4, 4), (7, 3)])
def test_family_edge_containment(n, m):
    full = make_pattern(Family.FULL_GRID, n, m).edges
    corner = make_pattern(Family.CORNER_LEFT_TOP, n, m).edges
    omit = {(i, j) for i in range(n) for j in range(m) if (i + j) % 3 == 1}
    for fam, om in [(Family.BORDER_LEFT_TOP, ()), (Family.MISSING_CELLS, omit), (Family.CORNER_LEFT_TOP, ())]:
        edges = make_pattern(fam, n, m, om).edges
        assert corner <= edges <= full
        assert make_pattern(fam, n, m, om).edges == edges
