import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tabgraph.alignment import (
    AlignmentConfig,
    assign_col_labels,
    assign_row_labels,
    column_drift,
    label_document,
    related_horizontal,
    related_vertical_interval,
    related_vertical_threshold,
)
from tabgraph.document import Page, Token

from conftest import page_of, tok


def span(tid, x0, x1, y=0.0):
    return Token(tid, tid, x0, x1, y, y + 10)


def at_y(tid, y):
    return Token(tid, tid, 0, 10, y, y + 10)


@pytest.mark.parametrize("y2, expected", [(100, True), (102.5, True), (103, False)])
def test_horizontal_relation_is_strict(y2, expected):
    assert related_horizontal(at_y("a", 100), at_y("b", y2), 3) is expected


@pytest.mark.parametrize("b, expected", [((10, 50), True), ((40, 90), True), ((51, 90), False)])
def test_vertical_interval_relation(b, expected):
    assert related_vertical_interval(span("a", 10, 50), span("b", *b)) is expected


@pytest.mark.parametrize("x2, expected", [(10, True), (11.9, True), (12, False)])
def test_vertical_threshold_relation(x2, expected):
    assert related_vertical_threshold(span("a", 10, 20), span("b", x2, x2 + 5), 2) is expected


def test_row_chaining_example():
    page = page_of(at_y("a", 100), at_y("b", 101), at_y("c", 200))
    labels = assign_row_labels(page, AlignmentConfig(tau_y=3, chain_drift_limit=5))
    assert labels == {"a": 0, "b": 0, "c": 1}


def test_drift_splits_a_slowly_sinking_row():
    # each neighbour pair is aligned, but the chain as a whole sinks too far
    page = page_of(*(at_y(f"t{k}", 100 + 2 * k) for k in range(4)))
    cfg = AlignmentConfig(tau_y=3, chain_drift_limit=5)
    t = page.tokens
    assert related_horizontal(t[0], t[1], 3) and related_horizontal(t[1], t[2], 3)
    assert not related_horizontal(t[0], t[2], 3)
    labels = assign_row_labels(page, cfg)
    assert labels == {"t0": 0, "t1": 0, "t2": 0, "t3": 1}


def test_single_token_page():
    page = page_of(at_y("only", 5))
    doc = label_document(page)
    assert doc.row_label == {"only": 0} and doc.col_label == {"only": 0}


def test_column_components():
    page = page_of(span("a", 10, 50), span("b", 40, 90), span("c", 200, 240))
    labels = assign_col_labels(page, AlignmentConfig(chain_drift_limit=50))
    assert labels == {"a": 0, "b": 0, "c": 1}


def test_identical_intervals_form_one_column():
    page = page_of(*(span(f"t{k}", 10, 40, y=20 * k) for k in range(5)))
    assert set(assign_col_labels(page, AlignmentConfig()).values()) == {0}


def test_column_chain_split_by_drift():
    page = page_of(span("a", 0, 10), span("b", 9, 20), span("c", 19, 30))
    assert column_drift(page.tokens) == 19
    assert assign_col_labels(page, AlignmentConfig(chain_drift_limit=10)) == {"a": 0, "b": 0, "c": 1}
    assert assign_col_labels(page, AlignmentConfig(chain_drift_limit=5)) == {"a": 0, "b": 1, "c": 2}
    assert set(assign_col_labels(page, AlignmentConfig(chain_drift_limit=30)).values()) == {0}


def test_two_by_two_grid_and_empty_page():
    page = page_of(tok("a", 10, 10), tok("b", 100, 10), tok("c", 10, 100), tok("d", 100, 100))
    doc = label_document(page)
    assert (doc.row_count, doc.col_count) == (2, 2)
    assert doc.label("d") == (1, 1)
    empty = label_document(Page(10, 10, ()))
    assert (empty.row_count, empty.col_count) == (0, 0)


def test_config_validation_and_auto_defaults():
    with pytest.raises(ValueError):
        AlignmentConfig(tau_y=0)
    with pytest.raises(ValueError):
        AlignmentConfig(tau_x=-1.0)
    page = page_of(tok("a", 0, 0, w=20, h=10), tok("b", 50, 0, w=40, h=10))
    cfg = AlignmentConfig().resolve(page)
    assert cfg.tau_y == pytest.approx(6.0)
    assert cfg.chain_drift_limit == pytest.approx(15.0)
    assert cfg.tau_x == pytest.approx(15.0)
    assert AlignmentConfig.from_json('{"tau_y": 2.5}').tau_y == 2.5


boxes = st.lists(
    st.tuples(
        st.floats(0, 400, allow_nan=False),
        st.floats(0, 60, allow_nan=False),
        st.floats(0, 400, allow_nan=False),
        st.floats(0, 20, allow_nan=False),
    ),
    min_size=1,
    max_size=25,
)


def _page(raw):
    return Page(
        1000,
        1000,
        tuple(Token(f"t{k}", "", x, x + w, y, y + h) for k, (x, w, y, h) in enumerate(raw)),
    )


@settings(max_examples=200, deadline=None)
@given(boxes, st.floats(0.1, 20), st.floats(0.1, 40))
def test_relations_are_symmetric_and_reflexive(raw, tau, drift):
    page = _page(raw)
    for a in page.tokens:
        assert related_horizontal(a, a, tau)
        assert related_vertical_interval(a, a)
        for b in page.tokens:
            assert related_horizontal(a, b, tau) == related_horizontal(b, a, tau)
            assert related_vertical_interval(a, b) == related_vertical_interval(b, a)


def _centroids(page, labels, key):
    groups = {}
    for t in page.tokens:
        groups.setdefault(labels[t.id], []).append(key(t))
    return [sum(v) / len(v) for _, v in sorted(groups.items())]


@settings(max_examples=200, deadline=None)
@given(boxes, st.floats(0.1, 20), st.floats(0.1, 40))
def test_labels_are_dense_monotone_and_respect_drift(raw, tau, drift):
    page = _page(raw)
    cfg = AlignmentConfig(tau_y=tau, chain_drift_limit=drift)
    doc = label_document(page, cfg)
    assert sorted(set(doc.row_label.values())) == list(range(doc.row_count))
    assert sorted(set(doc.col_label.values())) == list(range(doc.col_count))
    rows = _centroids(page, doc.row_label, lambda t: t.y)
    cols = _centroids(page, doc.col_label, lambda t: t.x)
    assert rows == sorted(rows) and cols == sorted(cols)
    for r in range(doc.row_count):
        ys = sorted(t.y for t in page.tokens if doc.row_label[t.id] == r)
        assert ys[-1] - ys[0] <= drift
        assert all(b - a < tau for a, b in zip(ys, ys[1:]))


def test_same_label_is_an_equivalence_on_random_pages():
    rng = random.Random(7)
    for _ in range(200):
        n = rng.randint(1, 30)
        page = Page(
            500,
            500,
            tuple(
                Token(f"t{k}", "", x, x + rng.uniform(1, 60), y, y + 10)
                for k in range(n)
                for x, y in [(rng.uniform(0, 400), rng.uniform(0, 480))]
            ),
        )
        doc = label_document(page)
        ids = [t.id for t in page.tokens]
        for label in (doc.row_label, doc.col_label):
            same = {(a, b) for a in ids for b in ids if label[a] == label[b]}
            assert all((a, a) in same for a in ids)
            assert all((b, a) in same for a, b in same)
            for a, b in same:
                for c in ids:
                    if (b, c) in same:
                        assert (a, c) in same
        assert label_document(page) == doc
