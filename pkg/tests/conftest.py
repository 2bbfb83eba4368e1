import random

import pytest

from tabgraph.document import Page, Token
from tabgraph.pattern import Family, make_pattern
from tabgraph.table_graph import TypedGraph


def tok(tid, x, y, w=10.0, h=10.0, text=None):
    return Token(tid, text if text is not None else tid, x, x + w, y, y + h)


def page_of(*tokens, width=1000.0, height=1000.0):
    return Page(width, height, tuple(tokens))


def grid_page(n, m, pitch_x=60.0, pitch_y=20.0, missing=()):
    """An unruled n x m table of single-token cells named r{i}c{j}."""
    tokens = [
        tok(f"r{i}c{j}", 50 + j * pitch_x, 50 + i * pitch_y)
        for i in range(n)
        for j in range(m)
        if (i, j) not in missing
    ]
    return page_of(*tokens)


def random_target(rng: random.Random, max_lines=10, max_cols=10, density=None):
    n, m = rng.randint(1, max_lines), rng.randint(1, max_cols)
    p = density if density is not None else rng.uniform(0.3, 0.95)
    edges = frozenset((i, j) for i in range(n) for j in range(m) if rng.random() < p)
    return TypedGraph(n, m, edges)


def random_pattern(rng: random.Random, max_n=5, max_m=5):
    family = rng.choice(list(Family))
    n, m = rng.randint(1, max_n), rng.randint(1, max_m)
    omit = ()
    if family is Family.MISSING_CELLS:
        omit = [(i, j) for i in range(n) for j in range(m) if (i, j) != (0, 0) and rng.random() < 0.25]
    return make_pattern(family, n, m, omit)


@pytest.fixture
def rng():
    return random.Random(1234)
