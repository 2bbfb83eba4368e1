import pytest

from tabgraph.document import load_document, load_ground_truth, load_page_file
from tabgraph.pipeline import PipelineConfig, extract
from tabgraph.synth import FAMILIES, SpecError, SynthSpec, corpus_specs, generate, write_instance
from tabgraph.visual import Structure, analyze_page


def test_same_seed_same_bytes(tmp_path):
    spec = SynthSpec("grid", 7, 5, missing_cell_rate=0.2, jitter=0.8, seed=12345)
    a = write_instance(generate(spec), tmp_path / "a")
    b = write_instance(generate(spec), tmp_path / "b")
    for name in ("tokens.json", "page.pgm", "gt.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    c = write_instance(generate(SynthSpec("grid", 7, 5, 0.2, 0.8, seed=12346)), tmp_path / "c")
    assert (a / "tokens.json").read_bytes() != (c / "tokens.json").read_bytes()


def test_written_instance_loads_back(tmp_path):
    sp = generate(SynthSpec("column", 6, 3, seed=4))
    out = write_instance(sp, tmp_path)
    page = load_page_file(out / "tokens.json")
    assert page == sp.page
    assert load_ground_truth((out / "gt.json").read_bytes(), page) == [sp.ground_truth]


def test_grid_five_by_four_seed_42():
    sp = generate(SynthSpec("grid", 5, 4, seed=42))
    assert analyze_page(sp.page).structure is Structure.GRID
    res = extract(sp.page, PipelineConfig(budget=30))
    assert res.table.token_rows() == [list(r) for r in sp.ground_truth.rows]


def test_empty_family_without_table_has_no_truth():
    sp = generate(SynthSpec("empty", 0, 0, seed=1))
    assert sp.ground_truth is None
    assert all(t.id.startswith("d") for t in sp.page.tokens)


def test_missing_cells_bookkeeping():
    sp = generate(SynthSpec("column", 6, 3, missing_cell_rate=0.2, seed=7))
    gt = sp.ground_truth
    ids = {t.id for t in sp.page.tokens}
    table_ids = {t for row in gt.rows for cell in row for t in cell}
    assert table_ids == {i for i in ids if i.startswith("t")}
    holes = [(i, j) for i, row in enumerate(gt.rows) for j, cell in enumerate(row) if not cell]
    assert holes and all(i >= 1 and j >= 1 for i, j in holes)
    res = extract(sp.page, PipelineConfig(budget=30))
    placeholders = [
        (i, j) for i, row in enumerate(res.table.cells) for j, c in enumerate(row) if c.placeholder is not None
    ]
    assert placeholders == holes


def test_jitter_is_bounded():
    clean = generate(SynthSpec("area", 5, 4, seed=3)).page.by_id
    noisy = generate(SynthSpec("area", 5, 4, jitter=1.5, seed=3)).page.by_id
    for tid, t in noisy.items():
        assert abs(t.x - clean[tid].x) <= 1.5 + 0.01 and abs(t.y - clean[tid].y) <= 1.5 + 0.01


def test_distractors_stay_clear_of_the_table():
    sp = generate(SynthSpec("grid", 8, 5, distractor_tokens=30, seed=2))
    x0, y0, x1, y1 = sp.table_box
    extra = [t for t in sp.page.tokens if t.id.startswith("d")]
    assert len(extra) == 30
    assert all(t.end_y <= y0 - 30 or t.y >= y1 + 30 for t in extra)


@pytest.mark.parametrize(
    "spec",
    [
        SynthSpec("diagonal"),
        SynthSpec("grid", 1, 4),
        SynthSpec("column", 0, 3),
        SynthSpec(missing_cell_rate=1.5),
        SynthSpec("grid", 60, 4),
        SynthSpec("grid", 4, 60),
        SynthSpec(seed=-1),
    ],
)
def test_invalid_specs(spec):
    with pytest.raises(SpecError):
        generate(spec)


@pytest.mark.parametrize("family", FAMILIES)
def test_class_is_recoverable_from_clean_pages(family):
    for name, spec in corpus_specs(per_family=6, seed=9, families=(family,)):
        assert analyze_page(generate(spec).page).structure is Structure(family), name
