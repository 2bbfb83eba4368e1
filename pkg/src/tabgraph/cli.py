"""Command line entry point: ``extract``, ``evaluate``, ``generate`` and ``bench``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Optional, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .alignment import AlignmentConfig
from .document import FORMAT_VERSION, DocumentError, ExtractedTable, load_ground_truth, load_page_file
from .evaluation import best_ground_truth, match_tables, score
from .pattern import Family
from .pipeline import NoRasterError, PipelineConfig, Strategy, extract, extract_all
from .synth import FAMILIES, SpecError, SynthSpec, corpus_specs, generate, write_instance
from .table_graph import EmptyRegionError
from .visual import SurrogateParams

log = logging.getLogger("tabgraph")

EXIT_OK, EXIT_NO_TABLE, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3
BENCH_ORDER = ("grid", "column", "area", "empty", "dynamic")
CSV_FIELDS = ("instance", "surrogate", "strategy", "f", "t_a", "c_a", "l_a", "time")


class InputError(Exception):
    pass


def _load_config(path: Optional[str]) -> dict[str, Any]:
    if not path:
        return {}
    p = Path(path)
    try:
        raw = p.read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read config {p}: {exc}") from None
    try:
        if p.suffix.lower() == ".toml":
            data = tomllib.loads(raw.decode("utf-8"))
        else:
            data = json.loads(raw)
    except (ValueError, UnicodeDecodeError) as exc:
        raise InputError(f"bad config {p}: {exc}") from None
    if not isinstance(data, dict):
        raise InputError("config must be a mapping")
    return data


def _pick(flag: Any, conf: dict[str, Any], key: str, default: Any) -> Any:
    """Explicit flag beats the config file, which beats the built-in default."""
    if flag is not None:
        return flag
    return conf.get(key, default)


def _pipeline_config(args: argparse.Namespace, conf: dict[str, Any]) -> PipelineConfig:
    try:
        min_size = tuple(conf.get("min_size", (2, 2)))
        return PipelineConfig(
            strategy=Strategy.parse(_pick(args.strategy, conf, "strategy", "dynamic")),
            family=Family.parse(_pick(args.pattern, conf, "pattern", Family.BORDER_LEFT_TOP.value)),
            budget=float(_pick(args.budget_seconds, conf, "budget_seconds", 300.0)),
            alignment=AlignmentConfig.from_mapping(conf.get("alignment", {})),
            surrogate=SurrogateParams(**conf.get("surrogate", {})),
            min_size=(int(min_size[0]), int(min_size[1])),
        )
    except (TypeError, ValueError, IndexError) as exc:
        raise InputError(f"bad configuration: {exc}") from None


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dumps(obj: Any) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _csv_row(values: Sequence[Any]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow(values)
    return buf.getvalue()


# ------------------------------------------------------------------ extract


def cmd_extract(args: argparse.Namespace) -> int:
    conf = _load_config(args.config)
    cfg = _pipeline_config(args, conf)
    page = load_page_file(args.tokens)
    timing = not args.no_timing
    if args.multi:
        results = extract_all(page, cfg)
        obj = {
            "format_version": FORMAT_VERSION,
            "tables": [r.to_json(timing, args.explain) for r in results],
        }
        _emit(_dumps(obj), args.out)
        return EXIT_OK if results else EXIT_NO_TABLE
    result = extract(page, cfg)
    _emit(_dumps(result.to_json(timing, args.explain)), args.out)
    if result.timeout:
        log.warning("search budget of %.1fs exhausted; reporting best table found so far", cfg.budget)
    return EXIT_OK if result.table is not None else EXIT_NO_TABLE


# ----------------------------------------------------------------- evaluate


def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_bytes())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except (ValueError, UnicodeDecodeError) as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _result_tables(obj: Any) -> list[tuple[ExtractedTable, str, float]]:
    if not isinstance(obj, dict):
        raise InputError("result file must be a JSON object")
    entries = obj["tables"] if isinstance(obj.get("tables"), list) else [obj]
    out = []
    for e in entries:
        if not isinstance(e, dict):
            raise InputError("result entries must be objects")
        if e.get("table") is None:
            continue
        elapsed = e.get("elapsed") or {}
        t = float(elapsed.get("surrogate", 0.0)) + float(elapsed.get("search", 0.0))
        out.append((ExtractedTable.from_json(e["table"]), str(e.get("strategy", "")), t))
    return out


def cmd_evaluate(args: argparse.Namespace) -> int:
    result = _read_json(args.result)
    page = load_page_file(args.tokens) if args.tokens else None
    try:
        gts = load_ground_truth(Path(args.gt).read_bytes(), page)
    except OSError as exc:
        raise InputError(f"cannot read {args.gt}: {exc}") from None
    tables = _result_tables(result)
    strategy = str(result.get("strategy", "")) if isinstance(result, dict) else ""
    elapsed = sum(t for _, _, t in tables)
    instance = args.instance or Path(args.gt).parent.name
    pairs = match_tables([t for t, _, _ in tables], gts)
    if not pairs:
        pairs = [(None, None)]
    breakdowns = [score(o, g, normalized=args.normalized) for o, g in pairs]
    if len(breakdowns) == 1:
        obj = {"format_version": FORMAT_VERSION, **breakdowns[0].to_json()}
    else:
        obj = {"format_version": FORMAT_VERSION, "tables": [b.to_json() for b in breakdowns]}
    first = breakdowns[0]
    row = [instance, strategy, f"{first.f:.6f}", f"{first.t_a:.6f}", f"{first.c_a:.6f}", f"{first.l_a:.6f}"]
    row.append("" if args.no_timing else f"{elapsed:.4f}")
    _emit(_dumps(obj) + _csv_row(row), args.out)
    return EXIT_OK


# ----------------------------------------------------------------- generate


def cmd_generate(args: argparse.Namespace) -> int:
    out = Path(args.out)
    if args.corpus:
        specs = corpus_specs(args.corpus, args.seed, args.missing_rate, args.jitter)
        for name, spec in specs:
            write_instance(generate(spec), out / name)
        log.info("wrote %d instances under %s", len(specs), out)
        return EXIT_OK
    spec = SynthSpec(
        family=args.family,
        n_rows=args.rows,
        n_cols=args.cols,
        missing_cell_rate=args.missing_rate,
        jitter=args.jitter,
        distractor_tokens=args.distractors,
        seed=args.seed,
        decoy_frame=args.decoy_frame,
    )
    write_instance(generate(spec), out)
    return EXIT_OK


# -------------------------------------------------------------------- bench


def _bench_instance(job: tuple[str, str, tuple[str, ...], dict[str, Any], bool]) -> list[list[str]]:
    inst_dir, name, strategies, cfg_kwargs, normalized = job
    page = load_page_file(Path(inst_dir) / "tokens.json")
    gts = load_ground_truth((Path(inst_dir) / "gt.json").read_bytes(), page)
    rows = []
    report = None
    for s in strategies:
        cfg = PipelineConfig(strategy=s, **cfg_kwargs)
        try:
            res = extract(page, cfg, report)
        except EmptyRegionError:
            res = None
        if res is not None and report is None:
            report = res.surrogate
        table = res.table if res is not None else None
        b = score(table, best_ground_truth(table, gts), normalized=normalized)
        took = (res.elapsed_surrogate + res.elapsed_search) if res is not None else 0.0
        surrogate = report.structure.value if report is not None else ""
        rows.append([name, surrogate, s, f"{b.f:.6f}", f"{b.t_a:.6f}",
                     f"{b.c_a:.6f}", f"{b.l_a:.6f}", f"{took:.4f}"])
    return rows


def cmd_bench(args: argparse.Namespace) -> int:
    root = Path(args.corpus_dir)
    if not root.is_dir():
        raise InputError(f"{root} is not a directory")
    strategies = tuple(s.strip().lower() for s in args.strategies.split(",") if s.strip())
    for s in strategies:
        Strategy.parse(s)
    # keep the conventional column order whatever order the flag lists
    strategies = tuple(sorted(strategies, key=lambda s: BENCH_ORDER.index(s)))
    conf = _load_config(args.config)
    base = _pipeline_config(argparse.Namespace(strategy=None, pattern=args.pattern, budget_seconds=args.budget_seconds), conf)
    cfg_kwargs = dict(family=base.family, budget=base.budget, alignment=base.alignment,
                      surrogate=base.surrogate, min_size=base.min_size)
    dirs = sorted(p for p in root.iterdir() if (p / "tokens.json").is_file())
    if (root / "tokens.json").is_file():
        dirs.insert(0, root)
    jobs = [(str(d), d.name, strategies, cfg_kwargs, args.normalized) for d in dirs]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            chunks = list(pool.map(_bench_instance, jobs))
    else:
        chunks = [_bench_instance(j) for j in jobs]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for rows in chunks:
        for row in rows:
            if args.no_timing:
                row[-1] = ""
            writer.writerow(row)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tabgraph", description="Table extraction from OCR token boxes.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def search_flags(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--pattern", help="pattern family (default border-left-top)")
        sp.add_argument("--budget-seconds", type=float, help="search wall-clock budget (default 300)")
        sp.add_argument("--config", help="JSON or TOML file with defaults; explicit flags win")
        sp.add_argument("--no-timing", action="store_true", help="omit timing fields from the output")
        sp.add_argument("--out", help="write machine output here instead of stdout")

    ex = sub.add_parser("extract", help="extract the table of one page")
    ex.add_argument("tokens", help="token file (JSON)")
    ex.add_argument("--strategy", choices=[s.value for s in Strategy])
    ex.add_argument("--explain", action="store_true", help="include the surrogate report and search region")
    ex.add_argument("--multi", action="store_true", help="keep extracting tables until none is left")
    search_flags(ex)
    ex.set_defaults(func=cmd_extract)

    ev = sub.add_parser("evaluate", help="score an extraction result against ground truth")
    ev.add_argument("result")
    ev.add_argument("gt")
    ev.add_argument("--tokens", help="token file used to validate ground-truth ids")
    ev.add_argument("--instance", help="instance name for the CSV row")
    ev.add_argument("--normalized", action="store_true", help="rescale c_a and l_a so a perfect match is 1")
    ev.add_argument("--no-timing", action="store_true")
    ev.add_argument("--out")
    ev.set_defaults(func=cmd_evaluate)

    ge = sub.add_parser("generate", help="write a synthetic labeled page")
    ge.add_argument("--family", choices=FAMILIES, default="grid")
    ge.add_argument("--rows", type=int, default=5)
    ge.add_argument("--cols", type=int, default=4)
    ge.add_argument("--missing-rate", type=float, default=0.0)
    ge.add_argument("--jitter", type=float, default=0.0)
    ge.add_argument("--distractors", type=int, default=12)
    ge.add_argument("--seed", type=int, default=0)
    ge.add_argument("--decoy-frame", action="store_true")
    ge.add_argument("--corpus", type=int, metavar="N", help="write N instances per family instead of one page")
    ge.add_argument("--out", required=True, help="output directory")
    ge.set_defaults(func=cmd_generate)

    be = sub.add_parser("bench", help="run strategies over a corpus and print a CSV")
    be.add_argument("corpus_dir")
    be.add_argument("--strategies", default=",".join(BENCH_ORDER))
    be.add_argument("--normalized", action="store_true")
    be.add_argument("--jobs", type=int, default=1)
    search_flags(be)
    be.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except EmptyRegionError as exc:
        print(f"no table: {exc}", file=sys.stderr)
        return EXIT_NO_TABLE
    except (InputError, DocumentError, NoRasterError, SpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        # bad flag values (unknown family, non-positive budget...) surface as ValueError
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception:  # noqa: BLE001
        log.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
