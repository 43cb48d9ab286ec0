"""Command-line entry point orchestrating the pipeline end to end.

Subcommands: ``process`` (whole pipeline into an output directory),
``snapshots`` (replay only), ``fixations`` (fixation JSONL), ``query``
(the three aggregate queries as JSON), ``bench`` (ingestion benchmark).

Exit codes are part of the contract: 0 success, 1 stage failure,
2 final-file verification mismatch, 64 usage error. Set ``GAZETRACE_LOG``
(debug/info/warning/error) for progress logging. All JSON artifacts use
0-based line/column indices; human-readable messages are 1-based.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

from .bench import BenchConfig, run_benchmark
from .errors import GazeTraceError
from .queries import (
    ProcessedSession,
    adjust_to_snapshot,
    fixations_on_token,
    process_session,
    tokens_changed_by,
)
from .session import SessionArchive, load_session
from .textpos import offset_to_linecol

log = logging.getLogger("gazetrace")


class _UsageError(Exception):
    def __init__(self, message: str, usage: str):
        super().__init__(message)
        self.usage = usage


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 64 instead of argparse's default 2
        raise _UsageError(message, self.format_usage())


def _load_with_overrides(args) -> SessionArchive:
    archive = load_session(args.session)
    overrides = {}
    if getattr(args, "window_ms", None) is not None:
        overrides["aggregation_window_ms"] = args.window_ms
    if getattr(args, "grammar", None) is not None:
        overrides["grammar"] = args.grammar
    if getattr(args, "min_duration_ms", None) is not None:
        overrides["min_duration_ms"] = args.min_duration_ms
    if getattr(args, "dispersion_px", None) is not None:
        overrides["dispersion_px"] = args.dispersion_px
    if getattr(args, "algorithm", None) is not None:
        overrides["fixation_algorithm"] = args.algorithm
    if overrides:
        try:
            config = dataclasses.replace(archive.config, **overrides)
        except ValueError as exc:
            raise GazeTraceError(f"invalid override: {exc}") from exc
        archive = dataclasses.replace(archive, config=config)
    return archive


def _dump_json(payload, out: str | None) -> None:
    text = json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _snapshot_records(ps: ProcessedSession, extension: str) -> dict:
    return {
        "file": ps.archive.file,
        "extension": extension,
        "snapshots": [
            {
                "index": s.index,
                "path": f"snapshot_{s.index}{extension}",
                "valid_from": s.valid_from,
                "valid_to": s.valid_to,
                "produced_by": s.produced_by.index if s.produced_by else None,
                "chars": len(s.text),
                "lines": s.text.count("\n") + 1,
            }
            for s in ps.snapshots
        ],
        "batches": [
            {
                "index": b.index,
                "t_start": b.t_start,
                "t_end": b.t_end,
                "edits": len(b.edits),
                "delta": b.delta,
                "old_range": [b.old_range.start, b.old_range.end],
                "new_range": [b.new_range.start, b.new_range.end],
            }
            for b in ps.batches
        ],
    }


def _table_records(ps: ProcessedSession) -> list[dict]:
    return [
        {
            "snapshot": t.snapshot_index,
            "tokens": [
                {
                    "id": token_id,
                    "kind": tok.kind.value,
                    "text": tok.text,
                    "start": tok.span.start,
                    "end": tok.span.end,
                    "line": tok.line,
                    "col": tok.col,
                    "unterminated": tok.unterminated,
                }
                for token_id, tok in t.entries
            ],
        }
        for t in ps.tables
    ]


def _timeline_records(ps: ProcessedSession) -> list[dict]:
    records = []
    for token_id in sorted(ps.timelines):
        tl = ps.timelines[token_id]
        birth_table = ps.tables[tl.birth_snapshot]
        records.append(
            {
                "token_id": token_id,
                "text": tl.text,
                "kind": birth_table.by_id[token_id].kind.value,
                "birth_snapshot": tl.birth_snapshot,
                "death_snapshot": tl.death_snapshot,
                "sightings": [
                    {
                        "snapshot": s.snapshot_index,
                        "start": s.span.start,
                        "end": s.span.end,
                        "line": s.line,
                        "col": s.col,
                    }
                    for s in tl.sightings
                ],
            }
        )
    return records


def _fixation_lines(ps: ProcessedSession) -> str:
    return "".join(
        json.dumps(f.as_dict(), ensure_ascii=False, separators=(",", ":")) + "\n"
        for f in ps.fixations
    )


def _write_snapshot_files(ps: ProcessedSession, out_dir: Path, extension: str) -> None:
    for s in ps.snapshots:
        (out_dir / f"snapshot_{s.index}{extension}").write_text(s.text, encoding="utf-8")


def cmd_process(args) -> int:
    archive = _load_with_overrides(args)
    ps = process_session(archive)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    ext = archive.extension

    _write_snapshot_files(ps, out_dir, ext)
    _dump_json(_snapshot_records(ps, ext), out_dir / "snapshots_index.json")
    _dump_json(_table_records(ps), out_dir / "token_tables.json")
    _dump_json(_timeline_records(ps), out_dir / "timelines.json")
    _dump_json(ps.verification.as_dict(), out_dir / "verification.json")
    (out_dir / "fixations.jsonl").write_text(_fixation_lines(ps), encoding="utf-8")

    counts = ps.sample_counts
    log.info(
        "processed %d edits into %d snapshots; %d fixations from %d samples "
        "(%d valid, %d out-of-bounds, %d edit-concurrent)",
        len(archive.edit_log), len(ps.snapshots), len(ps.fixations),
        counts.total, counts.valid, counts.out_of_bounds, counts.edit_concurrent,
    )
    if not ps.verification.matched:
        offset = ps.verification.first_divergence
        line, col = offset_to_linecol(ps.snapshots[-1].text, min(offset, len(ps.snapshots[-1].text)))
        print(
            f"verification mismatch: final snapshot diverges from the saved "
            f"final file at offset {offset} (line {line + 1}, column {col + 1})",
            file=sys.stderr,
        )
        return 2
    print(f"verification matched; artifacts in {out_dir}", file=sys.stderr)
    return 0


def cmd_snapshots(args) -> int:
    archive = _load_with_overrides(args)
    ps = process_session(archive)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_snapshot_files(ps, out_dir, archive.extension)
    _dump_json(_snapshot_records(ps, archive.extension), out_dir / "snapshots_index.json")
    print(f"{len(ps.snapshots)} snapshots written to {out_dir}", file=sys.stderr)
    return 0


def cmd_fixations(args) -> int:
    archive = _load_with_overrides(args)
    ps = process_session(archive)
    payload = _fixation_lines(ps)
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
    else:
        sys.stdout.write(payload)
    return 0


def cmd_query(args) -> int:
    archive = _load_with_overrides(args)
    ps = process_session(archive)
    if args.query_op == "fixations-on-token":
        result = {
            "token_id": args.id,
            "fixations": [f.as_dict() for f in fixations_on_token(ps, args.id)],
        }
    elif args.query_op == "adjust-to-snapshot":
        if not 0 <= args.fixation < len(ps.fixations):
            raise GazeTraceError(
                f"fixation index {args.fixation} out of range "
                f"(session has {len(ps.fixations)} fixations)"
            )
        adjusted = adjust_to_snapshot(ps, ps.fixations[args.fixation], args.target)
        result = {
            "fixation_index": args.fixation,
            "target_snapshot": args.target,
            "mapped": adjusted is not None,
            "line": adjusted[0] if adjusted else None,
            "col": adjusted[1] if adjusted else None,
        }
    else:
        result = tokens_changed_by(ps, args.batch).as_dict()
    _dump_json(result, args.out)
    return 0


def cmd_bench(args) -> int:
    cfg = BenchConfig(
        rate_hz=args.rate_hz,
        duration_s=args.duration_s,
        output=Path(args.out),
        open_files=args.files,
        queue_capacity=args.queue_capacity,
        rng_seed=args.seed,
    )
    report = run_benchmark(cfg)
    sys.stdout.write(json.dumps(report.as_dict(), indent=2) + "\n")
    print(report.human_table(), file=sys.stderr)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="gazetrace", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_session_options(p, window_only=False):
        p.add_argument("session", help="session directory")
        p.add_argument("--window-ms", type=int, help="edit aggregation window override")
        if not window_only:
            p.add_argument("--grammar", help="tokenizer grammar override")
            p.add_argument("--min-duration-ms", type=int, help="fixation minimum duration")
            p.add_argument("--dispersion-px", type=float, help="fixation dispersion threshold")
            p.add_argument("--algorithm", help="fixation algorithm override")

    p = sub.add_parser("process", help="run the whole pipeline into --out")
    add_session_options(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_process)

    p = sub.add_parser("snapshots", help="replay edits and write snapshots")
    add_session_options(p, window_only=True)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_snapshots)

    p = sub.add_parser("fixations", help="emit fixation records as JSON lines")
    add_session_options(p)
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_fixations)

    p = sub.add_parser("query", help="aggregate queries over a processed session")
    add_session_options(p)
    p.add_argument("--out", help="output file (default: stdout)")
    qsub = p.add_subparsers(dest="query_op", required=True, parser_class=_Parser)
    q = qsub.add_parser("fixations-on-token", help="all fixations ever on one token")
    q.add_argument("--id", type=int, required=True, help="token id")
    q = qsub.add_parser("adjust-to-snapshot", help="re-express a fixation in another snapshot")
    q.add_argument("--fixation", type=int, required=True, help="fixation index")
    q.add_argument("--target", type=int, required=True, help="target snapshot index")
    q = qsub.add_parser("tokens-changed-by", help="tokens killed/created by a batch")
    q.add_argument("--batch", type=int, required=True, help="batch index (1-based)")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("bench", help="high-rate ingestion benchmark")
    p.add_argument("--rate-hz", type=int, required=True)
    p.add_argument("--duration-s", type=float, required=True)
    p.add_argument("--files", type=int, default=1, help="number of open files simulated")
    p.add_argument("--queue-capacity", type=int, default=8192)
    p.add_argument("--out", required=True, help="persisted samples path (gazes.jsonl format)")
    p.add_argument("--seed", type=int, default=None, help="RNG seed for mock gaze positions")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("GAZETRACE_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc.usage, file=sys.stderr, end="")
        print(f"error: {exc}", file=sys.stderr)
        return 64
    try:
        return args.func(args)
    except (GazeTraceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())
