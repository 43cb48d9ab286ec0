"""Regenerate the committed example sessions.

Run from the repository root:  python demos/data/make_sessions.py

Two sessions are produced:

* ``line_insert_session`` -- a single full-line insertion mid-function,
  with fixation clusters recorded on identifiers above and below the
  insertion point before the edit and one cluster after it. The classic
  static-mapping failure case: after the edit, the old line numbers point
  at the wrong text.
* ``refactor_session`` -- three edit batches (an identifier typed longer
  character by character, a multi-line block delete, a delete+insert
  replacement), with fixations on tokens that survive, move, and die.
"""

from __future__ import annotations

import json
from pathlib import Path

HERE = Path(__file__).resolve().parent


def insert_event(lines: list[str], row: int, text: str, ts: int, file: str) -> dict:
    offset = sum(len(line) + 1 for line in lines[:row])
    return {
        "file": file, "type": "insert", "offset": offset, "text": text,
        "len": len(text), "timestamp": ts, "row": row, "col": 0,
    }


def event_at(buffer: str, kind: str, offset: int, text: str, ts: int, file: str) -> dict:
    row = buffer.count("\n", 0, offset)
    col = offset - (buffer.rfind("\n", 0, offset) + 1)
    return {
        "file": file, "type": kind, "offset": offset, "text": text,
        "len": len(text), "timestamp": ts, "row": row, "col": col,
    }


def apply(buffer: str, e: dict) -> str:
    if e["type"] == "insert":
        return buffer[: e["offset"]] + e["text"] + buffer[e["offset"] :]
    assert buffer[e["offset"] : e["offset"] + e["len"]] == e["text"]
    return buffer[: e["offset"]] + buffer[e["offset"] + e["len"] :]


def cluster(t0: int, line: int, col: int, file: str, n: int = 12) -> list[dict]:
    """One fixation-worthy cluster: n samples, 10 ms apart, <2 px spread."""
    x = 60.0 + 9.0 * col
    y = 8.0 + 19.0 * line
    return [
        {
            "timestamp": t0 + 10 * i,
            "x": x + (i % 3) * 0.5,
            "y": y + (i % 2) * 0.5,
            "line": line,
            "col": col + 1 if i % 3 == 0 else col,
            "file": file,
        }
        for i in range(n)
    ]


def write_session(name: str, original: str, events: list[dict], gazes: list[dict],
                  config: str) -> None:
    directory = HERE / name
    directory.mkdir(parents=True, exist_ok=True)
    final = original
    for e in events:
        final = apply(final, e)
    (directory / "original.c").write_text(original, encoding="utf-8")
    (directory / "final.c").write_text(final, encoding="utf-8")
    (directory / "changes.json").write_text(json.dumps(events, indent=1), encoding="utf-8")
    (directory / "gazes.jsonl").write_text(
        "\n".join(json.dumps(g) for g in gazes) + "\n", encoding="utf-8"
    )
    (directory / "session.toml").write_text(config, encoding="utf-8")
    print(f"wrote {directory} ({len(events)} edits, {len(gazes)} gazes)")


CONFIG = """\
# processing parameters for this recording
aggregation_window_ms = 3000
grammar = "c-family"
fixation_algorithm = "idt"
min_duration_ms = 100
dispersion_px = 30
offset_encoding = "scalar"
"""


def make_line_insert_session() -> None:
    lines = [
        "/*",
        " * histogram.c",
        " * Count how often each byte value appears in a stream",
        " * and report the most frequent symbol.",
        " */",
        "",
        "#include <stdio.h>",
        "#include <stdlib.h>",
        "",
        "#define MAX_SYMBOLS 256",
        "",
        "static unsigned counts[MAX_SYMBOLS];",
        "",
        "static void reset_counts(void) {",
        "    for (int i = 0; i < MAX_SYMBOLS; i++) {",
        "        counts[i] = 0;",
        "    }",
        "}",
        "",
        "static int read_symbols(FILE *stream) {",
        "    int seen = 0;",
        "    int c;",
        "    while ((c = fgetc(stream)) != EOF) {",
        "        counts[(unsigned char) c] += 1;",
        "        seen += 1;",
        "    }",
        "    return seen;",
        "}",
        "",
        "static void print_row(int symbol, unsigned count) {",
        "    if (count == 0) {",
        "        return;",
        "    }",
        '    printf("%3d %u\\n", symbol, count);',
        "}",
        "",
        "static void print_table(void) {",
        "    for (int i = 0; i < MAX_SYMBOLS; i++) {",
        "        print_row(i, counts[i]);",
        "    }",
        "}",
        "",
        "static int clamp(int value, int lo, int hi) {",
        "    if (value < lo) {",
        "        return lo;",
        "    }",
        "    if (value > hi) {",
        "        return hi;",
        "    }",
        "    return value;",
        "}",
        "",
        "static int argmax(const unsigned *values, int n) {",
        "    int best = 0;",
        "    for (int i = 1; i < n; i++) {",
        "        if (values[i] > values[best]) {",
        "            best = i;",
        "        }",
        "    }",
        "    return best;",
        "}",
        "",
        "/* Scan the stream and report the dominant symbol. */",
        "int most_frequent(FILE *stream, int cap) {",
        "    int limit = clamp(cap, 1, MAX_SYMBOLS);",
        "    int best = -1;",
        "    int seen = read_symbols(stream);",
        "",
        "    int total = seen;",
        "    if (total == 0) {",
        "",
        "        int frequency = 0;",
        "        return frequency;",
        "    }",
        "    best = argmax(counts, limit);",
        "    return best;",
        "}",
        "",
        "int main(void) {",
        "    reset_counts();",
        '    printf("%d\\n", most_frequent(stdin, MAX_SYMBOLS));',
        "    return 0;",
        "}",
    ]
    # the scenario hinges on these exact positions
    assert lines[64] == "    int limit = clamp(cap, 1, MAX_SYMBOLS);"
    assert lines[68] == "    int total = seen;"
    assert lines[70] == ""
    assert lines[71] == "        int frequency = 0;"

    original = "\n".join(lines) + "\n"
    events = [
        insert_event(lines, 66, "    int count = 0;\n", 1_003_000, "histogram.c")
    ]
    gazes = (
        cluster(1_000_000, 64, 9, "histogram.c")   # on `limit`
        + [{"timestamp": 1_000_200, "x": -5.0, "y": 300.0}]  # outside the editor
        + cluster(1_000_300, 68, 9, "histogram.c")  # on `total`
        + cluster(1_000_600, 71, 14, "histogram.c")  # on `frequency`
        + [{"timestamp": 1_003_000, "x": 60.0, "y": 8.0 + 19.0 * 66,
            "line": 66, "col": 0, "file": "histogram.c"}]  # concurrent with the edit
        + cluster(1_004_000, 72, 14, "histogram.c")  # on `frequency`, post-insert
    )
    write_session("line_insert_session", original, events, gazes, CONFIG)


def make_refactor_session() -> None:
    lines = [
        "int scale(int value, int delta) {",
        "    int n = value;",
        "    n = n + delta;",
        "    if (n > 100) {",
        "        n = 100;",
        "    }",
        "    return n;",
        "}",
    ]
    original = "\n".join(lines) + "\n"
    file = "scale.c"

    buffer = original
    events: list[dict] = []

    def push(kind: str, offset: int, text: str, ts: int) -> None:
        nonlocal buffer
        e = event_at(buffer, kind, offset, text, ts, file)
        events.append(e)
        buffer = apply(buffer, e)

    # batch 1: `n` on line 1 typed out into `num`, one character at a time
    n_decl = original.index("int n = value") + len("int ")
    push("insert", n_decl + 1, "u", 2_000_000)
    push("insert", n_decl + 2, "m", 2_000_080)
    # batch 2: the whole clamp block (lines 3-5) deleted at once
    block_start = buffer.index("    if (n > 100)")
    block_end = buffer.index("    }\n", block_start) + len("    }\n")
    push("delete", block_start, buffer[block_start:block_end], 2_010_000)
    # batch 3: `delta` on the addition line replaced by `step`
    delta_use = buffer.index("n + delta") + len("n + ")
    push("delete", delta_use, "delta", 2_020_000)
    push("insert", delta_use, "step", 2_020_000)

    gazes = (
        cluster(1_995_000, 1, 8, file)   # on `n` (dies in batch 1)
        + [{"timestamp": 1_995_500, "x": 2000.0, "y": 90.0}]  # outside the editor
        + cluster(1_996_000, 2, 13, file)  # on `delta` (dies in batch 3)
        + [{"timestamp": 2_000_040, "x": 132.0, "y": 27.0,
            "line": 1, "col": 8, "file": file}]  # concurrent with batch 1
        + cluster(2_005_000, 4, 8, file)   # on `n` inside the block batch 2 deletes
        + cluster(2_025_000, 1, 8, file)   # on `num`, after every edit
    )
    write_session("refactor_session", original, events, gazes, CONFIG)


if __name__ == "__main__":
    make_line_insert_session()
    make_refactor_session()
