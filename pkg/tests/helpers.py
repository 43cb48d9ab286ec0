"""Independent oracles and random-input generators shared by the test suite.

Everything here deliberately avoids the library's own algorithms: replay is
plain string splicing one edit at a time, hulls come from character-wise
diffing, I-DT recomputes dispersion from scratch over explicit windows, and
token rematching scans all old/new token pairs. The engine must agree with
these, never the other way around.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

from gazetrace.session import EditEvent, EditKind, GazeSample
from gazetrace.fixations import FilterConfig
from gazetrace.snapshots import EditBatch
from gazetrace.tokenizer import RawToken
from gazetrace.tracking import TokenTable


# ---------------------------------------------------------------- replay

def splice_oracle(original: str, events) -> str:
    """Apply every edit in order as a plain string splice, no batching."""
    text = original
    for e in events:
        if e.kind is EditKind.INSERT:
            text = text[: e.offset] + e.text + text[e.offset :]
        else:
            assert text[e.offset : e.offset + e.length] == e.text
            text = text[: e.offset] + text[e.offset + e.length :]
    return text


def minimal_diff_hull(old: str, new: str) -> tuple[tuple[int, int], tuple[int, int]]:
    """Smallest (old_range, new_range) covering every difference.

    Prefix-greedy: where repeated text makes the diff position ambiguous,
    the hull sits as far right as possible.
    """
    p = 0
    limit = min(len(old), len(new))
    while p < limit and old[p] == new[p]:
        p += 1
    s = 0
    while s < limit - p and old[len(old) - 1 - s] == new[len(new) - 1 - s]:
        s += 1
    return (p, len(old) - s), (p, len(new) - s)


def common_prefix_len(a: str, b: str) -> int:
    n = 0
    limit = min(len(a), len(b))
    while n < limit and a[n] == b[n]:
        n += 1
    return n


def common_suffix_len(a: str, b: str) -> int:
    n = 0
    limit = min(len(a), len(b))
    while n < limit and a[len(a) - 1 - n] == b[len(b) - 1 - n]:
        n += 1
    return n


# ---------------------------------------------------------------- fixations

def brute_idt(samples, cfg: FilterConfig) -> list[tuple[int, int]]:
    """Literal I-DT: enumerate windows, recomputing dispersion every time."""

    def dispersion(window) -> float:
        xs = [s.x for s in window]
        ys = [s.y for s in window]
        return (max(xs) - min(xs)) + (max(ys) - min(ys))

    n = len(samples)
    windows = []
    i = 0
    while i < n:
        j = None
        for cand in range(i, n):
            if samples[cand].timestamp - samples[i].timestamp >= cfg.min_duration_ms:
                j = cand
                break
        if j is None:
            break
        if dispersion(samples[i : j + 1]) <= cfg.dispersion_px:
            k = j
            while k + 1 < n and dispersion(samples[i : k + 2]) <= cfg.dispersion_px:
                k += 1
            windows.append((i, k))
            i = k + 1
        else:
            i += 1
    return windows


# ---------------------------------------------------------------- tracking

def rematch_oracle(
    prev: TokenTable, batch: EditBatch, new_tokens: list[RawToken]
) -> list[int | None]:
    """From-scratch identity matching: all old tokens against each new token.

    Returns, per new token, the inherited old id or None. Asserts the rule
    never yields two candidates.
    """
    old_r, new_r, delta = batch.old_range, batch.new_range, batch.delta
    inherited: list[int | None] = []
    for tok in new_tokens:
        matches = []
        for old_id, old_tok in prev.entries:
            if tok.span.end <= new_r.start:
                if old_tok.span.end > old_r.start:
                    continue
                if (old_tok.span.start, old_tok.span.end) != (tok.span.start, tok.span.end):
                    continue
            elif tok.span.start >= new_r.end:
                if old_tok.span.start < old_r.end:
                    continue
                if (old_tok.span.start + delta, old_tok.span.end + delta) != (
                    tok.span.start,
                    tok.span.end,
                ):
                    continue
            else:
                continue
            if old_tok.kind is not tok.kind or old_tok.text != tok.text:
                continue
            matches.append(old_id)
        assert len(matches) <= 1, f"identity rule matched twice: {matches}"
        inherited.append(matches[0] if matches else None)
    return inherited


def oracle_tables(snapshot_texts, batches, tokenizer) -> list[list[int]]:
    """Session-wide id assignment driven purely by rematch_oracle."""
    tables: list[list[int]] = []
    tokens0 = tokenizer(snapshot_texts[0])
    tables.append(list(range(len(tokens0))))
    prev_tokens = tokens0
    next_fresh = len(tokens0)
    for batch, text in zip(batches, snapshot_texts[1:]):
        prev_table = TokenTable(
            snapshot_index=len(tables) - 1,
            text=snapshot_texts[len(tables) - 1],
            entries=tuple(zip(tables[-1], prev_tokens)),
        )
        new_tokens = tokenizer(text)
        ids = []
        for inherited in rematch_oracle(prev_table, batch, new_tokens):
            if inherited is None:
                ids.append(next_fresh)
                next_fresh += 1
            else:
                ids.append(inherited)
        tables.append(ids)
        prev_tokens = new_tokens
    return tables


# ---------------------------------------------------------------- geometry

def brute_display_to_buffer(row: int, folds) -> int:
    """Enumerate visible buffer lines one by one and take the row-th."""
    hidden = set()
    for a, b in folds:
        hidden.update(range(a, b + 1))
    line = 0
    seen = 0
    while True:
        if line not in hidden:
            if seen == row:
                return line
            seen += 1
        line += 1


# ---------------------------------------------------------------- generators

_WORDS = [
    "count", "total", "value", "index", "buffer", "limit", "sum", "tmp",
    "size", "left", "right", "node", "depth", "flag", "result", "step",
]
_KEYWORDS = ["int", "if", "else", "while", "return", "for", "long", "void"]
_LINE_SHAPES = [
    "{kw} {w} = {n};",
    "{w} = {w2} + {n};",
    "if ({w} == {n}) {{",
    "}}",
    "{kw} {w}({w2});",
    "// {w} {w2}",
    "{w}[{n}] = {w2};",
    "return {w};",
]


def random_source(rng: random.Random, max_lines: int) -> str:
    lines = []
    for _ in range(rng.randint(1, max_lines)):
        shape = rng.choice(_LINE_SHAPES)
        indent = " " * (4 * rng.randint(0, 3))
        lines.append(
            indent
            + shape.format(
                kw=rng.choice(_KEYWORDS),
                w=rng.choice(_WORDS),
                w2=rng.choice(_WORDS),
                n=rng.randint(0, 999),
            )
        )
    return "\n".join(lines) + "\n"


def _event(kind: EditKind, buffer: str, offset: int, text: str, ts: int) -> EditEvent:
    row = buffer.count("\n", 0, offset)
    col = offset - (buffer.rfind("\n", 0, offset) + 1)
    return EditEvent(
        file="a.c", kind=kind, offset=offset, text=text,
        length=len(text), timestamp=ts, row=row, col=col,
    )


def random_edit_script(
    rng: random.Random,
    original: str,
    max_edits: int,
    window_ms: int = 3000,
    t0: int = 1_000_000,
) -> tuple[list[EditEvent], str]:
    """A valid edit log over `original`: bursts, pastes, multi-line deletes.

    Gaps mix values inside and beyond the aggregation window so batching is
    actually exercised. Returns (events, final_text).
    """
    buffer = original
    events: list[EditEvent] = []
    t = t0
    budget = rng.randint(0, max_edits)
    while len(events) < budget:
        roll = rng.random()
        if roll < 0.30 and len(buffer) >= 2:
            # delete a (possibly multi-line) span
            length = min(rng.randint(1, 40), len(buffer))
            offset = rng.randint(0, len(buffer) - length)
            events.append(_event(EditKind.DELETE, buffer, offset,
                                 buffer[offset : offset + length], t))
            buffer = buffer[:offset] + buffer[offset + length :]
        elif roll < 0.45:
            # paste: multi-character, often multi-line
            n_lines = rng.randint(1, 4)
            chunk = "".join(
                rng.choice(_WORDS) + rng.choice([" ", ";\n", " + ", "\n"])
                for _ in range(n_lines)
            )
            offset = rng.randint(0, len(buffer))
            events.append(_event(EditKind.INSERT, buffer, offset, chunk, t))
            buffer = buffer[:offset] + chunk + buffer[offset:]
        elif roll < 0.60 and len(events) + 2 <= budget:
            # replace: delete + insert at the same spot, same timestamp
            length = min(rng.randint(1, 8), len(buffer))
            if length == 0:
                continue
            offset = rng.randint(0, len(buffer) - length)
            removed = buffer[offset : offset + length]
            events.append(_event(EditKind.DELETE, buffer, offset, removed, t))
            buffer = buffer[:offset] + buffer[offset + length :]
            word = rng.choice(_WORDS)
            events.append(_event(EditKind.INSERT, buffer, offset, word, t))
            buffer = buffer[:offset] + word + buffer[offset:]
        else:
            # autocomplete-style burst: characters typed one by one
            word = rng.choice(_WORDS)[: rng.randint(1, 6)]
            offset = rng.randint(0, len(buffer))
            for ch in word:
                if len(events) >= budget:
                    break
                events.append(_event(EditKind.INSERT, buffer, offset, ch, t))
                buffer = buffer[:offset] + ch + buffer[offset:]
                offset += 1
                t += rng.randint(0, 80)
        # mostly stay inside the window, sometimes jump past it
        if rng.random() < 0.7:
            t += rng.randint(0, window_ms)
        else:
            t += window_ms + rng.randint(1, 2 * window_ms)
    return events, buffer


def cluster(
    t_start: int,
    line: int,
    col: int,
    x: float,
    y: float,
    file: str = "a.c",
    n: int = 12,
    step_ms: int = 10,
) -> list[GazeSample]:
    """A tight, fixation-worthy sample cluster at one text position."""
    return [
        GazeSample(
            timestamp=t_start + i * step_ms,
            x=x + (i % 3) * 0.5,
            y=y + (i % 2) * 0.5,
            line=line,
            col=col if i % 3 else col + 1,
            file=file,
        )
        for i in range(n)
    ]


def random_gaze_stream(rng: random.Random, n_clusters: int, t0: int = 1_000_000):
    """Alternating tight clusters and scattered noise, timestamp-sorted."""
    samples: list[GazeSample] = []
    t = t0
    for _ in range(n_clusters):
        cx = rng.uniform(100, 1500)
        cy = rng.uniform(50, 1000)
        for _ in range(rng.randint(3, 25)):
            samples.append(
                GazeSample(
                    timestamp=t,
                    x=cx + rng.uniform(-10, 10),
                    y=cy + rng.uniform(-10, 10),
                    line=rng.randint(0, 40),
                    col=rng.randint(0, 60),
                    file="a.c",
                )
            )
            t += rng.randint(4, 30)
        for _ in range(rng.randint(0, 4)):  # saccade noise between clusters
            samples.append(
                GazeSample(
                    timestamp=t,
                    x=rng.uniform(0, 1600),
                    y=rng.uniform(0, 1000),
                    line=rng.randint(0, 40),
                    col=rng.randint(0, 60),
                    file="a.c",
                )
            )
            t += rng.randint(4, 30)
    return samples


# ---------------------------------------------------------------- sessions

def write_session_dir(
    directory: Path,
    original: str,
    final: str,
    events,
    gazes,
    config_lines: list[str] | None = None,
    ext: str = ".c",
) -> Path:
    """Materialize a session directory in the on-disk layout."""
    directory.mkdir(parents=True, exist_ok=True)
    (directory / f"original{ext}").write_text(original, encoding="utf-8")
    (directory / f"final{ext}").write_text(final, encoding="utf-8")
    records = [
        {
            "file": e.file, "type": e.kind.value, "offset": e.offset,
            "text": e.text, "len": e.length, "timestamp": e.timestamp,
            "row": e.row, "col": e.col,
        }
        for e in events
    ]
    (directory / "changes.json").write_text(json.dumps(records), encoding="utf-8")
    lines = []
    for g in gazes:
        record = {"timestamp": g.timestamp, "x": g.x, "y": g.y}
        if g.line is not None:
            record.update(line=g.line, col=g.col, file=g.file)
        lines.append(json.dumps(record))
    (directory / "gazes.jsonl").write_text(
        "\n".join(lines) + ("\n" if lines else ""), encoding="utf-8"
    )
    if config_lines is not None:
        (directory / "session.toml").write_text(
            "\n".join(config_lines) + "\n", encoding="utf-8"
        )
    return directory
