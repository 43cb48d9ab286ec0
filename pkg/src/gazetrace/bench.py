"""High-rate gaze ingestion benchmark.

Reproduces the retention measurement: a producer generates mock gaze
samples inside the editor viewport at a configured rate (60-2000 Hz),
resolves each to (line, col) through the monospace-grid geometry model on
the hot path, and hands it to an asynchronous consumer over a bounded
queue. The consumer persists samples in batches using the gazes.jsonl
format. The report compares samples sent against samples resolved and
persisted, with resolve-latency percentiles.

The queue never blocks the producer: when it is full the sample is dropped
and counted, so backpressure shows up as lost retention exactly like a
saturated editor event loop would lose gazes.
"""

from __future__ import annotations

import json
import queue
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import OutputUnwritable

_MAX_LEDGER_SAMPLES = 5_000_000


@dataclass(frozen=True, slots=True)
class EditorGeometry:
    """Monospace editor grid: where text sits inside the viewport.

    ``scale_factor`` multiplies raw tracker coordinates into editor-logical
    pixels (use 1/devicePixelRatio when the tracker reports physical device
    pixels). ``folds`` lists collapsed buffer-line ranges, inclusive on both
    ends; folded lines are hidden entirely from the display.
    """

    gutter_px: float = 60.0
    line_height_px: float = 20.0
    char_width_px: float = 9.0
    scroll_top_line: int = 0
    scroll_left_col: int = 0
    viewport_w_px: float = 1680.0
    viewport_h_px: float = 1050.0
    scale_factor: float = 1.0
    folds: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        for name in ("gutter_px", "line_height_px", "char_width_px",
                     "viewport_w_px", "viewport_h_px", "scale_factor"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.scroll_top_line < 0 or self.scroll_left_col < 0:
            raise ValueError("scroll origin must be non-negative")
        prev_end = -1
        for a, b in self.folds:
            if a < 0 or b < a:
                raise ValueError(f"invalid fold range ({a}, {b})")
            if a <= prev_end:
                raise ValueError("folds must be sorted and non-overlapping")
            prev_end = b


def display_row_to_buffer_line(row: int, folds: tuple[tuple[int, int], ...]) -> int:
    """Buffer line shown at display row `row`, skipping folded ranges."""
    line = row
    for a, b in folds:
        if line >= a:
            line += b - a + 1
        else:
            break
    return line


def resolve_point(g: EditorGeometry, x: float, y: float) -> tuple[int, int] | None:
    """Resolve raw screen coordinates to a 0-based (line, col), or None if invalid.

    Coordinates are scaled first; anything outside the viewport or left of
    the gutter is invalid. This is the ingestion hot path.
    """
    sx = x * g.scale_factor
    sy = y * g.scale_factor
    if sx < 0 or sy < 0 or sx >= g.viewport_w_px or sy >= g.viewport_h_px:
        return None
    if sx < g.gutter_px:
        return None
    row = g.scroll_top_line + int(sy // g.line_height_px)
    line = display_row_to_buffer_line(row, g.folds)
    col = g.scroll_left_col + int((sx - g.gutter_px) // g.char_width_px)
    return line, col


@dataclass(frozen=True, slots=True)
class BenchConfig:
    """One benchmark run: sampling rate, duration, files, queue, geometry."""

    rate_hz: int
    duration_s: float
    output: Path
    open_files: int = 1
    queue_capacity: int = 8192
    geometry: EditorGeometry = field(default_factory=EditorGeometry)
    write_batch: int = 256
    consumer_sleep_s: float = 0.0  # failure injection: slow the consumer
    rng_seed: int | None = None

    def __post_init__(self):
        if not 60 <= self.rate_hz <= 2000:
            raise ValueError(f"rate_hz {self.rate_hz} outside supported range [60, 2000]")
        if self.duration_s <= 0:
            raise ValueError("duration_s must be positive")
        if self.open_files < 1:
            raise ValueError("open_files must be at least 1")
        if self.queue_capacity < 1:
            raise ValueError("queue_capacity must be at least 1")
        if self.write_batch < 1:
            raise ValueError("write_batch must be at least 1")
        total = int(self.rate_hz * self.duration_s)
        if total > _MAX_LEDGER_SAMPLES:
            raise ValueError(
                f"{total} samples exceed the in-memory ledger budget "
                f"({_MAX_LEDGER_SAMPLES})"
            )


@dataclass(frozen=True, slots=True)
class RetentionReport:
    """Sent vs resolved vs persisted, with hot-path latency percentiles."""

    rate_hz: int
    duration_s: float
    open_files: int
    sent: int
    resolved: int
    persisted: int
    retention: float
    latency_us_p50: float
    latency_us_p99: float
    latency_us_max: float
    drops_by_cause: dict[str, int]
    persisted_verified: bool
    verify_mismatches: int

    def as_dict(self) -> dict:
        return {
            "rate_hz": self.rate_hz,
            "duration_s": self.duration_s,
            "open_files": self.open_files,
            "sent": self.sent,
            "resolved": self.resolved,
            "persisted": self.persisted,
            "retention": self.retention,
            "latency_us": {
                "p50": self.latency_us_p50,
                "p99": self.latency_us_p99,
                "max": self.latency_us_max,
            },
            "drops_by_cause": dict(self.drops_by_cause),
            "persisted_verified": self.persisted_verified,
            "verify_mismatches": self.verify_mismatches,
        }

    def human_table(self) -> str:
        rows = [
            ("rate", f"{self.rate_hz} Hz"),
            ("duration", f"{self.duration_s:g} s"),
            ("open files", str(self.open_files)),
            ("sent", str(self.sent)),
            ("resolved", str(self.resolved)),
            ("persisted", str(self.persisted)),
            ("retention", f"{self.retention:.6f}"),
            ("resolve p50", f"{self.latency_us_p50:.1f} us"),
            ("resolve p99", f"{self.latency_us_p99:.1f} us"),
            ("resolve max", f"{self.latency_us_max:.1f} us"),
            ("dropped (queue full)", str(self.drops_by_cause.get("queue_full", 0))),
            ("dropped (invalid)", str(self.drops_by_cause.get("invalid", 0))),
            ("persisted verified", "yes" if self.persisted_verified else "NO"),
        ]
        width = max(len(name) for name, _ in rows)
        return "\n".join(f"{name:<{width}}  {value}" for name, value in rows)


def _consumer_loop(
    q: queue.Queue,
    path: Path,
    write_batch: int,
    sleep_s: float,
    result: dict,
) -> None:
    written = 0
    try:
        with open(path, "w", encoding="utf-8") as fh:
            batch: list[str] = []
            while True:
                item = q.get()
                if item is None:
                    break
                ts, x, y, line, col, fname = item
                batch.append(
                    json.dumps(
                        {"timestamp": ts, "x": x, "y": y, "line": line, "col": col,
                         "file": fname},
                        separators=(",", ":"),
                    )
                )
                if len(batch) >= write_batch:
                    fh.write("\n".join(batch) + "\n")
                    written += len(batch)
                    batch.clear()
                    if sleep_s:
                        time.sleep(sleep_s)
            if batch:
                fh.write("\n".join(batch) + "\n")
                written += len(batch)
    except OSError as exc:
        result["error"] = exc
    result["written"] = written


def run_benchmark(cfg: BenchConfig) -> RetentionReport:
    """Run one producer/consumer retention experiment and verify its output.

    The producer paces itself against absolute deadlines (t0 + k/rate) so
    timing error never accumulates, resolves each sample on the hot path,
    and never blocks: a full queue means a counted drop. After both roles
    finish, every persisted sample is checked against the generation ledger
    and against an offline recomputation of resolve_point.
    """
    g = cfg.geometry
    total = int(cfg.rate_hz * cfg.duration_s)
    period = 1.0 / cfg.rate_hz
    rng = np.random.default_rng(cfg.rng_seed)

    # Mock gazes land inside the text area of the viewport (in scaled
    # coordinates), like a participant reading the open file.
    margin = 1.0
    sx = rng.uniform(g.gutter_px + margin, g.viewport_w_px - margin, total)
    sy = rng.uniform(margin, g.viewport_h_px - margin, total)
    xs = sx / g.scale_factor
    ys = sy / g.scale_factor
    file_names = [f"mock_{i}.c" for i in range(cfg.open_files)]

    out_path = Path(cfg.output)
    try:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.touch()
    except OSError as exc:
        raise OutputUnwritable(f"cannot write benchmark output {out_path}: {exc}") from exc

    q: queue.Queue = queue.Queue(maxsize=cfg.queue_capacity)
    consumer_result: dict = {}
    consumer = threading.Thread(
        target=_consumer_loop,
        args=(q, out_path, cfg.write_batch, cfg.consumer_sleep_s, consumer_result),
        name="gaze-writer",
    )
    consumer.start()

    ledger: list[tuple] = []  # (ts, x, y, line, col, file, enqueued)
    latencies_ns = np.empty(total, dtype=np.int64)
    drops_queue_full = 0
    drops_invalid = 0
    base_ms = time.time_ns() // 1_000_000
    perf = time.perf_counter
    perf_ns = time.perf_counter_ns
    t0 = perf()
    for k in range(total):
        remaining = t0 + k * period - perf()
        if remaining > 0:
            time.sleep(remaining)
        ts = base_ms + int((perf() - t0) * 1000)
        x = xs[k]
        y = ys[k]
        begin = perf_ns()
        resolved = resolve_point(g, x, y)
        latencies_ns[k] = perf_ns() - begin
        if resolved is None:
            drops_invalid += 1
            ledger.append((ts, x, y, None, None, None, False))
            continue
        line, col = resolved
        fname = file_names[k % cfg.open_files]
        try:
            q.put_nowait((ts, x, y, line, col, fname))
            ledger.append((ts, x, y, line, col, fname, True))
        except queue.Full:
            drops_queue_full += 1
            ledger.append((ts, x, y, line, col, fname, False))

    q.put(None)
    consumer.join()
    if "error" in consumer_result:
        raise OutputUnwritable(
            f"benchmark output failed mid-run: {consumer_result['error']}"
        )

    persisted, mismatches = _verify_persisted(out_path, g, ledger)
    resolved_count = total - drops_invalid
    latencies_us = latencies_ns.astype(np.float64) / 1000.0
    p50, p99 = (np.percentile(latencies_us, [50, 99]) if total else (0.0, 0.0))
    return RetentionReport(
        rate_hz=cfg.rate_hz,
        duration_s=cfg.duration_s,
        open_files=cfg.open_files,
        sent=total,
        resolved=resolved_count,
        persisted=persisted,
        retention=persisted / total if total else 1.0,
        latency_us_p50=float(p50),
        latency_us_p99=float(p99),
        latency_us_max=float(latencies_us.max()) if total else 0.0,
        drops_by_cause={"queue_full": drops_queue_full, "invalid": drops_invalid},
        persisted_verified=mismatches == 0,
        verify_mismatches=mismatches,
    )


def _verify_persisted(path: Path, g: EditorGeometry, ledger: list[tuple]) -> tuple[int, int]:
    """Check the persisted stream sample-by-sample against the ledger.

    Every persisted record must match its ledger entry in order, and its
    (line, col) must equal a fresh offline resolve_point run on its (x, y).
    Returns (persisted_count, mismatch_count).
    """
    expected = [entry for entry in ledger if entry[6]]
    mismatches = 0
    count = 0
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            raw = raw.strip()
            if not raw:
                continue
            record = json.loads(raw)
            if count >= len(expected):
                mismatches += 1
                count += 1
                continue
            ts, x, y, line, col, fname, _ = expected[count]
            ok = (
                record.get("timestamp") == ts
                and record.get("x") == x
                and record.get("y") == y
                and record.get("line") == line
                and record.get("col") == col
                and record.get("file") == fname
                and resolve_point(g, record["x"], record["y"]) == (record["line"], record["col"])
            )
            if not ok:
                mismatches += 1
            count += 1
    if count != len(expected):
        mismatches += abs(len(expected) - count)
    return count, mismatches
