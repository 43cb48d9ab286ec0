"""Gaze partitioning, fixation detection, and fixation-to-token mapping.

Valid gaze samples are assigned to the snapshot whose validity interval
contains their timestamp. Samples timestamped inside a batch's closed
[t_start, t_end] window are edit-concurrent: the text was in flux, so they
cannot be attributed to any snapshot and are discarded (but counted).

Fixation detection is dispersion-threshold identification (I-DT): a window
is seeded over the minimum duration, accepted when its dispersion
(max x - min x) + (max y - min y) stays within the threshold, then extended
sample by sample while that holds. Alternative detectors plug in through
:func:`register_fixation_algorithm`.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import PositionOutOfFile
from .session import GazeSample, Validity
from .snapshots import EditBatch, Snapshot
from .tracking import TokenTable


@dataclass(frozen=True, slots=True)
class FilterConfig:
    """Fixation-filter parameters."""

    algorithm: str = "idt"
    min_duration_ms: int = 100
    dispersion_px: float = 30.0

    def __post_init__(self):
        if self.algorithm not in FIXATION_ALGORITHMS:
            raise ValueError(
                f"unknown fixation algorithm {self.algorithm!r}; "
                f"registered: {', '.join(sorted(FIXATION_ALGORITHMS))}"
            )
        if self.min_duration_ms <= 0:
            raise ValueError("min_duration_ms must be positive")
        if self.dispersion_px <= 0:
            raise ValueError("dispersion_px must be positive")


@dataclass(frozen=True, slots=True)
class GazeSlice:
    """The valid samples of one snapshot, plus how many were edit-concurrent.

    ``discarded_count`` counts samples dropped for the batch that produced
    this slice's snapshot (always 0 for slice 0).
    """

    snapshot_index: int
    samples: tuple[GazeSample, ...]
    discarded_count: int


@dataclass(frozen=True, slots=True)
class Fixation:
    """A temporally and spatially stable cluster of gaze samples."""

    snapshot_index: int
    t_start: int
    t_end: int
    duration_ms: int
    centroid_x: float
    centroid_y: float
    line: int
    col: int
    token_id: int | None
    sample_count: int

    def as_dict(self) -> dict:
        return {
            "snapshot": self.snapshot_index,
            "t_start": self.t_start,
            "t_end": self.t_end,
            "duration_ms": self.duration_ms,
            "centroid_x": self.centroid_x,
            "centroid_y": self.centroid_y,
            "line": self.line,
            "col": self.col,
            "token_id": self.token_id,
            "sample_count": self.sample_count,
        }


def partition_gazes(
    gazes: Sequence[GazeSample],
    snapshots: list[Snapshot],
    batches: list[EditBatch],
) -> list[GazeSlice]:
    """Split valid samples into per-snapshot slices, discarding edit-concurrent ones.

    Returns exactly one slice per snapshot, in order. Out-of-bounds samples
    belong to no slice; edit-concurrent samples are counted on the slice of
    the snapshot their batch produced.
    """
    if len(snapshots) != len(batches) + 1:
        raise ValueError(
            f"{len(snapshots)} snapshots do not match {len(batches)} batches"
        )
    t_starts = [b.t_start for b in batches]
    t_ends = [b.t_end for b in batches]
    per_snapshot: list[list[GazeSample]] = [[] for _ in snapshots]
    discarded = [0] * len(snapshots)
    for g in gazes:
        if g.validity is not Validity.VALID:
            continue
        ts = g.timestamp
        batch_idx = bisect_right(t_starts, ts) - 1
        if batch_idx >= 0 and ts <= t_ends[batch_idx]:
            discarded[batch_idx + 1] += 1
            continue
        per_snapshot[bisect_right(t_ends, ts)].append(g)
    return [
        GazeSlice(snapshot_index=i, samples=tuple(samples), discarded_count=discarded[i])
        for i, samples in enumerate(per_snapshot)
    ]


def _idt_windows(samples: Sequence[GazeSample], cfg: FilterConfig) -> list[tuple[int, int]]:
    """Inclusive (first, last) sample-index windows per the I-DT rule."""
    n = len(samples)
    windows: list[tuple[int, int]] = []
    i = 0
    while i < n:
        j = i
        while j < n and samples[j].timestamp - samples[i].timestamp < cfg.min_duration_ms:
            j += 1
        if j == n:
            break  # the remaining samples cannot span the minimum duration
        xs = [s.x for s in samples[i : j + 1]]
        ys = [s.y for s in samples[i : j + 1]]
        min_x, max_x = min(xs), max(xs)
        min_y, max_y = min(ys), max(ys)
        if (max_x - min_x) + (max_y - min_y) <= cfg.dispersion_px:
            k = j
            while k + 1 < n:
                s = samples[k + 1]
                nmin_x, nmax_x = min(min_x, s.x), max(max_x, s.x)
                nmin_y, nmax_y = min(min_y, s.y), max(max_y, s.y)
                if (nmax_x - nmin_x) + (nmax_y - nmin_y) > cfg.dispersion_px:
                    break
                min_x, max_x, min_y, max_y = nmin_x, nmax_x, nmin_y, nmax_y
                k += 1
            windows.append((i, k))
            i = k + 1
        else:
            i += 1
    return windows


FixationAlgorithm = Callable[[Sequence[GazeSample], FilterConfig], list[tuple[int, int]]]

FIXATION_ALGORITHMS: dict[str, FixationAlgorithm] = {"idt": _idt_windows}


def register_fixation_algorithm(name: str, fn: FixationAlgorithm) -> None:
    """Register an alternative fixation detector under `name`."""
    FIXATION_ALGORITHMS[name] = fn


def _majority_position(samples: Sequence[GazeSample]) -> tuple[int, int]:
    counts: dict[tuple[int, int], int] = {}
    first_seen: dict[tuple[int, int], int] = {}
    for idx, s in enumerate(samples):
        key = (s.line, s.col)
        counts[key] = counts.get(key, 0) + 1
        first_seen.setdefault(key, idx)
    return max(counts, key=lambda k: (counts[k], -first_seen[k]))


def detect_fixations(
    gaze_slice: GazeSlice,
    cfg: FilterConfig,
    table: TokenTable | None = None,
) -> list[Fixation]:
    """Run the configured fixation filter over one slice.

    The fixation position is the majority (line, col) among member samples
    (earliest wins ties); `table`, when given, resolves it to a token id.
    """
    samples = gaze_slice.samples
    fixations: list[Fixation] = []
    for first, last in FIXATION_ALGORITHMS[cfg.algorithm](samples, cfg):
        members = samples[first : last + 1]
        line, col = _majority_position(members)
        token_id = None
        if table is not None:
            try:
                token_id = map_to_token(line, col, table)
            except PositionOutOfFile:
                token_id = None  # gaze log may point past the snapshot's last line
        fixations.append(
            Fixation(
                snapshot_index=gaze_slice.snapshot_index,
                t_start=members[0].timestamp,
                t_end=members[-1].timestamp,
                duration_ms=members[-1].timestamp - members[0].timestamp,
                centroid_x=sum(s.x for s in members) / len(members),
                centroid_y=sum(s.y for s in members) / len(members),
                line=line,
                col=col,
                token_id=token_id,
                sample_count=len(members),
            )
        )
    return fixations


def map_to_token(line: int, col: int, table: TokenTable) -> int | None:
    """Id of the token whose span contains character (line, col), if any.

    Returns None for whitespace and for columns past the end of the line;
    raises PositionOutOfFile when `line` exceeds the snapshot's line count.
    """
    starts = table.line_starts
    if line < 0 or line >= len(starts):
        raise PositionOutOfFile(
            f"line {line} outside snapshot {table.snapshot_index} "
            f"({len(starts)} lines)"
        )
    if col < 0:
        raise ValueError(f"negative column {col}")
    line_end = starts[line + 1] - 1 if line + 1 < len(starts) else len(table.text)
    offset = starts[line] + col
    if offset >= line_end:
        return None  # beyond the last content character of the line
    hit = table.entry_at_offset(offset)
    return hit[0] if hit is not None else None
