"""Edit-log replay: batching, snapshot construction, final verification.

Edits made close together in time (inter-edit gap at or below the
aggregation window, 3000 ms by default) are grouped into one batch; each
batch applied to the previous snapshot yields the next one. A snapshot is
valid from the end of the batch that produced it until the start of the
next batch; while a batch is in progress no snapshot is valid.

Each batch also carries an *edited hull*: one contiguous character range in
pre-batch coordinates and one in post-batch coordinates that conservatively
cover everything the batch touched. Text outside the hull is guaranteed
unchanged (shifted by the batch's net delta on the right side), which is
what makes token identity transport safe.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DeleteMismatch, OffsetOutOfRange
from .session import EditEvent, EditKind
from .textpos import CharRange


@dataclass(frozen=True, slots=True)
class EditBatch:
    """A maximal run of temporally close edits, applied as one step."""

    index: int  # 1-based; snapshot k is produced by batch k
    edits: tuple[EditEvent, ...]
    t_start: int
    t_end: int
    old_range: CharRange  # hull in pre-batch coordinates
    new_range: CharRange  # hull in post-batch coordinates
    delta: int  # net character-count change

    def __post_init__(self):
        if not self.edits:
            raise ValueError("a batch must contain at least one edit")
        if len(self.new_range) - len(self.old_range) != self.delta:
            raise ValueError(
                "hull lengths inconsistent with delta: "
                f"{len(self.new_range)} - {len(self.old_range)} != {self.delta}"
            )


@dataclass(frozen=True)
class Snapshot:
    """Full file content valid over a time interval.

    ``valid_from``/``valid_to`` of None mean unbounded (session start for
    snapshot 0, forever for the last snapshot).
    """

    index: int
    text: str
    valid_from: int | None
    valid_to: int | None
    produced_by: EditBatch | None  # None for snapshot 0

    def contains_time(self, timestamp: int) -> bool:
        if self.valid_from is not None and timestamp < self.valid_from:
            return False
        if self.valid_to is not None and timestamp >= self.valid_to:
            return False
        return True


@dataclass(frozen=True, slots=True)
class VerificationReport:
    """Outcome of comparing the last snapshot to the editor-saved final file."""

    matched: bool
    first_divergence: int | None
    context: tuple[str, str] | None  # (snapshot excerpt, final excerpt)

    def as_dict(self) -> dict:
        return {
            "matched": self.matched,
            "first_divergence": self.first_divergence,
            "context": None
            if self.context is None
            else {"snapshot": self.context[0], "final": self.context[1]},
        }


def apply_edit(text: str, e: EditEvent) -> str:
    """Apply one insert or delete to `text` by plain string splicing."""
    if e.kind is EditKind.INSERT:
        if not 0 <= e.offset <= len(text):
            raise OffsetOutOfRange(
                f"insert offset {e.offset} outside buffer of length {len(text)}"
            )
        return text[: e.offset] + e.text + text[e.offset :]
    if e.offset < 0 or e.offset + e.length > len(text):
        raise OffsetOutOfRange(
            f"delete span [{e.offset}, {e.offset + e.length}) outside "
            f"buffer of length {len(text)}"
        )
    actual = text[e.offset : e.offset + e.length]
    if actual != e.text:
        raise DeleteMismatch(
            f"delete at offset {e.offset} expected {e.text!r}, buffer has {actual!r}"
        )
    return text[: e.offset] + text[e.offset + e.length :]


def compose_edit_hull(edits: tuple[EditEvent, ...] | list[EditEvent]) -> tuple[CharRange, CharRange, int]:
    """Fold per-edit spans into one (old_range, new_range, delta) hull.

    Maintains the invariant that, relative to the pre-batch text T0 and the
    text T after the edits applied so far, the prefixes before the hull and
    the suffixes after it are equal: T[:start] == T0[:start] and
    T[end + delta:] == T0[end:]. Each edit touching [a, b) in current
    coordinates widens the hull by whatever falls outside it.
    """
    if not edits:
        raise ValueError("cannot compose an empty edit list")
    first = edits[0]
    start = first.offset
    end = first.offset + (first.length if first.kind is EditKind.DELETE else 0)
    delta = first.delta
    for e in edits[1:]:
        a = e.offset
        b = e.offset + (e.length if e.kind is EditKind.DELETE else 0)
        new_end = end + delta  # hull right edge in current coordinates
        if a < start:
            start = a
        if b > new_end:
            end += b - new_end
        delta += e.delta
    return CharRange(start, end), CharRange(start, end + delta), delta


def batch_edits(
    edits: list[EditEvent] | tuple[EditEvent, ...], window_ms: int = 3000
) -> list[EditBatch]:
    """Partition timestamp-sorted edits into maximal runs with gaps <= window."""
    if window_ms <= 0:
        raise ValueError("window_ms must be positive")
    batches: list[EditBatch] = []
    run: list[EditEvent] = []
    for e in edits:
        if run and e.timestamp - run[-1].timestamp > window_ms:
            batches.append(_make_batch(len(batches) + 1, run))
            run = []
        run.append(e)
    if run:
        batches.append(_make_batch(len(batches) + 1, run))
    return batches


def _make_batch(index: int, run: list[EditEvent]) -> EditBatch:
    old_range, new_range, delta = compose_edit_hull(run)
    return EditBatch(
        index=index,
        edits=tuple(run),
        t_start=run[0].timestamp,
        t_end=run[-1].timestamp,
        old_range=old_range,
        new_range=new_range,
        delta=delta,
    )


def build_snapshots(
    original: str,
    batches: list[EditBatch],
    session_start: int | None = None,
) -> list[Snapshot]:
    """Replay batches over `original`, producing the ordered snapshot list.

    Snapshot k becomes valid when batch k's last edit lands and stays valid
    until batch k+1's first edit.
    """
    snapshots = [
        Snapshot(
            index=0,
            text=original,
            valid_from=session_start,
            valid_to=batches[0].t_start if batches else None,
            produced_by=None,
        )
    ]
    text = original
    for i, batch in enumerate(batches):
        for j, e in enumerate(batch.edits):
            try:
                text = apply_edit(text, e)
            except (OffsetOutOfRange, DeleteMismatch) as exc:
                raise type(exc)(f"batch {batch.index}, edit {j}: {exc}") from exc
        snapshots.append(
            Snapshot(
                index=i + 1,
                text=text,
                valid_from=batch.t_end,
                valid_to=batches[i + 1].t_start if i + 1 < len(batches) else None,
                produced_by=batch,
            )
        )
    return snapshots


def verify_final(last: Snapshot, final_text: str) -> VerificationReport:
    """Compare the last snapshot against the editor-saved final file."""
    a, b = last.text, final_text
    if a == b:
        return VerificationReport(matched=True, first_divergence=None, context=None)
    limit = min(len(a), len(b))
    divergence = limit
    for i in range(limit):
        if a[i] != b[i]:
            divergence = i
            break
    lo = max(0, divergence - 40)
    return VerificationReport(
        matched=False,
        first_divergence=divergence,
        context=(a[lo : divergence + 40], b[lo : divergence + 40]),
    )
