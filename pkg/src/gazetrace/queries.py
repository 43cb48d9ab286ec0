"""Aggregate queries over a fully processed session.

:func:`process_session` runs the whole pipeline -- batching, snapshot
replay, verification, tokenization, id tracking, gaze partitioning,
fixation detection -- and the query operations answer the questions the
data was collected for: every fixation a token ever received, a fixation's
position re-expressed in another snapshot, and what an edit killed or
created.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnknownBatch, UnknownTokenId
from .fixations import (
    FilterConfig,
    Fixation,
    GazeSlice,
    detect_fixations,
    partition_gazes,
)
from .session import SessionArchive, Validity
from .snapshots import (
    EditBatch,
    Snapshot,
    VerificationReport,
    batch_edits,
    build_snapshots,
    verify_final,
)
from .tokenizer import tokenize
from .tracking import TokenTable, TokenTimeline, build_timelines, track_tokens
from .textpos import line_starts, line_of_offset


@dataclass(frozen=True, slots=True)
class SampleCounts:
    """How every input gaze sample was classified."""

    valid: int
    out_of_bounds: int
    edit_concurrent: int

    @property
    def total(self) -> int:
        return self.valid + self.out_of_bounds + self.edit_concurrent


@dataclass(frozen=True)
class ProcessedSession:
    """A session archive plus everything derived from it."""

    archive: SessionArchive
    batches: tuple[EditBatch, ...]
    snapshots: tuple[Snapshot, ...]
    verification: VerificationReport
    tables: tuple[TokenTable, ...]
    timelines: dict[int, TokenTimeline]
    slices: tuple[GazeSlice, ...]
    fixations: tuple[Fixation, ...]
    sample_counts: SampleCounts


def process_session(archive: SessionArchive) -> ProcessedSession:
    """Run the full pipeline over a validated archive."""
    cfg = archive.config
    batches = batch_edits(archive.edit_log, cfg.aggregation_window_ms)
    snapshots = build_snapshots(
        archive.original_text, batches, session_start=archive.session_start
    )
    verification = verify_final(snapshots[-1], archive.final_text)
    tables = track_tokens(
        [s.text for s in snapshots], batches, lambda text: tokenize(text, cfg.grammar)
    )
    timelines = build_timelines(tables)
    slices = partition_gazes(archive.gaze_log, snapshots, batches)

    filter_cfg = FilterConfig(
        algorithm=cfg.fixation_algorithm,
        min_duration_ms=cfg.min_duration_ms,
        dispersion_px=cfg.dispersion_px,
    )
    fixations: list[Fixation] = []
    for sl in slices:
        fixations.extend(detect_fixations(sl, filter_cfg, tables[sl.snapshot_index]))

    counts = SampleCounts(
        valid=sum(len(sl.samples) for sl in slices),
        out_of_bounds=sum(
            1 for g in archive.gaze_log if g.validity is not Validity.VALID
        ),
        edit_concurrent=sum(sl.discarded_count for sl in slices),
    )
    return ProcessedSession(
        archive=archive,
        batches=tuple(batches),
        snapshots=tuple(snapshots),
        verification=verification,
        tables=tuple(tables),
        timelines=timelines,
        slices=tuple(slices),
        fixations=tuple(fixations),
        sample_counts=counts,
    )


def fixations_on_token(session: ProcessedSession, token_id: int) -> list[Fixation]:
    """Every fixation attributed to `token_id`, across all snapshots, in time order."""
    if token_id not in session.timelines:
        raise UnknownTokenId(f"token id {token_id} was never issued")
    return sorted(
        (f for f in session.fixations if f.token_id == token_id),
        key=lambda f: (f.t_start, f.snapshot_index),
    )


def adjust_to_snapshot(
    session: ProcessedSession, fixation: Fixation, target: int
) -> tuple[int, int] | None:
    """Re-express a fixation's position in another snapshot, if its token is alive there.

    Returns the adjusted 0-based (line, col), or None when the fixation hit
    no token or its token does not exist in the target snapshot.
    """
    if not 0 <= target < len(session.snapshots):
        raise ValueError(
            f"snapshot {target} out of range (session has {len(session.snapshots)})"
        )
    if fixation.token_id is None:
        return None
    timeline = session.timelines[fixation.token_id]
    target_sighting = timeline.sighting_at(target)
    if target_sighting is None:
        return None
    own_sighting = timeline.sighting_at(fixation.snapshot_index)
    own_text = session.snapshots[fixation.snapshot_index].text
    own_starts = line_starts(own_text)
    fixation_offset = own_starts[fixation.line] + fixation.col
    within = fixation_offset - own_sighting.span.start
    within = max(0, min(within, max(len(own_sighting.text) - 1, 0)))

    target_text = session.snapshots[target].text
    target_starts = line_starts(target_text)
    target_offset = target_sighting.span.start + within
    line = line_of_offset(target_starts, target_offset)
    return line, target_offset - target_starts[line]


@dataclass(frozen=True)
class ChangeSet:
    """What one edit batch did to token identities and earlier fixations."""

    batch_index: int
    died: tuple[int, ...]
    born: tuple[int, ...]
    affected_fixations: tuple[Fixation, ...]

    def as_dict(self) -> dict:
        return {
            "batch": self.batch_index,
            "died": list(self.died),
            "born": list(self.born),
            "affected_fixations": [f.as_dict() for f in self.affected_fixations],
        }


def tokens_changed_by(session: ProcessedSession, batch_index: int) -> ChangeSet:
    """Token ids killed and created by batch `batch_index`, with orphaned fixations."""
    if not 1 <= batch_index <= len(session.batches):
        raise UnknownBatch(
            f"batch {batch_index} out of range (session has {len(session.batches)})"
        )
    before = session.tables[batch_index - 1].ids
    after = session.tables[batch_index].ids
    died = frozenset(before - after)
    return ChangeSet(
        batch_index=batch_index,
        died=tuple(sorted(died)),
        born=tuple(sorted(after - before)),
        affected_fixations=tuple(
            f
            for f in session.fixations
            if f.token_id in died and f.snapshot_index < batch_index
        ),
    )
