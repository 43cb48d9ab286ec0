"""Stable token identity across snapshots.

Every token in snapshot 0 gets a unique integer id. When a batch produces
snapshot k, a token of snapshot k inherits the id of a snapshot k-1 token
exactly when both lie entirely outside the batch's edited hull on the same
side, the old span shifted by 0 (before the hull) or by the batch delta
(after it) equals the new span, and kind and text are unchanged. Everything
else gets a fresh id, ids are never reused, and a token whose text changes
always changes id. If two tokens anywhere in the session share an id they
are the same token.
"""

from __future__ import annotations

import itertools
from bisect import bisect_right
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator

from .errors import RangeInconsistency
from .snapshots import EditBatch
from .textpos import CharRange, line_starts
from .tokenizer import RawToken


@dataclass(frozen=True)
class TokenTable:
    """The id-annotated token list of one snapshot, plus its text."""

    snapshot_index: int
    text: str
    entries: tuple[tuple[int, RawToken], ...]

    def __post_init__(self):
        ids = [token_id for token_id, _ in self.entries]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate token id in table")
        spans = [t.span for _, t in self.entries]
        for prev, cur in zip(spans, spans[1:]):
            if cur.start < prev.end:
                raise ValueError("table entries not in strict span order")

    @cached_property
    def ids(self) -> frozenset[int]:
        return frozenset(token_id for token_id, _ in self.entries)

    @cached_property
    def by_id(self) -> dict[int, RawToken]:
        return {token_id: tok for token_id, tok in self.entries}

    @cached_property
    def _by_span(self) -> dict[tuple[int, int], tuple[int, RawToken]]:
        return {(t.span.start, t.span.end): (token_id, t) for token_id, t in self.entries}

    @cached_property
    def _span_starts(self) -> list[int]:
        return [t.span.start for _, t in self.entries]

    @cached_property
    def line_starts(self) -> list[int]:
        return line_starts(self.text)

    def entry_at_span(self, start: int, end: int) -> tuple[int, RawToken] | None:
        return self._by_span.get((start, end))

    def entry_at_offset(self, offset: int) -> tuple[int, RawToken] | None:
        """The (id, token) whose span contains `offset`, if any."""
        idx = bisect_right(self._span_starts, offset) - 1
        if idx >= 0:
            token_id, tok = self.entries[idx]
            if tok.span.contains_offset(offset):
                return token_id, tok
        return None

    def max_id(self) -> int:
        return max(self.ids, default=-1)


def assign_initial_ids(
    tokens: list[RawToken], text: str, snapshot_index: int = 0
) -> TokenTable:
    """Table for the original snapshot: ids 0..n-1 in span order."""
    return TokenTable(
        snapshot_index=snapshot_index,
        text=text,
        entries=tuple(enumerate(tokens)),
    )


def advance(
    prev: TokenTable,
    batch: EditBatch,
    new_tokens: list[RawToken],
    text: str,
    ids: Iterator[int] | None = None,
) -> TokenTable:
    """Carry ids from `prev` onto the tokens of the snapshot `batch` produced.

    `ids` supplies fresh ids; pass one shared counter per session so ids are
    never reused after a token dies in an intermediate snapshot. When None,
    fresh ids start after the largest id in `prev` (sufficient for a single
    step, not for a whole session).
    """
    if ids is None:
        ids = itertools.count(prev.max_id() + 1)
    old_r, new_r, delta = batch.old_range, batch.new_range, batch.delta

    entries: list[tuple[int, RawToken]] = []
    for tok in new_tokens:
        inherited: int | None = None
        if tok.span.entirely_before(new_r):
            candidate = tok.span
            same_side = CharRange.entirely_before
        elif tok.span.entirely_after(new_r):
            candidate = tok.span.shifted(-delta)
            same_side = CharRange.entirely_after
        else:
            candidate = None
        if candidate is not None:
            if candidate.start < 0 or candidate.end > len(prev.text):
                raise RangeInconsistency(
                    f"batch {batch.index}: shifted span [{candidate.start}, "
                    f"{candidate.end}) falls outside the previous snapshot"
                )
            hit = prev.entry_at_span(candidate.start, candidate.end)
            if hit is not None:
                old_id, old_tok = hit
                if same_side(old_tok.span, old_r):
                    if old_tok.text != tok.text:
                        # Text outside the hull must survive verbatim.
                        raise RangeInconsistency(
                            f"batch {batch.index}: token at {candidate} changed "
                            f"text outside the edited hull "
                            f"({old_tok.text!r} -> {tok.text!r})"
                        )
                    if old_tok.kind is tok.kind:
                        inherited = old_id
        entries.append((inherited if inherited is not None else next(ids), tok))

    return TokenTable(
        snapshot_index=prev.snapshot_index + 1,
        text=text,
        entries=tuple(entries),
    )


def edited_range(batch: EditBatch) -> tuple[CharRange, CharRange]:
    """The batch's edited hull: (pre-batch range, post-batch range)."""
    return batch.old_range, batch.new_range


@dataclass(frozen=True, slots=True)
class TokenSighting:
    """Where one token sat in one snapshot."""

    snapshot_index: int
    span: CharRange
    line: int
    col: int
    text: str


@dataclass(frozen=True)
class TokenTimeline:
    """The life of one token id: birth, optional death, per-snapshot spans."""

    token_id: int
    birth_snapshot: int
    death_snapshot: int | None  # first snapshot where the id is absent
    sightings: tuple[TokenSighting, ...]

    @property
    def text(self) -> str:
        return self.sightings[0].text

    def alive_at(self, snapshot_index: int) -> bool:
        if snapshot_index < self.birth_snapshot:
            return False
        return self.death_snapshot is None or snapshot_index < self.death_snapshot

    def sighting_at(self, snapshot_index: int) -> TokenSighting | None:
        if not self.alive_at(snapshot_index):
            return None
        return self.sightings[snapshot_index - self.birth_snapshot]


def build_timelines(tables: list[TokenTable]) -> dict[int, TokenTimeline]:
    """One timeline per ever-issued id, keyed by id."""
    births: dict[int, int] = {}
    deaths: dict[int, int] = {}
    sightings: dict[int, list[TokenSighting]] = {}
    previous_ids: frozenset[int] = frozenset()
    for table in tables:
        for token_id, tok in table.entries:
            if token_id not in births:
                births[token_id] = table.snapshot_index
            elif token_id in deaths:
                raise ValueError(f"token id {token_id} reappeared after death")
            sightings.setdefault(token_id, []).append(
                TokenSighting(
                    snapshot_index=table.snapshot_index,
                    span=tok.span,
                    line=tok.line,
                    col=tok.col,
                    text=tok.text,
                )
            )
        for token_id in previous_ids - table.ids:
            deaths.setdefault(token_id, table.snapshot_index)
        previous_ids = table.ids

    return {
        token_id: TokenTimeline(
            token_id=token_id,
            birth_snapshot=births[token_id],
            death_snapshot=deaths.get(token_id),
            sightings=tuple(sightings[token_id]),
        )
        for token_id in births
    }


def track_tokens(
    snapshot_texts: list[str],
    batches: list[EditBatch],
    tokenizer,
) -> list[TokenTable]:
    """Tokenize every snapshot and thread ids through the whole session.

    `tokenizer` is a callable from text to a RawToken list (see the
    tokenizer module's grammar contract).
    """
    if len(snapshot_texts) != len(batches) + 1:
        raise ValueError(
            f"{len(snapshot_texts)} snapshots need {len(snapshot_texts) - 1} "
            f"batches, got {len(batches)}"
        )
    tables = [assign_initial_ids(tokenizer(snapshot_texts[0]), snapshot_texts[0])]
    fresh = itertools.count(len(tables[0].entries))
    for batch, text in zip(batches, snapshot_texts[1:]):
        tables.append(advance(tables[-1], batch, tokenizer(text), text, ids=fresh))
    return tables
