"""Session domain types and the on-disk session formats.

A recorded session lives in one directory:

* ``original.<ext>`` / ``final.<ext>`` -- file content before the first and
  after the last edit, as saved by the editor.
* ``changes.json`` -- JSON array of edit records with fields
  ``file,type,offset,text,len,timestamp,row,col`` (``type`` is ``insert`` or
  ``delete``).
* ``gazes.jsonl`` -- one JSON object per line with fields
  ``timestamp,x,y,line,col,file``; ``line``/``col``/``file`` are absent for
  samples the editor could not resolve.
* ``session.toml`` -- optional ``key = value`` configuration.

Offsets, lines, and columns are 0-based and count Unicode scalar values.
Logs recorded by JS-based editors may count UTF-16 code units instead; set
``offset_encoding = "utf16"`` in the config and :func:`load_session` will
normalize while replaying.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

from .errors import (
    InvariantViolation,
    MalformedRecord,
    MissingFile,
    NegativeOffset,
    NonMonotonicTimestamps,
)
from .textpos import offset_to_linecol, utf16_length, utf16_to_scalar_offset


class EditKind(Enum):
    INSERT = "insert"
    DELETE = "delete"


class Validity(Enum):
    VALID = "valid"
    OUT_OF_BOUNDS = "out_of_bounds"
    EDIT_CONCURRENT = "edit_concurrent"


@dataclass(frozen=True, slots=True)
class EditEvent:
    """One recorded insert or delete.

    ``offset`` indexes the pre-edit text buffer; ``row``/``col`` are the
    position of that offset in the same buffer. ``length`` equals the
    character count of ``text`` (in the log's offset encoding until the
    session is normalized).
    """

    file: str
    kind: EditKind
    offset: int
    text: str
    length: int
    timestamp: int
    row: int
    col: int

    @property
    def delta(self) -> int:
        """Signed character-count change this edit applies."""
        return self.length if self.kind is EditKind.INSERT else -self.length


@dataclass(frozen=True, slots=True)
class GazeSample:
    """One eye-tracker reading, optionally resolved to a text position."""

    timestamp: int
    x: float
    y: float
    line: int | None = None
    col: int | None = None
    file: str | None = None
    validity: Validity = Validity.VALID

    def __post_init__(self):
        resolved = self.line is not None and self.col is not None and self.file is not None
        if (self.validity is Validity.VALID) != resolved:
            raise ValueError(
                "sample validity inconsistent with presence of line/col/file"
            )


@dataclass(frozen=True, slots=True)
class SessionConfig:
    """Processing knobs stored alongside a session."""

    aggregation_window_ms: int = 3000
    grammar: str = "c-family"
    fixation_algorithm: str = "idt"
    min_duration_ms: int = 100
    dispersion_px: float = 30.0
    offset_encoding: str = "scalar"  # or "utf16"

    def __post_init__(self):
        if self.aggregation_window_ms <= 0:
            raise ValueError("aggregation_window_ms must be positive")
        if self.min_duration_ms <= 0:
            raise ValueError("min_duration_ms must be positive")
        if self.dispersion_px <= 0:
            raise ValueError("dispersion_px must be positive")
        if self.offset_encoding not in ("scalar", "utf16"):
            raise ValueError(f"unknown offset_encoding {self.offset_encoding!r}")


@dataclass(frozen=True, slots=True)
class SessionArchive:
    """Everything recorded for one experiment, validated and normalized."""

    original_text: str
    final_text: str
    edit_log: tuple[EditEvent, ...]
    gaze_log: tuple[GazeSample, ...]
    config: SessionConfig = field(default_factory=SessionConfig)
    file: str | None = None
    extension: str = ""

    @property
    def session_start(self) -> int | None:
        """Earliest timestamp seen in either log, if any."""
        firsts = []
        if self.edit_log:
            firsts.append(self.edit_log[0].timestamp)
        if self.gaze_log:
            firsts.append(self.gaze_log[0].timestamp)
        return min(firsts) if firsts else None


_CHANGE_FIELDS = ("file", "type", "offset", "text", "len", "timestamp", "row", "col")


def _require_int(record: dict, key: str, context: str) -> int:
    value = record[key]
    if type(value) is not int:
        raise MalformedRecord(f"{context}: field {key!r} must be an integer, got {value!r}")
    return value


def parse_change_log(raw: bytes, offset_encoding: str = "scalar") -> list[EditEvent]:
    """Parse a ``changes.json`` payload into edit events, in file order.

    With ``offset_encoding="utf16"`` the ``len`` field is validated against
    the UTF-16 length of ``text``; offsets stay in UTF-16 units until
    :func:`validate_and_normalize_edits` converts them against the buffer.
    """
    try:
        data = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedRecord(f"change log is not valid UTF-8 JSON: {exc}") from exc
    if not isinstance(data, list):
        raise MalformedRecord("change log must be a JSON array")

    events: list[EditEvent] = []
    for i, record in enumerate(data):
        ctx = f"change record {i}"
        if not isinstance(record, dict):
            raise MalformedRecord(f"{ctx}: not a JSON object")
        missing = [k for k in _CHANGE_FIELDS if k not in record]
        if missing:
            raise MalformedRecord(f"{ctx}: missing field(s) {', '.join(missing)}")
        extra = [k for k in record if k not in _CHANGE_FIELDS]
        if extra:
            raise MalformedRecord(f"{ctx}: unknown field(s) {', '.join(extra)}")
        if not isinstance(record["file"], str):
            raise MalformedRecord(f"{ctx}: field 'file' must be a string")
        if record["type"] not in ("insert", "delete"):
            raise MalformedRecord(f"{ctx}: field 'type' must be 'insert' or 'delete'")
        if not isinstance(record["text"], str):
            raise MalformedRecord(f"{ctx}: field 'text' must be a string")
        offset = _require_int(record, "offset", ctx)
        length = _require_int(record, "len", ctx)
        timestamp = _require_int(record, "timestamp", ctx)
        row = _require_int(record, "row", ctx)
        col = _require_int(record, "col", ctx)
        if offset < 0:
            raise NegativeOffset(f"{ctx}: offset {offset} is negative")
        if row < 0 or col < 0:
            raise MalformedRecord(f"{ctx}: row/col must be non-negative")
        text = record["text"]
        expected_len = utf16_length(text) if offset_encoding == "utf16" else len(text)
        if length != expected_len:
            raise MalformedRecord(
                f"{ctx}: len {length} does not match text length {expected_len}"
            )
        if length < 1:
            raise MalformedRecord(f"{ctx}: empty edit text")
        events.append(
            EditEvent(
                file=record["file"],
                kind=EditKind(record["type"]),
                offset=offset,
                text=text,
                length=length,
                timestamp=timestamp,
                row=row,
                col=col,
            )
        )

    for i in range(1, len(events)):
        if events[i].timestamp < events[i - 1].timestamp:
            raise NonMonotonicTimestamps(
                f"change record {i} has timestamp {events[i].timestamp} "
                f"< previous {events[i - 1].timestamp}"
            )
    return events


def serialize_change_log(events: list[EditEvent] | tuple[EditEvent, ...]) -> bytes:
    """Canonical ``changes.json`` bytes for `events`."""
    records = [
        {
            "file": e.file,
            "type": e.kind.value,
            "offset": e.offset,
            "text": e.text,
            "len": e.length,
            "timestamp": e.timestamp,
            "row": e.row,
            "col": e.col,
        }
        for e in events
    ]
    return json.dumps(records, ensure_ascii=False, separators=(",", ":")).encode("utf-8")


_GAZE_REQUIRED = ("timestamp", "x", "y")
_GAZE_OPTIONAL = ("line", "col", "file")


def parse_gaze_log(raw: bytes) -> list[GazeSample]:
    """Parse a ``gazes.jsonl`` payload; unresolved samples become OutOfBounds."""
    samples: list[GazeSample] = []
    for lineno, line in enumerate(raw.decode("utf-8").splitlines()):
        if not line.strip():
            continue
        ctx = f"gaze record at line {lineno + 1}"
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(f"{ctx}: invalid JSON: {exc}") from exc
        if not isinstance(record, dict):
            raise MalformedRecord(f"{ctx}: not a JSON object")
        missing = [k for k in _GAZE_REQUIRED if k not in record]
        if missing:
            raise MalformedRecord(f"{ctx}: missing field(s) {', '.join(missing)}")
        extra = [k for k in record if k not in _GAZE_REQUIRED + _GAZE_OPTIONAL]
        if extra:
            raise MalformedRecord(f"{ctx}: unknown field(s) {', '.join(extra)}")
        timestamp = _require_int(record, "timestamp", ctx)
        for k in ("x", "y"):
            if not isinstance(record[k], (int, float)) or isinstance(record[k], bool):
                raise MalformedRecord(f"{ctx}: field {k!r} must be a number")
        present = [k for k in _GAZE_OPTIONAL if k in record]
        if present and len(present) != len(_GAZE_OPTIONAL):
            raise MalformedRecord(
                f"{ctx}: line/col/file must be present together (got {', '.join(present)})"
            )
        if present:
            line_no = _require_int(record, "line", ctx)
            col_no = _require_int(record, "col", ctx)
            if line_no < 0 or col_no < 0:
                raise MalformedRecord(f"{ctx}: line/col must be non-negative")
            if not isinstance(record["file"], str):
                raise MalformedRecord(f"{ctx}: field 'file' must be a string")
            samples.append(
                GazeSample(
                    timestamp=timestamp,
                    x=float(record["x"]),
                    y=float(record["y"]),
                    line=line_no,
                    col=col_no,
                    file=record["file"],
                )
            )
        else:
            samples.append(
                GazeSample(
                    timestamp=timestamp,
                    x=float(record["x"]),
                    y=float(record["y"]),
                    validity=Validity.OUT_OF_BOUNDS,
                )
            )

    for i in range(1, len(samples)):
        if samples[i].timestamp < samples[i - 1].timestamp:
            raise NonMonotonicTimestamps(
                f"gaze record {i} has timestamp {samples[i].timestamp} "
                f"< previous {samples[i - 1].timestamp}"
            )
    return samples


def _json_number(value: float):
    return int(value) if float(value).is_integer() else value


def serialize_gaze_log(samples: list[GazeSample] | tuple[GazeSample, ...]) -> bytes:
    """Canonical ``gazes.jsonl`` bytes for `samples`."""
    lines = []
    for s in samples:
        record: dict = {"timestamp": s.timestamp, "x": _json_number(s.x), "y": _json_number(s.y)}
        if s.line is not None:
            record["line"] = s.line
            record["col"] = s.col
            record["file"] = s.file
        lines.append(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
    return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")


_CONFIG_KEYS = {
    "aggregation_window_ms": int,
    "grammar": str,
    "fixation_algorithm": str,
    "min_duration_ms": int,
    "dispersion_px": float,
    "offset_encoding": str,
}


def parse_session_config(text: str) -> SessionConfig:
    """Parse ``session.toml``-style ``key = value`` lines."""
    values: dict = {}
    for lineno, line in enumerate(text.splitlines()):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise MalformedRecord(f"session config line {lineno + 1}: expected key = value")
        key, _, raw_value = stripped.partition("=")
        key = key.strip()
        raw_value = raw_value.split("#", 1)[0].strip()
        if key not in _CONFIG_KEYS:
            raise MalformedRecord(f"session config line {lineno + 1}: unknown key {key!r}")
        caster = _CONFIG_KEYS[key]
        if caster is str:
            if len(raw_value) >= 2 and raw_value[0] == raw_value[-1] and raw_value[0] in "\"'":
                raw_value = raw_value[1:-1]
            values[key] = raw_value
        else:
            try:
                values[key] = caster(raw_value)
            except ValueError as exc:
                raise MalformedRecord(
                    f"session config line {lineno + 1}: bad {key} value {raw_value!r}"
                ) from exc
    try:
        return SessionConfig(**values)
    except ValueError as exc:
        raise MalformedRecord(f"session config: {exc}") from exc


def validate_and_normalize_edits(
    original: str, events: list[EditEvent], offset_encoding: str = "scalar"
) -> list[EditEvent]:
    """Replay `events` over `original`, checking per-edit invariants.

    Verifies that each edit's (row, col) matches its offset in the pre-edit
    buffer and that every delete names the text actually present. With
    ``utf16`` encoding, offsets/columns/lengths are converted to scalar
    values first. Returns normalized events; raises InvariantViolation with
    the offending edit index otherwise.
    """
    buffer = original
    normalized: list[EditEvent] = []
    for i, e in enumerate(events):
        if offset_encoding == "utf16":
            try:
                offset = utf16_to_scalar_offset(buffer, e.offset)
            except ValueError as exc:
                raise InvariantViolation(f"edit {i}: {exc}", edit_index=i) from exc
            row, col = offset_to_linecol(buffer, offset)
            # Logged column counts UTF-16 units within the line.
            logged_col = utf16_length(buffer[offset - col : offset])
            if (e.row, e.col) != (row, logged_col):
                raise InvariantViolation(
                    f"edit {i}: logged position ({e.row}, {e.col}) does not match "
                    f"offset {offset} at ({row}, {logged_col} UTF-16 units)",
                    edit_index=i,
                )
            e = replace(e, offset=offset, length=len(e.text), row=row, col=col)
        else:
            if e.offset > len(buffer):
                raise InvariantViolation(
                    f"edit {i}: offset {e.offset} past end of buffer ({len(buffer)} chars)",
                    edit_index=i,
                )
            row, col = offset_to_linecol(buffer, e.offset)
            if (e.row, e.col) != (row, col):
                raise InvariantViolation(
                    f"edit {i}: logged position ({e.row}, {e.col}) does not match "
                    f"offset {e.offset} at ({row}, {col})",
                    edit_index=i,
                )
        if e.kind is EditKind.DELETE:
            if e.offset + e.length > len(buffer):
                raise InvariantViolation(
                    f"edit {i}: delete of {e.length} chars at {e.offset} extends "
                    f"past end of buffer ({len(buffer)} chars)",
                    edit_index=i,
                )
            actual = buffer[e.offset : e.offset + e.length]
            if actual != e.text:
                raise InvariantViolation(
                    f"edit {i}: delete text {e.text!r} does not match buffer {actual!r}",
                    edit_index=i,
                )
            buffer = buffer[: e.offset] + buffer[e.offset + e.length :]
        else:
            buffer = buffer[: e.offset] + e.text + buffer[e.offset :]
        normalized.append(e)
    return normalized


def _find_one(directory: Path, stem: str) -> Path:
    matches = sorted(p for p in directory.glob(f"{stem}.*") if p.is_file())
    if not matches:
        raise MissingFile(f"{directory} has no {stem}.<ext> file")
    if len(matches) > 1:
        raise InvariantViolation(
            f"{directory} has multiple {stem}.* files: {', '.join(p.name for p in matches)}"
        )
    return matches[0]


def load_session(directory: str | Path) -> SessionArchive:
    """Load and validate a session directory into a SessionArchive."""
    directory = Path(directory)
    if not directory.is_dir():
        raise MissingFile(f"session directory {directory} does not exist")

    changes_path = directory / "changes.json"
    gazes_path = directory / "gazes.jsonl"
    for p in (changes_path, gazes_path):
        if not p.is_file():
            raise MissingFile(f"{p.name} missing from {directory}")
    original_path = _find_one(directory, "original")
    final_path = _find_one(directory, "final")
    if original_path.suffix != final_path.suffix:
        raise InvariantViolation(
            f"original ({original_path.name}) and final ({final_path.name}) "
            "have different extensions"
        )

    config_path = directory / "session.toml"
    config = (
        parse_session_config(config_path.read_text(encoding="utf-8"))
        if config_path.is_file()
        else SessionConfig()
    )

    original_text = original_path.read_text(encoding="utf-8")
    final_text = final_path.read_text(encoding="utf-8")
    edits = parse_change_log(changes_path.read_bytes(), config.offset_encoding)
    gazes = parse_gaze_log(gazes_path.read_bytes())

    edits = validate_and_normalize_edits(original_text, edits, config.offset_encoding)

    files = {e.file for e in edits} | {g.file for g in gazes if g.file is not None}
    if len(files) > 1:
        raise InvariantViolation(
            f"multi-file sessions are not supported; saw {', '.join(sorted(files))}"
        )

    return SessionArchive(
        original_text=original_text,
        final_text=final_text,
        edit_log=tuple(edits),
        gaze_log=tuple(gazes),
        config=config,
        file=next(iter(files)) if files else None,
        extension=original_path.suffix,
    )
