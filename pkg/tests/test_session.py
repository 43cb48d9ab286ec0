from __future__ import annotations

import json
import random
import shutil

import pytest

from gazetrace.errors import (
    InvariantViolation,
    MalformedRecord,
    MissingFile,
    NegativeOffset,
    NonMonotonicTimestamps,
)
from gazetrace.session import (
    EditEvent,
    EditKind,
    GazeSample,
    SessionConfig,
    Validity,
    load_session,
    parse_change_log,
    parse_gaze_log,
    parse_session_config,
    serialize_change_log,
    serialize_gaze_log,
    validate_and_normalize_edits,
)

import helpers


CANONICAL_CHANGES = (
    b'[{"file":"a.c","type":"insert","offset":0,"text":"x","len":1,'
    b'"timestamp":1000,"row":0,"col":0}]'
)


def test_parse_change_log_single_insert():
    events = parse_change_log(CANONICAL_CHANGES)
    assert len(events) == 1
    e = events[0]
    assert e.kind is EditKind.INSERT
    assert (e.offset, e.text, e.length, e.timestamp, e.row, e.col) == (0, "x", 1, 1000, 0, 0)
    assert e.delta == 1


def test_parse_change_log_empty():
    assert parse_change_log(b"[]") == []


def test_parse_change_log_len_mismatch():
    bad = json.dumps(
        [{"file": "a.c", "type": "insert", "offset": 0, "text": "x", "len": 2,
          "timestamp": 1, "row": 0, "col": 0}]
    ).encode()
    with pytest.raises(MalformedRecord):
        parse_change_log(bad)


@pytest.mark.parametrize(
    "mutation",
    [
        lambda r: r.pop("offset"),
        lambda r: r.update(offset="3"),
        lambda r: r.update(type="replace"),
        lambda r: r.update(text=7),
        lambda r: r.update(extra=1),
        lambda r: r.update(timestamp=1.5),
        lambda r: r.update(text="", len=0),
        lambda r: r.update(row=-1),
    ],
)
def test_parse_change_log_malformed(mutation):
    record = {"file": "a.c", "type": "insert", "offset": 0, "text": "x", "len": 1,
              "timestamp": 1, "row": 0, "col": 0}
    mutation(record)
    with pytest.raises(MalformedRecord):
        parse_change_log(json.dumps([record]).encode())


def test_parse_change_log_negative_offset():
    record = {"file": "a.c", "type": "insert", "offset": -1, "text": "x", "len": 1,
              "timestamp": 1, "row": 0, "col": 0}
    with pytest.raises(NegativeOffset):
        parse_change_log(json.dumps([record]).encode())


def test_parse_change_log_non_monotonic():
    records = [
        {"file": "a.c", "type": "insert", "offset": 0, "text": "x", "len": 1,
         "timestamp": 5, "row": 0, "col": 0},
        {"file": "a.c", "type": "insert", "offset": 0, "text": "y", "len": 1,
         "timestamp": 4, "row": 0, "col": 0},
    ]
    with pytest.raises(NonMonotonicTimestamps):
        parse_change_log(json.dumps(records).encode())


def test_parse_change_log_not_json():
    with pytest.raises(MalformedRecord):
        parse_change_log(b"{not json")
    with pytest.raises(MalformedRecord):
        parse_change_log(b'{"a": 1}')


def test_change_log_roundtrip_is_canonical():
    assert serialize_change_log(parse_change_log(CANONICAL_CHANGES)) == CANONICAL_CHANGES


def test_change_log_roundtrip_random():
    rng = random.Random(7)
    original = helpers.random_source(rng, 30)
    events, _ = helpers.random_edit_script(rng, original, 60)
    payload = serialize_change_log(events)
    assert parse_change_log(payload) == events
    assert serialize_change_log(parse_change_log(payload)) == payload


CANONICAL_GAZES = (
    b'{"timestamp":1500,"x":400,"y":300,"line":63,"col":10,"file":"a.c"}\n'
    b'{"timestamp":1600,"x":-5,"y":300}\n'
)


def test_parse_gaze_log_valid_and_out_of_bounds():
    samples = parse_gaze_log(CANONICAL_GAZES)
    assert len(samples) == 2
    assert samples[0].validity is Validity.VALID
    assert (samples[0].line, samples[0].col, samples[0].file) == (63, 10, "a.c")
    assert samples[1].validity is Validity.OUT_OF_BOUNDS
    assert samples[1].line is None and samples[1].col is None and samples[1].file is None


def test_parse_gaze_log_empty():
    assert parse_gaze_log(b"") == []


def test_parse_gaze_log_partial_resolution_rejected():
    bad = b'{"timestamp":1,"x":1,"y":1,"line":3}\n'
    with pytest.raises(MalformedRecord):
        parse_gaze_log(bad)


def test_parse_gaze_log_non_monotonic():
    bad = (
        b'{"timestamp":2,"x":1,"y":1}\n'
        b'{"timestamp":1,"x":1,"y":1}\n'
    )
    with pytest.raises(NonMonotonicTimestamps):
        parse_gaze_log(bad)


def test_parse_gaze_log_rejects_bad_fields():
    with pytest.raises(MalformedRecord):
        parse_gaze_log(b'{"timestamp":1,"x":"a","y":1}\n')
    with pytest.raises(MalformedRecord):
        parse_gaze_log(b'{"x":1,"y":1}\n')
    with pytest.raises(MalformedRecord):
        parse_gaze_log(b'{"timestamp":1,"x":1,"y":1,"weird":0}\n')


def test_gaze_log_roundtrip_is_canonical():
    assert serialize_gaze_log(parse_gaze_log(CANONICAL_GAZES)) == CANONICAL_GAZES


def test_gaze_sample_validity_consistency():
    with pytest.raises(ValueError):
        GazeSample(timestamp=1, x=0, y=0, line=3, col=None, file="a.c")
    with pytest.raises(ValueError):
        GazeSample(timestamp=1, x=0, y=0, validity=Validity.OUT_OF_BOUNDS,
                   line=1, col=1, file="a.c")


def test_parse_session_config():
    cfg = parse_session_config(
        """
        # comment
        aggregation_window_ms = 2000
        grammar = "c-family"
        dispersion_px = 25.5   # trailing comment
        offset_encoding = scalar
        """
    )
    assert cfg.aggregation_window_ms == 2000
    assert cfg.dispersion_px == 25.5
    assert cfg.min_duration_ms == 100  # default preserved


def test_parse_session_config_rejects_unknown_key():
    with pytest.raises(MalformedRecord):
        parse_session_config("wat = 1")
    with pytest.raises(MalformedRecord):
        parse_session_config("aggregation_window_ms = soon")
    with pytest.raises(MalformedRecord):
        parse_session_config("aggregation_window_ms = -3")


def test_session_config_validation():
    with pytest.raises(ValueError):
        SessionConfig(offset_encoding="utf32")
    with pytest.raises(ValueError):
        SessionConfig(min_duration_ms=0)


def test_load_session_fixture(line_insert_session):
    archive = load_session(line_insert_session)
    assert len(archive.edit_log) == 1
    assert len(archive.gaze_log) == 50
    assert archive.file == "histogram.c"
    assert archive.extension == ".c"
    assert archive.session_start == 1_000_000
    assert archive.config.aggregation_window_ms == 3000


def test_load_session_missing_gaze_log(line_insert_session, tmp_path):
    target = tmp_path / "s"
    shutil.copytree(line_insert_session, target)
    (target / "gazes.jsonl").unlink()
    with pytest.raises(MissingFile, match="gazes.jsonl"):
        load_session(target)


def test_load_session_missing_original(line_insert_session, tmp_path):
    target = tmp_path / "s"
    shutil.copytree(line_insert_session, target)
    (target / "original.c").unlink()
    with pytest.raises(MissingFile, match="original"):
        load_session(target)


def test_load_session_corrupted_delete(refactor_session, tmp_path):
    target = tmp_path / "s"
    shutil.copytree(refactor_session, target)
    records = json.loads((target / "changes.json").read_text())
    deletes = [i for i, r in enumerate(records) if r["type"] == "delete"]
    k = deletes[0]
    records[k]["text"] = "Z" * records[k]["len"]
    (target / "changes.json").write_text(json.dumps(records))
    with pytest.raises(InvariantViolation) as excinfo:
        load_session(target)
    assert excinfo.value.edit_index == k
    assert f"edit {k}" in str(excinfo.value)


def test_load_session_row_col_mismatch(refactor_session, tmp_path):
    target = tmp_path / "s"
    shutil.copytree(refactor_session, target)
    records = json.loads((target / "changes.json").read_text())
    records[0]["row"] += 1
    (target / "changes.json").write_text(json.dumps(records))
    with pytest.raises(InvariantViolation) as excinfo:
        load_session(target)
    assert excinfo.value.edit_index == 0


def test_load_session_rejects_multi_file(line_insert_session, tmp_path):
    target = tmp_path / "s"
    shutil.copytree(line_insert_session, target)
    records = json.loads((target / "changes.json").read_text())
    records[0]["file"] = "another.c"
    (target / "changes.json").write_text(json.dumps(records))
    with pytest.raises(InvariantViolation, match="multi-file"):
        load_session(target)


def _one_edit_session(tmp_path, original, event, config_lines=None, final=None):
    if final is None:
        final = helpers.splice_oracle(original, [event])
    return helpers.write_session_dir(
        tmp_path / "s", original, final, [event], [], config_lines=config_lines
    )


def test_load_session_utf16_offsets(tmp_path):
    # one astral character before the edit point: scalar and UTF-16 disagree
    original = 'int a = 1; // \U0001F600 note\nint b = 2;\n'
    insert_at = original.index("int b")  # scalar offset
    utf16_at = insert_at + 1  # the emoji takes two UTF-16 units
    event = EditEvent(
        file="a.c", kind=EditKind.INSERT, offset=utf16_at, text="int c = 3;\n",
        length=11, timestamp=1000, row=1, col=0,
    )
    final = original[:insert_at] + "int c = 3;\n" + original[insert_at:]
    directory = _one_edit_session(
        tmp_path, original, event,
        config_lines=["offset_encoding = utf16"], final=final,
    )
    archive = load_session(directory)
    assert archive.edit_log[0].offset == insert_at  # normalized to scalar values
    assert archive.edit_log[0].length == 11


def test_load_session_utf16_column_units(tmp_path):
    # edit later on a line that contains an astral char: column is in UTF-16 units
    original = "x = '\U0001F600';\n"
    scalar_offset = original.index(";")
    event = EditEvent(
        file="a.c", kind=EditKind.INSERT, offset=scalar_offset + 1, text="!",
        length=1, timestamp=1000, row=0, col=scalar_offset + 1,
    )
    final = original[:scalar_offset] + "!" + original[scalar_offset:]
    directory = _one_edit_session(
        tmp_path, original, event,
        config_lines=["offset_encoding = utf16"], final=final,
    )
    archive = load_session(directory)
    e = archive.edit_log[0]
    assert e.offset == scalar_offset
    assert e.col == scalar_offset  # scalar column after normalization


def test_validate_and_normalize_detects_offset_past_end():
    event = EditEvent(file="a.c", kind=EditKind.INSERT, offset=99, text="x",
                      length=1, timestamp=1, row=0, col=99)
    with pytest.raises(InvariantViolation):
        validate_and_normalize_edits("short", [event])
