"""The problem this library exists to solve, end to end.

A participant fixates an identifier, then a line is inserted above it.
Static line/column mapping now points at the wrong text: the position that
used to hold `frequency` is whitespace in the new snapshot. Token tracking
keeps the attribution correct and can re-express any fixation in any
snapshot where its token is alive.

Run from the repository root:  python demos/03_fixations_across_edits.py
"""

from pathlib import Path

from gazetrace import (
    adjust_to_snapshot,
    fixations_on_token,
    load_session,
    map_to_token,
    process_session,
)

session_dir = Path(__file__).parent / "data" / "line_insert_session"
ps = process_session(load_session(session_dir))

counts = ps.sample_counts
print(f"{counts.total} gaze samples: {counts.valid} valid, "
      f"{counts.out_of_bounds} outside the editor, "
      f"{counts.edit_concurrent} discarded as edit-concurrent")
print(f"{len(ps.fixations)} fixations detected\n")

for i, f in enumerate(ps.fixations):
    token = ps.tables[f.snapshot_index].by_id.get(f.token_id)
    target = f"token {f.token_id} ({token.text!r})" if token else "whitespace"
    print(f"  fixation {i}: snapshot {f.snapshot_index}, line {f.line} col {f.col}, "
          f"{f.duration_ms} ms -> {target}")

fixation = ps.fixations[2]  # the one recorded on `frequency`
print(f"\nfixation 2 was recorded at line {fixation.line} before the edit.")

naive = map_to_token(fixation.line, fixation.col, ps.tables[1])
print(f"static mapping of (line {fixation.line}, col {fixation.col}) in the "
      f"post-edit snapshot finds: {naive if naive is not None else 'whitespace'}")

line, col = adjust_to_snapshot(ps, fixation, 1)
token = ps.tables[1].by_id[fixation.token_id]
print(f"the tracker knows token {fixation.token_id} ({token.text!r}) moved to "
      f"line {line}, and adjusts the fixation to (line {line}, col {col})")

history = fixations_on_token(ps, fixation.token_id)
print(f"\nall fixations ever recorded on {token.text!r}:")
for f in history:
    print(f"  snapshot {f.snapshot_index}: line {f.line}, {f.duration_ms} ms, "
          f"{f.sample_count} samples")
total = sum(f.duration_ms for f in history)
print(f"total dwell on {token.text!r} across the whole session: {total} ms")
