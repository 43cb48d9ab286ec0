"""Replay a recorded editing session into snapshots and verify the result.

The session directory holds the original file, the editor-saved final file,
a change log, and a gaze log. Every edit batch produces one snapshot; the
last snapshot must reproduce the final file byte for byte.

Run from the repository root:  python demos/01_replay_edits.py
"""

from pathlib import Path

from gazetrace import batch_edits, build_snapshots, load_session, verify_final

session_dir = Path(__file__).parent / "data" / "refactor_session"
archive = load_session(session_dir)

print(f"session file: {archive.file}")
print(f"edits: {len(archive.edit_log)}, gazes: {len(archive.gaze_log)}")

batches = batch_edits(archive.edit_log, archive.config.aggregation_window_ms)
print(f"\n{len(batches)} edit batches (window {archive.config.aggregation_window_ms} ms):")
for b in batches:
    kinds = ", ".join(e.kind.value for e in b.edits)
    print(f"  batch {b.index}: {len(b.edits)} edit(s) [{kinds}] "
          f"over {b.t_end - b.t_start} ms, net {b.delta:+d} chars, "
          f"touched chars {b.old_range.start}..{b.old_range.end} of the previous text")

snapshots = build_snapshots(archive.original_text, batches, archive.session_start)
print(f"\n{len(snapshots)} snapshots:")
for s in snapshots:
    until = s.valid_to if s.valid_to is not None else "end of session"
    print(f"  snapshot {s.index}: {len(s.text)} chars, valid {s.valid_from} -> {until}")

report = verify_final(snapshots[-1], archive.final_text)
if report.matched:
    print("\nreplay verified: last snapshot equals the editor-saved final file")
else:
    print(f"\nreplay DIVERGED at offset {report.first_divergence}:")
    print(f"  snapshot: ...{report.context[0]!r}...")
    print(f"  final:    ...{report.context[1]!r}...")
