"""Follow individual tokens through a session: births, moves, and deaths.

Every token gets an integer id in the original snapshot; an id survives an
edit exactly when its token was untouched (possibly shifted). A rename or
rewrite kills the old id and births a new one, so ids are trustworthy
handles for "the same piece of code" across time.

Run from the repository root:  python demos/02_token_timelines.py
"""

from pathlib import Path

from gazetrace import load_session, process_session

session_dir = Path(__file__).parent / "data" / "refactor_session"
ps = process_session(load_session(session_dir))

print("original text:")
print(ps.snapshots[0].text)
print("final text:")
print(ps.snapshots[-1].text)

n_snapshots = len(ps.snapshots)
print(f"token timelines across {n_snapshots} snapshots "
      f"({len(ps.timelines)} ids ever issued):\n")

header = "  ".join(f"s{k}" for k in range(n_snapshots))
print(f"{'id':>4} {'text':<12} {header}   (line:col per snapshot)")
for token_id in sorted(ps.timelines):
    tl = ps.timelines[token_id]
    cells = []
    for k in range(n_snapshots):
        sighting = tl.sighting_at(k)
        cells.append(f"{sighting.line}:{sighting.col}" if sighting else "--")
    life = f"born s{tl.birth_snapshot}"
    if tl.death_snapshot is not None:
        life += f", died s{tl.death_snapshot}"
    print(f"{token_id:>4} {tl.text!r:<12} " + "  ".join(f"{c:>5}" for c in cells)
          + f"   {life}")

# what each batch did
from gazetrace import tokens_changed_by

print()
for k in range(1, len(ps.batches) + 1):
    cs = tokens_changed_by(ps, k)
    died = [ps.tables[k - 1].by_id[i].text for i in cs.died]
    born = [ps.tables[k].by_id[i].text for i in cs.born]
    print(f"batch {k}: killed {died or 'nothing'}, created {born or 'nothing'}, "
          f"orphaned {len(cs.affected_fixations)} earlier fixation(s)")
