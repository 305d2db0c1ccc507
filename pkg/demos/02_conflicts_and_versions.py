"""
Contradictions, resolutions, and time travel
============================================

Two decisions that can't both be true open a conflict; resolving it
with "supersede" retires the old one non-destructively. The as-of and
changed-since views then show both sides of the history.
"""

import tempfile

from memgrain import MemoryStore, RetrievalParams

workdir = tempfile.mkdtemp(prefix="memgrain-demo-")
store = MemoryStore(workdir)

T = 1_755_000_000_000  # explicit timestamps make the timeline readable

# the original decision
old = store.remember(
    "team", "Project deadline is April 15", type="decision", at=T
).record
print(f"t+0s   wrote {old.id}: {old.content!r}  state={old.state.value}")

# a contradicting decision in the same namespace and type
out = store.remember(
    "team", "Project deadline is May 1", type="decision", at=T + 60_000
)
new = out.record
conflict = out.opened_conflicts[0]
cand_id, cand_score = conflict.candidates[0]
print(f"t+60s  wrote {new.id}: {new.content!r}  state={new.state.value}")
print(f"       conflict {conflict.conflict_id} opened against {cand_id} "
      f"(score {cand_score:.4f})")

# while the conflict is open the new record stays out of general recall
hits = store.recall("team", "when is the deadline",
                    RetrievalParams(max_k=5), now=T + 61_000)
print("\nrecall while unresolved:")
for h in hits:
    print(f"  {h.score:.3f}  {h.record.content}")

# a human (or policy) picks a side; supersede = the new one wins
store.resolve_conflict("team", conflict.conflict_id, "supersede",
                       actor="demo", at=T + 120_000)
old2, new2 = store.get(old.id), store.get(new.id)
print(f"\nt+120s resolved: supersede")
print(f"       {old2.id}  state={old2.state.value}  "
      f"superseded_by={old2.superseded_by}")
print(f"       {new2.id}  state={new2.state.value}")

# as-of reads reconstruct what the store believed at any instant
print("\nas-of views:")
for label, t in [("t+30s (before the new write)", T + 30_000),
                 ("t+90s (conflict still open)", T + 90_000),
                 ("t+150s (after supersession)", T + 150_000)]:
    alive = store.as_of("team", t)
    print(f"  {label}: {[r.content for r in alive]}")

# changed-since catches both sides of the supersession
changed = store.changed_since("team", T + 100_000)
print(f"\nchanged since t+100s: {[(r.id, r.state.value) for r in changed]}")

# the superseded version is still addressable, content intact
again = store.get(old.id)
print(f"\nsuperseded record still readable: {again.content!r} "
      f"(superseded_at={again.superseded_at})")

store.close()
