"""
Writing memories and getting them back
======================================

A store in a temp directory, a few typed writes, and a couple of
recalls showing how the score, the type filter, and the threshold
behave. Run it; it prints everything it does.
"""

import tempfile

from memgrain import MemoryStore, RetrievalParams, memory_type_from_string

workdir = tempfile.mkdtemp(prefix="memgrain-demo-")
store = MemoryStore(workdir)

# a handful of memories for one agent, different types
notes = [
    ("Kai prefers async standups in winter months", "preference"),
    ("The billing service owner is the payments team", "fact"),
    ("Ship the export feature before the September review", "commitment"),
    ("Retro happens the last Friday of every sprint", "event"),
    ("Deploys are frozen during the regional sales window", "constraint"),
]
for content, type_ in notes:
    out = store.remember("kai", content, type=type_)
    print(f"wrote {out.record.id}  [{type_}] {content}")

# every write is searchable immediately — no index build step
print("\nrecall: 'who owns billing'")
for hit in store.recall("kai", "who owns billing", RetrievalParams(max_k=3)):
    print(f"  {hit.score:.3f}  [{hit.record.type}] {hit.record.content}")

# the type filter narrows the scan before scoring
print("\nrecall: 'what happens on fridays', events only")
params = RetrievalParams(
    max_k=3, types=frozenset({memory_type_from_string("event")})
)
for hit in store.recall("kai", "what happens on fridays", params):
    print(f"  {hit.score:.3f}  [{hit.record.type}] {hit.record.content}")

# what actually got stored: a 256-bit code, 32 bytes per record
rec = store.recall("kai", "billing", RetrievalParams(max_k=1))[0].record
print(f"\nstored code: {len(rec.code.data)} bytes "
      f"({len(rec.code.data) * 8} bits), hex {rec.code.data.hex()[:24]}...")

# determinism: the same query gives byte-identical results every time
a = store.recall("kai", "who owns billing", RetrievalParams(max_k=3), now=0)
b = store.recall("kai", "who owns billing", RetrievalParams(max_k=3), now=0)
assert [(h.record.id, h.score) for h in a] == [(h.record.id, h.score) for h in b]
print("\nsame query twice -> identical ids and scores")

store.close()
print(f"\nstate persisted under {workdir}")
