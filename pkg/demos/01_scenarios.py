"""Plan both bundled kitchen scenarios and show what the planner saw.

Run from the repository root:  python demos/01_scenarios.py
"""

from pathlib import Path

from abortd import ontology
from abortd.mapper import WorldSnapshot, classify_table
from abortd.pipeline import abort
from abortd.search import validate_plan

ROOT = Path(__file__).resolve().parent.parent
kb = ontology.load()
print(f"ontology data from {kb.provenance.kind}: {kb.provenance.source}\n")

for n in (1, 2):
    snap = WorldSnapshot.load(ROOT / "scenarios" / f"scenario{n}.json")
    print(f"== scenario {n}")
    for name, typ, source in classify_table(snap, kb):
        print(f"   {name:<18} {typ:<22} {source}")
    result = abort(snap, kb)
    print(result.rendered.paper_style() or "world already safe")
    print(f"   validator: {validate_plan(result.task, result.plan)}, "
          f"expansions={result.stats.expansions}, {result.stats.seconds * 1000:.1f} ms\n")
