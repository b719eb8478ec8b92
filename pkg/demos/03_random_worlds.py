"""Compare greedy search with the breadth-first oracle on random kitchens."""

import random
import time

from abortd import ontology
from abortd.grounding import ground
from abortd.kitchen import builtin_domain
from abortd.mapper import map_world
from abortd.randomworld import random_snapshot
from abortd.search import NoneWithinBound, Unsolvable, bfs_oracle, gbfs

kb = ontology.load()
rng = random.Random(7)
rows = []
start = time.perf_counter()
for _ in range(30):
    task = ground(builtin_domain(), map_world(random_snapshot(rng), kb).problem)
    try:
        greedy = len(gbfs(task).plan)
    except Unsolvable:
        greedy = None
    try:
        best = len(bfs_oracle(task, 12))
    except NoneWithinBound:
        best = None
    rows.append((len(task.objects), greedy, best))

print("objects  gbfs  optimal")
for objs, g, b in rows:
    print(f"{objs:>7}  {'-' if g is None else g:>4}  {'-' if b is None else b:>7}")
solved = [r for r in rows if r[1] is not None]
print(f"\n{len(solved)}/{len(rows)} solvable, {sum(r[1] == r[2] for r in solved)} optimal, "
      f"{time.perf_counter() - start:.2f}s")
