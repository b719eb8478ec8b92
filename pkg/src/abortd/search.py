"""Forward search over ground tasks: greedy best-first planner, plan validator
and a breadth-first oracle for tests."""

from __future__ import annotations

import heapq
import itertools
import json
import math
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from .axioms import DerivedClosure, closure
from .grounding import GroundAction, GroundTask, holds
from .heuristic import h_add

State = frozenset  # of base fact ids

DEFAULT_MAX_EXPANSIONS = 100_000
DEFAULT_MAX_SECONDS = 10.0


@dataclass(frozen=True)
class PlanStep:
    action: str  # display name, e.g. "put"
    args: tuple[str, ...]
    schema: str = ""  # internal schema name when known, e.g. "put-right"

    def paper_style(self) -> str:
        return repr((self.action, list(self.args)))

    def to_json(self) -> dict:
        return {"action": self.action, "args": list(self.args)}


@dataclass(frozen=True)
class Plan:
    steps: tuple[PlanStep, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[PlanStep]:
        return iter(self.steps)

    def __getitem__(self, i: int) -> PlanStep:
        return self.steps[i]

    def paper_style(self) -> str:
        """One tuple per line, comma-separated, as the planner service printed them."""
        return ",\n".join(s.paper_style() for s in self.steps)

    def to_json(self) -> list[dict]:
        return [s.to_json() for s in self.steps]

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_actions(cls, actions: Iterable[GroundAction]) -> "Plan":
        return cls(tuple(PlanStep(a.display_name, a.args, a.name) for a in actions))


@dataclass
class SearchStats:
    expansions: int = 0
    generated: int = 0
    evaluated: int = 0
    seconds: float = 0.0
    initial_h: float = math.inf

    def to_json(self) -> dict:
        return {"expansions": self.expansions, "generated": self.generated, "seconds": round(self.seconds, 6)}


class SearchFailure(Exception):
    def __init__(self, message: str, stats: SearchStats):
        super().__init__(message)
        self.stats = stats


class Unsolvable(SearchFailure):
    pass


class LimitExceeded(SearchFailure):
    pass


class NoneWithinBound(Exception):
    pass


# -- transitions ----------------------------------------------------------------


def applicable(state: DerivedClosure, action: GroundAction) -> bool:
    flat = action.pre_flat
    if flat is not None:
        pos, neg = flat
        for f in pos:
            if f not in state:
                return False
        for f in neg:
            if f in state:
                return False
        return True
    return holds(action.pre, state)


def apply(state: frozenset[int], action: GroundAction) -> frozenset[int]:
    return (state - action.delete) | action.add


def successors(state: DerivedClosure, task: GroundTask) -> Iterator[tuple[GroundAction, frozenset[int]]]:
    for a in task.actions:
        if applicable(state, a):
            yield a, apply(state.base, a)


def goal_reached(state: DerivedClosure, task: GroundTask) -> bool:
    return holds(task.goal, state)


# -- greedy best-first search -----------------------------------------------------


@dataclass
class _Node:
    state: frozenset[int]
    parent: Optional["_Node"]
    action: Optional[GroundAction]
    g: int
    h: float


def _extract(node: _Node) -> Plan:
    actions = []
    while node.parent is not None:
        actions.append(node.action)
        node = node.parent
    return Plan.from_actions(reversed(actions))  # type: ignore[arg-type]


@dataclass
class SearchResult:
    plan: Plan
    stats: SearchStats = field(default_factory=SearchStats)


def gbfs(
    task: GroundTask,
    max_expansions: int = DEFAULT_MAX_EXPANSIONS,
    max_seconds: float = DEFAULT_MAX_SECONDS,
) -> SearchResult:
    """Greedy best-first search on h_add; ties go to the earliest inserted node.

    Raises :class:`Unsolvable` when the open list runs dry and
    :class:`LimitExceeded` when a budget is hit.
    """
    start = time.perf_counter()
    stats = SearchStats()
    init_state = frozenset(task.init)
    root_cl = closure(init_state, task)
    h0 = h_add(root_cl, task)
    stats.evaluated = 1
    stats.initial_h = h0
    counter = itertools.count()
    open_list: list[tuple[float, int, _Node, DerivedClosure]] = []
    if h0 < math.inf:
        heapq.heappush(open_list, (h0, next(counter), _Node(init_state, None, None, 0, h0), root_cl))
    seen = {init_state}
    while open_list:
        if stats.expansions >= max_expansions:
            stats.seconds = time.perf_counter() - start
            raise LimitExceeded(f"expansion limit {max_expansions} reached", stats)
        if time.perf_counter() - start > max_seconds:
            stats.seconds = time.perf_counter() - start
            raise LimitExceeded(f"time limit {max_seconds}s reached", stats)
        _, _, node, cl = heapq.heappop(open_list)
        if goal_reached(cl, task):
            stats.seconds = time.perf_counter() - start
            return SearchResult(_extract(node), stats)
        stats.expansions += 1
        for action, succ in successors(cl, task):
            stats.generated += 1
            if succ in seen:
                continue
            seen.add(succ)
            succ_cl = closure(succ, task)
            h = h_add(succ_cl, task)
            stats.evaluated += 1
            if h == math.inf:
                continue
            child = _Node(succ, node, action, node.g + 1, h)
            heapq.heappush(open_list, (h, next(counter), child, succ_cl))
    stats.seconds = time.perf_counter() - start
    raise Unsolvable("no plan exists", stats)


# -- validation ---------------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    valid: bool
    step: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.valid

    def __str__(self) -> str:
        return "VALID" if self.valid else f"INVALID at step {self.step}: {self.reason}"


def _index(task: GroundTask) -> dict[tuple[str, tuple[str, ...]], list[GroundAction]]:
    idx: dict[tuple[str, tuple[str, ...]], list[GroundAction]] = {}
    for a in task.actions:
        idx.setdefault((a.name, a.args), []).append(a)
        if a.display_name != a.name:
            idx.setdefault((a.display_name, a.args), []).append(a)
    return idx


def validate_plan(task: GroundTask, plan: Plan | Sequence[PlanStep]) -> Verdict:
    """Replay ``plan`` from the initial state, recomputing the closure each step."""
    idx = _index(task)
    state = frozenset(task.init)
    cl = closure(state, task)
    for i, step in enumerate(plan):
        key = (step.schema, step.args) if step.schema else (step.action, step.args)
        candidates = idx.get(key, [])
        if not candidates:
            return Verdict(False, i, f"unknown or statically impossible action {step.paper_style()}")
        chosen = next((a for a in candidates if applicable(cl, a)), None)
        if chosen is None:
            return Verdict(False, i, f"precondition of {candidates[0]} does not hold")
        state = apply(state, chosen)
        cl = closure(state, task)
    if not goal_reached(cl, task):
        return Verdict(False, len(plan), "goal not satisfied after the last step")
    return Verdict(True)


def final_state(task: GroundTask, plan: Plan) -> DerivedClosure:
    """Closure after replaying ``plan``; the plan must be valid."""
    idx = _index(task)
    state = frozenset(task.init)
    cl = closure(state, task)
    for step in plan:
        key = (step.schema, step.args) if step.schema else (step.action, step.args)
        chosen = next(a for a in idx[key] if applicable(cl, a))
        state = apply(state, chosen)
        cl = closure(state, task)
    return cl


# -- brute-force oracle ---------------------------------------------------------------

ORACLE_MAX_OBJECTS = 20


def bfs_oracle(task: GroundTask, bound: int) -> Plan:
    """Shortest plan by breadth-first search over base states.

    Raises :class:`NoneWithinBound` when no plan of length <= ``bound`` exists.
    """
    if len(task.objects) > ORACLE_MAX_OBJECTS:
        raise ValueError(f"bfs_oracle is limited to {ORACLE_MAX_OBJECTS} objects")
    init = frozenset(task.init)
    if goal_reached(closure(init, task), task):
        return Plan()
    parent: dict[frozenset[int], tuple[Optional[frozenset[int]], Optional[GroundAction]]] = {init: (None, None)}
    frontier = deque([init])
    for _depth in range(bound):
        nxt: deque[frozenset[int]] = deque()
        while frontier:
            state = frontier.popleft()
            cl = closure(state, task)
            for action, succ in successors(cl, task):
                if succ in parent:
                    continue
                parent[succ] = (state, action)
                if goal_reached(closure(succ, task), task):
                    steps = []
                    cur: Optional[frozenset[int]] = succ
                    while cur is not None:
                        prev, act = parent[cur]
                        if act is not None:
                            steps.append(act)
                        cur = prev
                    return Plan.from_actions(reversed(steps))
                nxt.append(succ)
        if not nxt:
            break
        frontier = nxt
    raise NoneWithinBound(f"no plan within {bound} steps")
