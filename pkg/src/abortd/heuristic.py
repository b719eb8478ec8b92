"""Additive delete-relaxation heuristic with zero-cost axioms.

Costs are propagated through a label-correcting worklist ordered by cost.
Actions cost 1 plus the cost of their precondition; an axiom passes its body
cost to its head unchanged. Conjunctions add, disjunctions take the minimum.

A negated base fact that is currently false costs 0. When it is currently
true it costs as much as the cheapest action deleting it, which keeps the
estimate goal-aware for rules like "the oven is off". Negated derived facts
always cost 0.
"""

from __future__ import annotations

import heapq
import math
from typing import Sequence

from .axioms import DerivedClosure
from .grounding import Const, Conj, Disj, GFormula, GroundTask, Lit, literals

INF = math.inf


class _Relaxation:
    """Per-task index: which relaxed nodes each achiever reads."""

    def __init__(self, task: GroundTask):
        self.task = task
        self.n = len(task.facts)
        self.n_base = task.facts.n_base
        # achiever k < len(actions) is an action, the rest are axioms
        self.formulas: list[GFormula] = [a.pre for a in task.actions] + [ax.body for ax in task.axioms]
        self.n_actions = len(task.actions)
        self.users: dict[int, list[int]] = {}
        for k, f in enumerate(self.formulas):
            for key in {self.key(lit) for lit in literals(f)}:
                if key is not None:
                    self.users.setdefault(key, []).append(k)

    def key(self, lit: Lit) -> int | None:
        if lit.positive:
            return lit.fact
        if lit.fact < self.n_base:
            return self.n + lit.fact
        return None  # negated derived facts are free


def _cost(f: GFormula, cost: Sequence[float], n: int, n_base: int) -> float:
    if isinstance(f, Lit):
        if f.positive:
            return cost[f.fact]
        return cost[n + f.fact] if f.fact < n_base else 0.0
    if isinstance(f, Conj):
        total = 0.0
        for a in f.args:
            total += _cost(a, cost, n, n_base)
            if total == INF:
                return INF
        return total
    if isinstance(f, Disj):
        return min(_cost(a, cost, n, n_base) for a in f.args)
    assert isinstance(f, Const)
    return 0.0 if f.value else INF


_CACHE: dict[int, _Relaxation] = {}


def _relaxation(task: GroundTask) -> _Relaxation:
    key = id(task)
    rel = _CACHE.get(key)
    if rel is None or rel.task is not task:
        if len(_CACHE) > 64:
            _CACHE.clear()
        rel = _CACHE[key] = _Relaxation(task)
    return rel


def fact_costs(state: DerivedClosure, task: GroundTask) -> list[float]:
    """Relaxed cost of every node: ids < n are facts, n + f is "not f" for base f."""
    rel = _relaxation(task)
    n, n_base = rel.n, rel.n_base
    cost = [INF] * (n + n_base)
    for f in state.base:
        cost[f] = 0.0
    for f in state.derived:
        cost[f] = 0.0
    for f in range(n_base):
        if f not in state.base:
            cost[n + f] = 0.0

    actions = task.actions
    axioms = task.axioms
    heap: list[tuple[float, int]] = []

    def fire(k: int) -> None:
        c = _cost(rel.formulas[k], cost, n, n_base)
        if c == INF:
            return
        if k < rel.n_actions:
            c += 1.0
            act = actions[k]
            for f in act.add:
                if c < cost[f]:
                    cost[f] = c
                    heapq.heappush(heap, (c, f))
            for f in act.delete:
                if c < cost[n + f]:
                    cost[n + f] = c
                    heapq.heappush(heap, (c, n + f))
        else:
            h = axioms[k - rel.n_actions].head
            if c < cost[h]:
                cost[h] = c
                heapq.heappush(heap, (c, h))

    for k in range(len(rel.formulas)):
        fire(k)
    while heap:
        c, node = heapq.heappop(heap)
        if c > cost[node]:
            continue
        for k in rel.users.get(node, ()):
            fire(k)
    return cost


def h_add(state: DerivedClosure, task: GroundTask) -> float:
    """Estimated number of steps to the goal; ``math.inf`` if relaxed-unreachable."""
    cost = fact_costs(state, task)
    rel = _relaxation(task)
    return _cost(task.goal, cost, rel.n, rel.n_base)
