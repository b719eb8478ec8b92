"""Stratified evaluation of derived predicates.

Derived atoms never live in a state. Every time a state is looked at, its
closure is rebuilt stratum by stratum: inside a stratum, axioms fire
semi-naively (only axioms mentioning a newly derived atom are re-checked)
until nothing changes.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .grounding import GFormula, GroundAxiom, GroundTask, holds, literals
from .pddl.model import AxiomDef, signed_atoms


class NegativeCycle(Exception):
    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("derived predicates depend negatively on themselves: " + " -> ".join(cycle))


def dependency_graph(axioms: Sequence[AxiomDef]) -> dict[str, dict[str, bool]]:
    """``graph[p][q]`` is True when derived ``p`` depends negatively on derived ``q``.

    The entry exists (False) for purely positive dependencies.
    """
    derived = {ax.head.name for ax in axioms}
    graph: dict[str, dict[str, bool]] = {p: {} for p in sorted(derived)}
    for ax in axioms:
        deps = graph[ax.head.name]
        for atom, positive in signed_atoms(ax.body):
            if atom.pred in derived:
                deps[atom.pred] = deps.get(atom.pred, False) or not positive
    return graph


def _sccs(graph: dict[str, dict[str, bool]]) -> list[list[str]]:
    """Tarjan; components come out dependencies-first."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    out: list[list[str]] = []
    counter = 0

    def visit(v: str) -> None:
        nonlocal counter
        index[v] = low[v] = counter
        counter += 1
        stack.append(v)
        on_stack.add(v)
        for w in sorted(graph[v]):
            if w not in index:
                visit(w)
                low[v] = min(low[v], low[w])
            elif w in on_stack:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            comp = []
            while True:
                w = stack.pop()
                on_stack.discard(w)
                comp.append(w)
                if w == v:
                    break
            out.append(sorted(comp))

    for v in sorted(graph):
        if v not in index:
            visit(v)
    return out


def _negative_cycle(graph: dict[str, dict[str, bool]], comp: set[str]) -> list[str] | None:
    """A dependency cycle through a negative edge inside ``comp``, as [p, q, ..., p]."""
    for p in sorted(comp):
        for q, negative in sorted(graph[p].items()):
            if not (negative and q in comp):
                continue
            prev: dict[str, str | None] = {q: None}
            todo = deque([q])
            while todo and p not in prev:
                cur = todo.popleft()
                for nxt in sorted(graph[cur]):
                    if nxt in comp and nxt not in prev:
                        prev[nxt] = cur
                        todo.append(nxt)
            if p == q:
                return [p, p]
            back = [p]
            while back[-1] != q:
                back.append(prev[back[-1]])  # type: ignore[arg-type]
            return [p] + back[::-1]
    return None


def predicate_levels(axioms: Sequence[AxiomDef]) -> dict[str, int]:
    """Smallest levels with level(q) <= level(p) for positive and < for negative dependencies."""
    graph = dependency_graph(axioms)
    level: dict[str, int] = {}
    for comp in _sccs(graph):
        members = set(comp)
        cycle = _negative_cycle(graph, members)
        if cycle:
            raise NegativeCycle(cycle)
        lvl = 0
        for p in comp:
            for q, negative in graph[p].items():
                if q in members:
                    continue
                lvl = max(lvl, level[q] + (1 if negative else 0))
        for p in comp:
            level[p] = lvl
    return dict(sorted(level.items()))


@dataclass(frozen=True)
class Stratification:
    level: dict[str, int]
    strata: tuple[tuple[GroundAxiom, ...], ...]
    # per stratum: derived fact -> axioms of that stratum reading it positively
    triggers: tuple[dict[int, tuple[GroundAxiom, ...]], ...] = field(default=(), compare=False, repr=False)


def stratify(axioms: Sequence[AxiomDef], ground_axioms: Iterable[GroundAxiom] = ()) -> Stratification:
    """Assign derived predicates to strata and partition ``ground_axioms`` accordingly.

    Raises :class:`NegativeCycle` when no stratification exists.
    """
    level = predicate_levels(axioms)
    n = max(level.values(), default=-1) + 1
    groups: list[list[GroundAxiom]] = [[] for _ in range(n)]
    ground_axioms = list(ground_axioms)
    for ax in ground_axioms:
        groups[level[ax.pred]].append(ax)
    for g in groups:
        g.sort(key=lambda ax: ax.pred)  # stable: keeps grounding order within a predicate
    head_level = {ax.head: level[ax.pred] for ax in ground_axioms}
    triggers = []
    for s, group in enumerate(groups):
        trig: dict[int, list[GroundAxiom]] = {}
        for ax in group:
            for lit in set(literals(ax.body)):
                if lit.positive and head_level.get(lit.fact) == s:
                    trig.setdefault(lit.fact, []).append(ax)
        triggers.append({k: tuple(v) for k, v in trig.items()})
    return Stratification(level, tuple(tuple(g) for g in groups), tuple(triggers))


@dataclass(frozen=True)
class DerivedClosure:
    base: frozenset[int]
    derived: frozenset[int]

    def __contains__(self, fact: int) -> bool:
        return fact in self.base or fact in self.derived

    @property
    def true_facts(self) -> frozenset[int]:
        return self.base | self.derived


def closure(base: Iterable[int], task: GroundTask) -> DerivedClosure:
    """Least fixpoint of the task's axioms over ``base``."""
    strat: Stratification = task.strata  # type: ignore[assignment]
    base = frozenset(base)
    true = set(base)
    derived: set[int] = set()
    for group, trig in zip(strat.strata, strat.triggers):
        queue: deque[int] = deque()
        for ax in group:
            if ax.head not in true and holds(ax.body, true):
                true.add(ax.head)
                derived.add(ax.head)
                queue.append(ax.head)
        while queue:
            fact = queue.popleft()
            for ax in trig.get(fact, ()):
                if ax.head not in true and holds(ax.body, true):
                    true.add(ax.head)
                    derived.add(ax.head)
                    queue.append(ax.head)
    return DerivedClosure(base, frozenset(derived))


def evaluate(formula: GFormula, state: DerivedClosure) -> bool:
    return holds(formula, state)


def format_closure(task: GroundTask, state: DerivedClosure) -> str:
    """Derived atoms per stratum, for debugging."""
    strat: Stratification = task.strata  # type: ignore[assignment]
    lines = []
    for s, group in enumerate(strat.strata):
        heads = sorted({ax.head for ax in group if ax.head in state.derived})
        lines.append(f"stratum {s}: " + " ".join(task.facts.text(h) for h in heads))
    return "\n".join(lines)
