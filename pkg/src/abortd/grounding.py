"""Propositional compilation of a lifted task.

Formulas are compiled to negation normal form over dense integer fact ids.
Quantifiers are expanded over the declared objects and equality is decided
at ground time, so the search loop never sees a variable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Container, Iterable, Iterator, Optional, Sequence, Union

from .pddl.model import (
    EQUALITY,
    And,
    Atom,
    DomainDef,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    ProblemDef,
    TypedVar,
    TypeTree,
    is_variable,
)

GroundAtom = tuple  # (pred, arg, arg, ...)


# -- compiled formulas ----------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Lit:
    fact: int
    positive: bool = True


@dataclass(frozen=True)
class Conj:
    args: tuple["GFormula", ...]


@dataclass(frozen=True)
class Disj:
    args: tuple["GFormula", ...]


GFormula = Union[Const, Lit, Conj, Disj]
TRUE = Const(True)
FALSE = Const(False)


def conj(args: Iterable[GFormula]) -> GFormula:
    out: list[GFormula] = []
    for a in args:
        if a == FALSE:
            return FALSE
        if a == TRUE:
            continue
        if isinstance(a, Conj):
            out.extend(a.args)
        else:
            out.append(a)
    if not out:
        return TRUE
    if len(out) == 1:
        return out[0]
    return Conj(tuple(out))


def disj(args: Iterable[GFormula]) -> GFormula:
    out: list[GFormula] = []
    for a in args:
        if a == TRUE:
            return TRUE
        if a == FALSE:
            continue
        if isinstance(a, Disj):
            out.extend(a.args)
        else:
            out.append(a)
    if not out:
        return FALSE
    if len(out) == 1:
        return out[0]
    return Disj(tuple(out))


def holds(f: GFormula, truth: Container[int]) -> bool:
    """Evaluate ``f`` against the set of true fact ids."""
    if isinstance(f, Lit):
        return (f.fact in truth) == f.positive
    if isinstance(f, Conj):
        return all(holds(a, truth) for a in f.args)
    if isinstance(f, Disj):
        return any(holds(a, truth) for a in f.args)
    return f.value


def literals(f: GFormula) -> Iterator[Lit]:
    if isinstance(f, Lit):
        yield f
    elif isinstance(f, (Conj, Disj)):
        for a in f.args:
            yield from literals(a)


def substitute(f: GFormula, values: dict[int, bool]) -> GFormula:
    """Replace facts with known constant truth values and simplify."""
    if isinstance(f, Lit):
        if f.fact in values:
            return Const(values[f.fact] == f.positive)
        return f
    if isinstance(f, Conj):
        return conj(substitute(a, values) for a in f.args)
    if isinstance(f, Disj):
        return disj(substitute(a, values) for a in f.args)
    return f


def renumber(f: GFormula, mapping: dict[int, int]) -> GFormula:
    if isinstance(f, Lit):
        return Lit(mapping[f.fact], f.positive)
    if isinstance(f, Conj):
        return Conj(tuple(renumber(a, mapping) for a in f.args))
    if isinstance(f, Disj):
        return Disj(tuple(renumber(a, mapping) for a in f.args))
    return f


def flat_literals(f: GFormula) -> Optional[tuple[frozenset[int], frozenset[int]]]:
    """(positive, negative) fact sets if ``f`` is a plain conjunction of literals."""
    if f == TRUE:
        return frozenset(), frozenset()
    parts = f.args if isinstance(f, Conj) else (f,)
    if not all(isinstance(p, Lit) for p in parts):
        return None
    pos = frozenset(p.fact for p in parts if p.positive)  # type: ignore[union-attr]
    neg = frozenset(p.fact for p in parts if not p.positive)  # type: ignore[union-attr]
    return pos, neg


def format_gformula(f: GFormula) -> str:
    if isinstance(f, Lit):
        return str(f.fact) if f.positive else f"-{f.fact}"
    if isinstance(f, Conj):
        return "(and " + " ".join(format_gformula(a) for a in f.args) + ")"
    if isinstance(f, Disj):
        return "(or " + " ".join(format_gformula(a) for a in f.args) + ")"
    return "true" if f.value else "false"


# -- task structures -----------------------------------------------------------


@dataclass(frozen=True)
class FactTable:
    """Bijection between ground atoms and dense ids; base facts come first."""

    atoms: tuple[GroundAtom, ...]
    n_base: int
    index: dict = field(compare=False, repr=False, default_factory=dict)

    def __post_init__(self) -> None:
        if not self.index:
            object.__setattr__(self, "index", {a: i for i, a in enumerate(self.atoms)})

    def __len__(self) -> int:
        return len(self.atoms)

    def id(self, atom: GroundAtom) -> int:
        return self.index[atom]

    def get(self, atom: GroundAtom) -> Optional[int]:
        return self.index.get(atom)

    def is_derived(self, fact: int) -> bool:
        return fact >= self.n_base

    @property
    def base_ids(self) -> range:
        return range(self.n_base)

    @property
    def derived_ids(self) -> range:
        return range(self.n_base, len(self.atoms))

    def ranges(self) -> dict[str, tuple[int, int]]:
        """Per-predicate [start, stop) id ranges."""
        out: dict[str, tuple[int, int]] = {}
        for i, atom in enumerate(self.atoms):
            start, _ = out.get(atom[0], (i, i))
            out[atom[0]] = (start, i + 1)
        return out

    def text(self, fact: int) -> str:
        return "(" + " ".join(self.atoms[fact]) + ")"


@dataclass(frozen=True)
class GroundAction:
    name: str
    display_name: str
    args: tuple[str, ...]
    pre: GFormula
    add: frozenset[int]
    delete: frozenset[int]
    pre_flat: Optional[tuple[frozenset[int], frozenset[int]]] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.pre_flat is None:
            object.__setattr__(self, "pre_flat", flat_literals(self.pre))

    def __str__(self) -> str:
        return f"({' '.join((self.name,) + self.args)})"


@dataclass(frozen=True)
class GroundAxiom:
    pred: str
    head: int
    body: GFormula


@dataclass(frozen=True)
class GroundTask:
    facts: FactTable
    init: frozenset[int]
    goal: GFormula
    actions: tuple[GroundAction, ...]
    axioms: tuple[GroundAxiom, ...]
    objects: tuple[tuple[str, str], ...] = ()
    strata: Optional["object"] = None  # axioms.Stratification

    def atom(self, fact: int) -> GroundAtom:
        return self.facts.atoms[fact]


# -- grounding -----------------------------------------------------------------


class _Universe:
    def __init__(self, types: TypeTree, objects: Sequence[tuple[str, str]]):
        self.types = types
        self.objects = list(objects)
        self._cache: dict[str, list[str]] = {}

    def of_type(self, typ: str) -> list[str]:
        if typ not in self._cache:
            self._cache[typ] = [o for o, t in self.objects if self.types.is_subtype(t, typ)]
        return self._cache[typ]

    def bindings(self, tvars: Sequence[TypedVar]) -> Iterator[tuple[str, ...]]:
        return itertools.product(*(self.of_type(v.type) for v in tvars))


class _Compiler:
    def __init__(self, facts: FactTable, universe: _Universe):
        self.facts = facts
        self.universe = universe

    def term(self, t: str, env: dict[str, str]) -> str:
        return env[t] if is_variable(t) else t

    def compile(self, f: Formula, env: dict[str, str], positive: bool = True) -> GFormula:
        if isinstance(f, Atom):
            args = tuple(self.term(t, env) for t in f.terms)
            if f.pred == EQUALITY:
                return Const((args[0] == args[1]) == positive)
            fact = self.facts.get((f.pred,) + args)
            if fact is None:
                # argument outside the predicate's typed domain: never true
                return Const(not positive)
            return Lit(fact, positive)
        if isinstance(f, Not):
            return self.compile(f.arg, env, not positive)
        if isinstance(f, (And, Or)):
            parts = [self.compile(a, env, positive) for a in f.args]
            return conj(parts) if isinstance(f, And) == positive else disj(parts)
        is_exists = isinstance(f, Exists)
        parts = []
        for values in self.universe.bindings(f.vars):
            inner = dict(env)
            inner.update(zip((v.name for v in f.vars), values))
            parts.append(self.compile(f.body, inner, positive))
        return disj(parts) if is_exists == positive else conj(parts)


def build_fact_table(domain: DomainDef, universe: _Universe) -> FactTable:
    atoms: list[GroundAtom] = []
    for decl in domain.predicates:
        atoms.extend((decl.name,) + args for args in universe.bindings(decl.params))
    n_base = len(atoms)
    seen: set[str] = set()
    for ax in domain.derived:
        if ax.head.name in seen:
            continue
        seen.add(ax.head.name)
        atoms.extend((ax.head.name,) + args for args in universe.bindings(ax.head.params))
    return FactTable(tuple(atoms), n_base)


def ground(domain: DomainDef, problem: ProblemDef, prune_task: bool = True) -> GroundTask:
    """Compile ``domain`` and ``problem`` into a stratified :class:`GroundTask`."""
    from .axioms import stratify

    universe = _Universe(domain.types, problem.objects)
    facts = build_fact_table(domain, universe)
    comp = _Compiler(facts, universe)

    actions = []
    for schema in domain.actions:
        names = [v.name for v in schema.params]
        for values in universe.bindings(schema.params):
            env = dict(zip(names, values))
            pre = comp.compile(schema.precondition, env)
            add, delete = set(), set()
            for lit in schema.effects:
                args = tuple(comp.term(t, env) for t in lit.atom.terms)
                fact = facts.id((lit.atom.pred,) + args)
                (add if lit.positive else delete).add(fact)
            actions.append(
                GroundAction(schema.name, schema.label, values, pre, frozenset(add), frozenset(delete - add))
            )

    axioms = []
    for ax in domain.derived:
        names = [v.name for v in ax.head.params]
        for values in universe.bindings(ax.head.params):
            env = dict(zip(names, values))
            head = facts.id((ax.head.name,) + values)
            axioms.append(GroundAxiom(ax.head.name, head, comp.compile(ax.body, env)))

    init = frozenset(facts.id((a.pred,) + a.terms) for a in problem.init)
    goal = comp.compile(problem.goal, {})
    task = GroundTask(facts, init, goal, tuple(actions), tuple(axioms), tuple(problem.objects))
    if prune_task:
        task = prune(task)
    return replace(task, strata=stratify(domain.derived, task.axioms))


def prune(task: GroundTask) -> GroundTask:
    """Drop actions that need a base fact no action can ever produce.

    A base fact is reachable when it is in the initial state or in the add
    list of a surviving action. Unreachable facts are constant false in every
    reachable state; they are folded away and removed from the fact table.
    """
    actions = list(task.actions)
    reachable: set[int] = set(task.init)
    while True:
        reachable = set(task.init)
        for a in actions:
            reachable |= a.add
        dead = {f: False for f in task.facts.base_ids if f not in reachable}
        kept = []
        for a in actions:
            pre = substitute(a.pre, dead) if dead else a.pre
            if pre != FALSE:
                kept.append(a if pre == a.pre else replace(a, pre=pre, pre_flat=None))
        if len(kept) == len(actions):
            actions = kept
            break
        actions = kept
    if not dead:
        return replace(task, actions=tuple(actions))

    survivors = [f for f in range(len(task.facts)) if f not in dead]
    mapping = {old: new for new, old in enumerate(survivors)}
    facts = FactTable(tuple(task.facts.atoms[f] for f in survivors), task.facts.n_base - len(dead))

    def remap(fs: frozenset[int]) -> frozenset[int]:
        return frozenset(mapping[f] for f in fs if f in mapping)

    new_actions = tuple(
        replace(a, pre=renumber(a.pre, mapping), add=remap(a.add), delete=remap(a.delete), pre_flat=None)
        for a in actions
    )
    new_axioms = tuple(
        replace(ax, head=mapping[ax.head], body=renumber(substitute(ax.body, dead), mapping)) for ax in task.axioms
    )
    goal = renumber(substitute(task.goal, dead), mapping)
    return replace(task, facts=facts, init=remap(task.init), goal=goal, actions=new_actions, axioms=new_axioms)


def dump(task: GroundTask) -> str:
    """Line-oriented listing of facts, actions, axioms and goal for diffing."""
    lines = [f"fact {i} {task.facts.text(i)}" for i in range(len(task.facts))]
    for a in task.actions:
        lines.append(
            f"action {a} pre={format_gformula(a.pre)} "
            f"add={','.join(map(str, sorted(a.add)))} del={','.join(map(str, sorted(a.delete)))}"
        )
    for ax in task.axioms:
        lines.append(f"axiom {ax.head} body={format_gformula(ax.body)}")
    lines.append(f"init {','.join(map(str, sorted(task.init)))}")
    lines.append(f"goal {format_gformula(task.goal)}")
    return "\n".join(lines) + "\n"
