"""Lifted PDDL task representation.

All nodes are frozen dataclasses. Source locations ride along on every node
but are excluded from equality and hashing, so a parsed value and its
re-parsed printout compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

ROOT_TYPE = "object"
EQUALITY = "="


@dataclass(frozen=True)
class Loc:
    line: int
    col: int
    file: str = "<string>"

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"


def _loc() -> Optional[Loc]:
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class TypedVar:
    name: str
    type: str = ROOT_TYPE
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True, eq=False)
class TypeTree:
    """Single-inheritance type hierarchy rooted at ``object``.

    ``parent`` holds (child, parent) pairs in declaration order; equality
    ignores that order.
    """

    parent: tuple[tuple[str, str], ...] = ()
    loc: Optional[Loc] = _loc()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TypeTree):
            return NotImplemented
        return set(self.parent) == set(other.parent)

    def __hash__(self) -> int:
        return hash(frozenset(self.parent))

    @property
    def parents(self) -> dict[str, str]:
        return dict(self.parent)

    @property
    def names(self) -> set[str]:
        names = {ROOT_TYPE}
        for child, par in self.parent:
            names.add(child)
            names.add(par)
        return names

    def __contains__(self, name: str) -> bool:
        return name in self.names

    def ancestors(self, name: str) -> list[str]:
        """``name`` followed by its ancestors up to the root (cycle-safe)."""
        parents = self.parents
        chain = [name]
        seen = {name}
        while chain[-1] in parents:
            nxt = parents[chain[-1]]
            if nxt in seen:
                break
            chain.append(nxt)
            seen.add(nxt)
        if chain[-1] != ROOT_TYPE and ROOT_TYPE not in seen:
            chain.append(ROOT_TYPE)
        return chain

    def is_subtype(self, sub: str, sup: str) -> bool:
        if sup == ROOT_TYPE:
            return True
        return sup in self.ancestors(sub)

    def children(self, name: str) -> list[str]:
        return [c for c, p in self.parent if p == name]


@dataclass(frozen=True)
class PredicateDecl:
    name: str
    params: tuple[TypedVar, ...] = ()
    loc: Optional[Loc] = _loc()

    @property
    def arity(self) -> int:
        return len(self.params)


# -- formulas ---------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    pred: str
    terms: tuple[str, ...] = ()
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class Not:
    arg: "Formula"
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class And:
    args: tuple["Formula", ...] = ()
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class Or:
    args: tuple["Formula", ...] = ()
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class Exists:
    vars: tuple[TypedVar, ...]
    body: "Formula"
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class Forall:
    vars: tuple[TypedVar, ...]
    body: "Formula"
    loc: Optional[Loc] = _loc()


Formula = Union[Atom, Not, And, Or, Exists, Forall]


def is_variable(term: str) -> bool:
    return term.startswith("?")


def atoms(formula: Formula) -> Iterator[Atom]:
    """Yield every atom occurring in ``formula``."""
    if isinstance(formula, Atom):
        yield formula
    elif isinstance(formula, Not):
        yield from atoms(formula.arg)
    elif isinstance(formula, (And, Or)):
        for arg in formula.args:
            yield from atoms(arg)
    else:
        yield from atoms(formula.body)


def signed_atoms(formula: Formula, positive: bool = True) -> Iterator[tuple[Atom, bool]]:
    """Yield ``(atom, polarity)``; an atom under an odd number of negations is negative."""
    if isinstance(formula, Atom):
        yield formula, positive
    elif isinstance(formula, Not):
        yield from signed_atoms(formula.arg, not positive)
    elif isinstance(formula, (And, Or)):
        for arg in formula.args:
            yield from signed_atoms(arg, positive)
    else:
        yield from signed_atoms(formula.body, positive)


def free_variables(formula: Formula) -> set[str]:
    if isinstance(formula, Atom):
        return {t for t in formula.terms if is_variable(t)}
    if isinstance(formula, Not):
        return free_variables(formula.arg)
    if isinstance(formula, (And, Or)):
        out: set[str] = set()
        for arg in formula.args:
            out |= free_variables(arg)
        return out
    bound = {v.name for v in formula.vars}
    return free_variables(formula.body) - bound


# -- domain / problem ---------------------------------------------------------


@dataclass(frozen=True)
class Literal:
    atom: Atom
    positive: bool = True


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: tuple[TypedVar, ...]
    precondition: Formula
    effects: tuple[Literal, ...]
    display_name: str = ""
    loc: Optional[Loc] = _loc()

    @property
    def label(self) -> str:
        return self.display_name or self.name


@dataclass(frozen=True)
class AxiomDef:
    head: PredicateDecl
    body: Formula
    loc: Optional[Loc] = _loc()

    @property
    def name(self) -> str:
        return self.head.name


@dataclass(frozen=True)
class DomainDef:
    name: str
    requirements: tuple[str, ...] = ()
    types: TypeTree = TypeTree()
    predicates: tuple[PredicateDecl, ...] = ()
    derived: tuple[AxiomDef, ...] = ()
    actions: tuple[ActionSchema, ...] = ()
    loc: Optional[Loc] = _loc()

    def predicate(self, name: str) -> Optional[PredicateDecl]:
        for p in self.predicates:
            if p.name == name:
                return p
        for ax in self.derived:
            if ax.head.name == name:
                return ax.head
        return None

    @property
    def derived_names(self) -> set[str]:
        return {ax.head.name for ax in self.derived}

    def action(self, name: str) -> ActionSchema:
        for a in self.actions:
            if a.name == name:
                return a
        raise KeyError(name)


@dataclass(frozen=True)
class ProblemDef:
    name: str
    domain_name: str
    objects: tuple[tuple[str, str], ...] = ()
    init: frozenset[Atom] = frozenset()
    goal: Formula = And(())
    loc: Optional[Loc] = _loc()

    @property
    def object_types(self) -> dict[str, str]:
        return dict(self.objects)
