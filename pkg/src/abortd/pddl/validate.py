from __future__ import annotations

from typing import Optional

from .errors import Diagnostic, ValidationError
from .model import (
    EQUALITY,
    ROOT_TYPE,
    And,
    Atom,
    DomainDef,
    Exists,
    Forall,
    Formula,
    Loc,
    Not,
    Or,
    PredicateDecl,
    ProblemDef,
    TypedVar,
    free_variables,
    is_variable,
)


def _type_cycles(domain: DomainDef) -> list[Diagnostic]:
    parents = domain.types.parents
    out = []
    reported: set[str] = set()
    for start in parents:
        seen = [start]
        cur = start
        while cur in parents:
            cur = parents[cur]
            if cur in seen:
                cycle = seen[seen.index(cur):]
                key = min(cycle)
                if key not in reported:
                    reported.add(key)
                    path = " -> ".join(cycle + [cur])
                    out.append(Diagnostic("error", f"type cycle: {path}", domain.types.loc))
                break
            seen.append(cur)
    if ROOT_TYPE in parents:
        out.append(Diagnostic("error", "the root type 'object' cannot have a parent", domain.types.loc))
    return out


class _Checker:
    def __init__(self, domain: DomainDef):
        self.domain = domain
        self.types = domain.types.names
        self.diags: list[Diagnostic] = []
        self.signatures: dict[str, PredicateDecl] = {}
        for p in domain.predicates:
            self.signatures[p.name] = p
        for ax in domain.derived:
            self.signatures.setdefault(ax.head.name, ax.head)

    def error(self, message: str, loc: Optional[Loc]) -> None:
        self.diags.append(Diagnostic("error", message, loc))

    def typed_vars(self, tvars: tuple[TypedVar, ...], fallback: Optional[Loc]) -> None:
        for v in tvars:
            if not is_variable(v.name):
                self.error(f"parameter {v.name!r} is not a variable", v.loc or fallback)
            if v.type not in self.types:
                self.error(f"undeclared type {v.type!r}", v.loc or fallback)

    def atom(self, atom: Atom, fallback: Optional[Loc]) -> None:
        loc = atom.loc or fallback
        if atom.pred == EQUALITY:
            if len(atom.terms) != 2:
                self.error("equality takes exactly two terms", loc)
            return
        decl = self.signatures.get(atom.pred)
        if decl is None:
            self.error(f"undeclared predicate {atom.pred!r}", loc)
        elif decl.arity != len(atom.terms):
            self.error(f"predicate {atom.pred} expects {decl.arity} argument(s), got {len(atom.terms)}", loc)

    def formula(self, f: Formula, fallback: Optional[Loc]) -> None:
        loc = getattr(f, "loc", None) or fallback
        if isinstance(f, Atom):
            self.atom(f, loc)
        elif isinstance(f, Not):
            self.formula(f.arg, loc)
        elif isinstance(f, (And, Or)):
            for a in f.args:
                self.formula(a, loc)
        elif isinstance(f, (Exists, Forall)):
            self.typed_vars(f.vars, loc)
            self.formula(f.body, loc)

    def unbound(self, f: Formula, allowed: set[str], what: str, loc: Optional[Loc]) -> None:
        extra = free_variables(f) - allowed
        if extra:
            self.error(f"unbound variable(s) {', '.join(sorted(extra))} in {what}", loc)


def validate_domain(domain: DomainDef) -> list[Diagnostic]:
    """Check the structural invariants of ``domain``; an empty list means valid."""
    chk = _Checker(domain)
    chk.diags.extend(_type_cycles(domain))
    for child, parent in domain.types.parent:
        if parent not in chk.types:
            chk.error(f"undeclared type {parent!r}", domain.types.loc)

    seen: set[str] = set()
    for p in domain.predicates:
        if p.name in seen:
            chk.error(f"predicate {p.name!r} declared twice", p.loc)
        seen.add(p.name)
        chk.typed_vars(p.params, p.loc)
    derived = domain.derived_names
    for ax in domain.derived:
        chk.typed_vars(ax.head.params, ax.loc)
        sig = chk.signatures[ax.head.name]
        if [v.type for v in sig.params] != [v.type for v in ax.head.params]:
            chk.error(f"inconsistent signature for derived predicate {ax.head.name}", ax.loc)
        if ax.head.name in seen:
            chk.error(f"{ax.head.name!r} is both a base and a derived predicate", ax.loc)
        chk.formula(ax.body, ax.loc)
        chk.unbound(ax.body, {v.name for v in ax.head.params}, f"derived predicate {ax.head.name}", ax.loc)

    names: set[str] = set()
    for a in domain.actions:
        if a.name in names:
            chk.error(f"action {a.name!r} declared twice", a.loc)
        names.add(a.name)
        chk.typed_vars(a.params, a.loc)
        params = {v.name for v in a.params}
        chk.formula(a.precondition, a.loc)
        chk.unbound(a.precondition, params, f"precondition of {a.name}", a.loc)
        for lit in a.effects:
            chk.atom(lit.atom, a.loc)
            if lit.atom.pred in derived:
                chk.error(f"derived predicate in effect: {lit.atom.pred} in action {a.name}", lit.atom.loc or a.loc)
            if lit.atom.pred == EQUALITY:
                chk.error(f"equality in effect of action {a.name}", a.loc)
            loose = {t for t in lit.atom.terms if is_variable(t)} - params
            if loose:
                chk.error(f"unbound variable(s) {', '.join(sorted(loose))} in effect of {a.name}", a.loc)
    return chk.diags


def validate_problem(problem: ProblemDef, domain: DomainDef) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    types = domain.types
    objects = problem.object_types
    derived = domain.derived_names
    signatures = {p.name: p for p in domain.predicates}
    for ax in domain.derived:
        signatures.setdefault(ax.head.name, ax.head)
    for name, typ in problem.objects:
        if typ not in types:
            diags.append(Diagnostic("error", f"object {name} has undeclared type {typ!r}", problem.loc))
    for atom in sorted(problem.init, key=lambda a: (a.pred, a.terms)):
        if atom.pred in derived:
            diags.append(Diagnostic("error", f"derived predicate in init: {atom.pred}", atom.loc))
            continue
        decl = signatures.get(atom.pred)
        if decl is None or decl.arity != len(atom.terms):
            diags.append(Diagnostic("error", f"bad init atom ({atom.pred} {' '.join(atom.terms)})", atom.loc))
            continue
        for term, param in zip(atom.terms, decl.params):
            if term not in objects:
                diags.append(Diagnostic("error", f"undeclared object {term!r}", atom.loc))
            elif not types.is_subtype(objects[term], param.type):
                diags.append(Diagnostic("error", f"type mismatch: {term} is {objects[term]}", atom.loc))
    if free_variables(problem.goal):
        diags.append(Diagnostic("error", "goal has unbound variables", problem.goal.loc))
    return diags


def check_domain(domain: DomainDef) -> DomainDef:
    """Return ``domain`` unchanged or raise :class:`ValidationError`."""
    diags = validate_domain(domain)
    if diags:
        raise ValidationError(diags)
    return domain
