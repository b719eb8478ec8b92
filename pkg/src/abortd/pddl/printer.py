"""Canonical PDDL text for domains, problems and formulas."""

from __future__ import annotations

from .model import (
    ROOT_TYPE,
    ActionSchema,
    And,
    Atom,
    AxiomDef,
    DomainDef,
    Exists,
    Forall,
    Formula,
    Literal,
    Not,
    Or,
    ProblemDef,
    TypedVar,
    TypeTree,
)


def format_typed(items: list[tuple[str, str]]) -> str:
    """Group consecutive names sharing a type: ``a b - t c - u``."""
    parts: list[str] = []
    i = 0
    while i < len(items):
        j = i
        while j < len(items) and items[j][1] == items[i][1]:
            j += 1
        parts.extend(name for name, _ in items[i:j])
        parts += ["-", items[i][1]]
        i = j
    return " ".join(parts)


def _vars(tvars: tuple[TypedVar, ...]) -> str:
    return format_typed([(v.name, v.type) for v in tvars])


def format_atom(atom: Atom) -> str:
    return "(" + " ".join((atom.pred,) + atom.terms) + ")"


def format_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        return format_atom(f)
    if isinstance(f, Not):
        return f"(not {format_formula(f.arg)})"
    if isinstance(f, And):
        return "(and" + "".join(" " + format_formula(a) for a in f.args) + ")"
    if isinstance(f, Or):
        return "(or" + "".join(" " + format_formula(a) for a in f.args) + ")"
    if isinstance(f, Exists):
        return f"(exists ({_vars(f.vars)}) {format_formula(f.body)})"
    if isinstance(f, Forall):
        return f"(forall ({_vars(f.vars)}) {format_formula(f.body)})"
    raise TypeError(f"not a formula: {f!r}")


def _literal(lit: Literal) -> str:
    s = format_atom(lit.atom)
    return s if lit.positive else f"(not {s})"


def _types(tree: TypeTree) -> str:
    # Grouping by parent keeps the layout of hand-written hierarchies.
    lines = []
    by_parent: dict[str, list[str]] = {}
    for child, parent in tree.parent:
        by_parent.setdefault(parent, []).append(child)
    for parent, children in by_parent.items():
        lines.append(f"    {' '.join(children)} - {parent}")
    return "  (:types\n" + "\n".join(lines) + ")"


def _action(a: ActionSchema) -> str:
    out = []
    if a.display_name and a.display_name != a.name:
        out.append(f"  ;@display {a.display_name}")
    out.append(f"  (:action {a.name}")
    out.append(f"    :parameters ({_vars(a.params)})")
    out.append(f"    :precondition {format_formula(a.precondition)}")
    out.append("    :effect (and" + "".join(" " + _literal(e) for e in a.effects) + "))")
    return "\n".join(out)


def _axiom(ax: AxiomDef) -> str:
    head = "(" + " ".join([ax.head.name] + ([_vars(ax.head.params)] if ax.head.params else [])) + ")"
    return f"  (:derived {head}\n    {format_formula(ax.body)})"


def print_domain(domain: DomainDef) -> str:
    parts = [f"(define (domain {domain.name})"]
    if domain.requirements:
        parts.append(f"  (:requirements {' '.join(domain.requirements)})")
    if domain.types.parent:
        parts.append(_types(domain.types))
    preds = []
    for p in domain.predicates:
        preds.append("    (" + " ".join([p.name] + ([_vars(p.params)] if p.params else [])) + ")")
    seen: set[str] = set()
    for ax in domain.derived:
        if ax.head.name not in seen:
            seen.add(ax.head.name)
            h = ax.head
            preds.append("    (" + " ".join([h.name] + ([_vars(h.params)] if h.params else [])) + ")")
    parts.append("  (:predicates\n" + "\n".join(preds) + ")")
    parts.extend(_axiom(ax) for ax in domain.derived)
    parts.extend(_action(a) for a in domain.actions)
    return "\n".join(parts) + ")\n"


def print_problem(problem: ProblemDef) -> str:
    parts = [f"(define (problem {problem.name})", f"  (:domain {problem.domain_name})"]
    if problem.objects:
        parts.append("  (:objects\n    " + format_typed(list(problem.objects)) + ")")
    init = sorted(problem.init, key=lambda a: (a.pred, a.terms))
    parts.append("  (:init" + "".join("\n    " + format_atom(a) for a in init) + ")")
    parts.append(f"  (:goal {format_formula(problem.goal)})")
    return "\n".join(parts) + ")\n"


__all__ = ["print_domain", "print_problem", "format_formula", "format_atom", "format_typed", "ROOT_TYPE"]
