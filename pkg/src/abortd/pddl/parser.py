"""S-expression PDDL reader for the typed, derived-predicate subset we support.

Identifiers are folded to lower case. A comment of the form ``;@display put``
directly before an ``(:action ...)`` sets that schema's display name; other
planners see it as an ordinary comment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import PDDLError
from .model import (
    EQUALITY,
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
    Loc,
    Not,
    Or,
    PredicateDecl,
    ProblemDef,
    TypedVar,
    TypeTree,
    is_variable,
)

SUPPORTED_REQUIREMENTS = frozenset(
    {
        ":strips",
        ":typing",
        ":negative-preconditions",
        ":disjunctive-preconditions",
        ":existential-preconditions",
        ":universal-preconditions",
        ":quantified-preconditions",
        ":derived-predicates",
        ":equality",
    }
)

_SYMBOL_CHARS = set("abcdefghijklmnopqrstuvwxyz0123456789-_?:=.")


@dataclass
class Sym:
    text: str
    loc: Loc


@dataclass
class SList:
    items: list["SExpr"]
    loc: Loc
    pragmas: list[str] = field(default_factory=list)


SExpr = Union[Sym, SList]


def tokenize(text: str, filename: str = "<string>") -> list[tuple[str, str, Loc]]:
    tokens: list[tuple[str, str, Loc]] = []
    line, col, i, n = 1, 1, 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line, col, i = line + 1, 1, i + 1
            continue
        if ch.isspace():
            i, col = i + 1, col + 1
            continue
        loc = Loc(line, col, filename)
        if ch == ";":
            end = text.find("\n", i)
            end = n if end < 0 else end
            comment = text[i:end]
            if comment.startswith(";@"):
                tokens.append(("pragma", comment[2:].strip().lower(), loc))
            col += end - i
            i = end
            continue
        if ch in "()":
            tokens.append((ch, ch, loc))
            i, col = i + 1, col + 1
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] not in "();":
            j += 1
        word = text[i:j].lower()
        bad = [c for c in word if c not in _SYMBOL_CHARS]
        if bad:
            raise PDDLError(f"unexpected character {bad[0]!r}", Loc(line, col + word.index(bad[0]), filename))
        tokens.append(("sym", word, loc))
        col += j - i
        i = j
    return tokens


def read_sexpr(text: str, filename: str = "<string>") -> list[SExpr]:
    """Read every top-level expression in ``text``."""
    tokens = tokenize(text, filename)
    stack: list[SList] = []
    top: list[SExpr] = []
    pending: list[str] = []
    for kind, value, loc in tokens:
        if kind == "pragma":
            pending.append(value)
        elif kind == "(":
            node = SList([], loc, pending)
            pending = []
            (stack[-1].items if stack else top).append(node)
            stack.append(node)
        elif kind == ")":
            if not stack:
                raise PDDLError("unbalanced parentheses: unexpected ')'", loc)
            stack.pop()
        else:
            (stack[-1].items if stack else top).append(Sym(value, loc))
    if stack:
        raise PDDLError("unbalanced parentheses: missing ')'", stack[-1].loc)
    return top


# -- helpers ------------------------------------------------------------------


def _expect_list(node: SExpr, what: str) -> SList:
    if not isinstance(node, SList):
        raise PDDLError(f"expected {what}, found {node.text!r}", node.loc)
    return node


def _expect_sym(node: SExpr, what: str) -> Sym:
    if not isinstance(node, Sym):
        raise PDDLError(f"expected {what}, found a list", node.loc)
    return node


def _head(node: SList) -> Optional[str]:
    if node.items and isinstance(node.items[0], Sym):
        return node.items[0].text
    return None


def parse_typed_list(items: list[SExpr], variables: bool) -> list[tuple[str, str, Loc]]:
    """``a b - t c`` -> [(a, t), (b, t), (c, object)]."""
    out: list[tuple[str, str, Loc]] = []
    pending: list[Sym] = []
    i = 0
    while i < len(items):
        sym = _expect_sym(items[i], "a name")
        if sym.text == "-":
            if i + 1 >= len(items):
                raise PDDLError("missing type after '-'", sym.loc)
            tnode = items[i + 1]
            if isinstance(tnode, SList):
                raise PDDLError("'either' types are not supported", tnode.loc)
            if not pending:
                raise PDDLError("type annotation without names", sym.loc)
            out.extend((p.text, tnode.text, p.loc) for p in pending)
            pending = []
            i += 2
            continue
        if variables and not is_variable(sym.text):
            raise PDDLError(f"expected a variable, found {sym.text!r}", sym.loc)
        if not variables and is_variable(sym.text):
            raise PDDLError(f"unexpected variable {sym.text!r}", sym.loc)
        pending.append(sym)
        i += 1
    out.extend((p.text, ROOT_TYPE, p.loc) for p in pending)
    return out


def _check_requirements(node: SList) -> tuple[str, ...]:
    reqs = []
    for item in node.items[1:]:
        sym = _expect_sym(item, "a requirement flag")
        if sym.text not in SUPPORTED_REQUIREMENTS:
            raise PDDLError(f"unsupported requirement {sym.text}", sym.loc)
        reqs.append(sym.text)
    return tuple(reqs)


class _Scope:
    """Predicate signatures, type tree and term typing used while reading formulas."""

    def __init__(self, types: TypeTree, predicates: dict[str, PredicateDecl], constants: dict[str, str]):
        self.types = types
        self.predicates = predicates
        self.constants = constants

    def check_type(self, name: str, loc: Loc) -> None:
        if name not in self.types:
            raise PDDLError(f"undeclared type {name!r}", loc)

    def term_type(self, term: str, env: dict[str, str], loc: Loc) -> str:
        if is_variable(term):
            if term not in env:
                raise PDDLError(f"unbound variable {term}", loc)
            return env[term]
        if term not in self.constants:
            raise PDDLError(f"undeclared object {term!r}", loc)
        return self.constants[term]

    def compatible(self, a: str, b: str) -> bool:
        return self.types.is_subtype(a, b) or self.types.is_subtype(b, a)


def _typed_vars(node: SExpr, scope: _Scope) -> tuple[TypedVar, ...]:
    lst = _expect_list(node, "a parameter list")
    out = []
    for name, typ, loc in parse_typed_list(lst.items, variables=True):
        scope.check_type(typ, loc)
        out.append(TypedVar(name, typ, loc))
    return tuple(out)


def parse_atom(node: SList, scope: _Scope, env: dict[str, str], strict: bool = False) -> Atom:
    pred = _expect_sym(node.items[0], "a predicate name")
    terms = tuple(_expect_sym(t, "a term").text for t in node.items[1:])
    if pred.text == EQUALITY:
        if len(terms) != 2:
            raise PDDLError("equality takes exactly two terms", node.loc)
        for t in terms:
            scope.term_type(t, env, node.loc)
        return Atom(EQUALITY, terms, node.loc)
    decl = scope.predicates.get(pred.text)
    if decl is None:
        raise PDDLError(f"undeclared predicate {pred.text!r}", pred.loc)
    if len(terms) != decl.arity:
        raise PDDLError(
            f"predicate {decl.name} expects {decl.arity} argument(s), got {len(terms)}", node.loc
        )
    for term, param in zip(terms, decl.params):
        ttype = scope.term_type(term, env, node.loc)
        ok = scope.types.is_subtype(ttype, param.type) if strict else scope.compatible(ttype, param.type)
        if not ok:
            raise PDDLError(
                f"type mismatch: {term} is {ttype}, {decl.name} expects {param.type}", node.loc
            )
    return Atom(decl.name, terms, node.loc)


def parse_formula(node: SExpr, scope: _Scope, env: dict[str, str]) -> Formula:
    lst = _expect_list(node, "a formula")
    head = _head(lst)
    if head is None:
        raise PDDLError("expected a formula", lst.loc)
    args = lst.items[1:]
    if head == "and":
        return And(tuple(parse_formula(a, scope, env) for a in args), lst.loc)
    if head == "or":
        return Or(tuple(parse_formula(a, scope, env) for a in args), lst.loc)
    if head == "not":
        if len(args) != 1:
            raise PDDLError("'not' takes exactly one argument", lst.loc)
        return Not(parse_formula(args[0], scope, env), lst.loc)
    if head in ("exists", "forall"):
        if len(args) != 2:
            raise PDDLError(f"'{head}' takes a variable list and a body", lst.loc)
        tvars = _typed_vars(args[0], scope)
        inner = dict(env)
        inner.update({v.name: v.type for v in tvars})
        body = parse_formula(args[1], scope, inner)
        cls = Exists if head == "exists" else Forall
        return cls(tvars, body, lst.loc)
    if head in ("imply", "when"):
        raise PDDLError(f"'{head}' is not supported", lst.loc)
    return parse_atom(lst, scope, env)


def _parse_effect(node: SExpr, scope: _Scope, env: dict[str, str]) -> tuple[Literal, ...]:
    lst = _expect_list(node, "an effect")
    head = _head(lst)
    if head == "and":
        out: list[Literal] = []
        for item in lst.items[1:]:
            out.extend(_parse_effect(item, scope, env))
        return tuple(out)
    if head == "not":
        if len(lst.items) != 2:
            raise PDDLError("'not' takes exactly one argument", lst.loc)
        inner = _expect_list(lst.items[1], "an atom")
        return (Literal(parse_atom(inner, scope, env), False),)
    if head in ("forall", "when", "increase", "decrease", "assign"):
        raise PDDLError(f"'{head}' effects are not supported", lst.loc)
    atom = parse_atom(lst, scope, env)
    if atom.pred == EQUALITY:
        raise PDDLError("equality cannot be an effect", lst.loc)
    return (Literal(atom, True),)


def _parse_types(node: SList) -> TypeTree:
    pairs: list[tuple[str, str]] = []
    seen: set[str] = set()
    for name, parent, loc in parse_typed_list(node.items[1:], variables=False):
        if name == ROOT_TYPE:
            continue
        if name in seen:
            raise PDDLError(f"type {name!r} declared twice", loc)
        seen.add(name)
        pairs.append((name, parent))
    # parents that are never declared themselves hang off the root
    declared = {c for c, _ in pairs}
    for _, parent in list(pairs):
        if parent != ROOT_TYPE and parent not in declared:
            pairs.append((parent, ROOT_TYPE))
            declared.add(parent)
    return TypeTree(tuple(pairs), node.loc)


def _define_header(forms: list[SExpr], kind: str) -> tuple[SList, str]:
    if not forms:
        raise PDDLError(f"expected (define ({kind} ...))", Loc(1, 1))
    if len(forms) > 1:
        raise PDDLError("unexpected text after (define ...)", forms[1].loc)
    root = _expect_list(forms[0], f"(define ({kind} ...))")
    if _head(root) != "define" or len(root.items) < 2:
        raise PDDLError(f"expected (define ({kind} ...))", root.loc)
    header = _expect_list(root.items[1], f"({kind} <name>)")
    if _head(header) != kind or len(header.items) != 2:
        raise PDDLError(f"expected ({kind} <name>)", header.loc)
    return root, _expect_sym(header.items[1], "a name").text


def parse_domain(text: str, filename: str = "<string>") -> DomainDef:
    forms = read_sexpr(text, filename)
    root, name = _define_header(forms, "domain")
    requirements: tuple[str, ...] = ()
    types = TypeTree()
    predicates: dict[str, PredicateDecl] = {}
    scope = _Scope(types, predicates, {})
    pending_axioms: list[tuple[PredicateDecl, SExpr, Loc]] = []
    actions: list[SList] = []
    for item in root.items[2:]:
        section = _expect_list(item, "a domain section")
        key = _head(section)
        if key == ":requirements":
            requirements = _check_requirements(section)
        elif key == ":types":
            types = _parse_types(section)
            scope.types = types
        elif key == ":predicates":
            for decl_node in section.items[1:]:
                decl = _expect_list(decl_node, "a predicate declaration")
                pname = _expect_sym(decl.items[0], "a predicate name")
                params = _typed_vars(SList(decl.items[1:], decl.loc), scope)
                if pname.text in predicates:
                    raise PDDLError(f"predicate {pname.text!r} declared twice", pname.loc)
                predicates[pname.text] = PredicateDecl(pname.text, params, decl.loc)
        elif key == ":derived":
            if len(section.items) != 3:
                raise PDDLError("(:derived <head> <body>) expected", section.loc)
            head_node = _expect_list(section.items[1], "a derived predicate head")
            hname = _expect_sym(head_node.items[0], "a predicate name")
            params = _typed_vars(SList(head_node.items[1:], head_node.loc), scope)
            head = PredicateDecl(hname.text, params, head_node.loc)
            if hname.text in predicates:
                known = predicates[hname.text]
                if [p.type for p in known.params] != [p.type for p in params]:
                    raise PDDLError(f"inconsistent signature for derived {hname.text!r}", hname.loc)
            else:
                predicates[hname.text] = head
            pending_axioms.append((head, section.items[2], section.loc))
        elif key == ":action":
            actions.append(section)
        elif key == ":constants":
            raise PDDLError("unknown section keyword ':constants' (constants are not supported)", section.loc)
        else:
            raise PDDLError(f"unknown section keyword {key!r}", section.loc)

    # bodies are read after every predicate (including derived heads) is known
    axioms = []
    for head, body_node, loc in pending_axioms:
        env = {p.name: p.type for p in head.params}
        axioms.append(AxiomDef(head, parse_formula(body_node, scope, env), loc))
    schemas = [_parse_action(node, scope) for node in actions]
    base = tuple(p for p in predicates.values() if p.name not in {a.head.name for a in axioms})
    return DomainDef(name, requirements, types, base, tuple(axioms), tuple(schemas), root.loc)


def _parse_action(section: SList, scope: _Scope) -> ActionSchema:
    if len(section.items) < 2:
        raise PDDLError("action name expected", section.loc)
    name = _expect_sym(section.items[1], "an action name").text
    display = ""
    for pragma in section.pragmas:
        if pragma.startswith("display "):
            display = pragma.split(None, 1)[1].strip()
    fields: dict[str, SExpr] = {}
    rest = section.items[2:]
    for i in range(0, len(rest), 2):
        key = _expect_sym(rest[i], "an action keyword")
        if key.text not in (":parameters", ":precondition", ":effect"):
            raise PDDLError(f"unknown action keyword {key.text!r}", key.loc)
        if i + 1 >= len(rest):
            raise PDDLError(f"missing value for {key.text}", key.loc)
        fields[key.text] = rest[i + 1]
    params = _typed_vars(fields[":parameters"], scope) if ":parameters" in fields else ()
    env = {p.name: p.type for p in params}
    pre_node = fields.get(":precondition")
    if pre_node is None or (isinstance(pre_node, SList) and not pre_node.items):
        pre: Formula = And((), section.loc)
    else:
        pre = parse_formula(pre_node, scope, env)
    eff_node = fields.get(":effect")
    if eff_node is None or (isinstance(eff_node, SList) and not eff_node.items):
        effects: tuple[Literal, ...] = ()
    else:
        effects = _parse_effect(eff_node, scope, env)
    return ActionSchema(name, params, pre, effects, display if display != name else "", section.loc)


def parse_problem(text: str, domain: DomainDef, filename: str = "<string>") -> ProblemDef:
    forms = read_sexpr(text, filename)
    root, name = _define_header(forms, "problem")
    domain_name = domain.name
    objects: list[tuple[str, str]] = []
    constants: dict[str, str] = {}
    predicates = {p.name: p for p in domain.predicates}
    predicates.update({ax.head.name: ax.head for ax in domain.derived})
    scope = _Scope(domain.types, predicates, constants)
    init: set[Atom] = set()
    goal: Formula = And(())
    init_node: Optional[SList] = None
    goal_node: Optional[SList] = None
    for item in root.items[2:]:
        section = _expect_list(item, "a problem section")
        key = _head(section)
        if key == ":domain":
            domain_name = _expect_sym(section.items[1], "a domain name").text
            if domain_name != domain.name:
                raise PDDLError(f"problem is for domain {domain_name!r}, not {domain.name!r}", section.loc)
        elif key == ":requirements":
            _check_requirements(section)
        elif key == ":objects":
            for oname, otype, loc in parse_typed_list(section.items[1:], variables=False):
                scope.check_type(otype, loc)
                if oname in constants:
                    raise PDDLError(f"object {oname!r} declared twice", loc)
                constants[oname] = otype
                objects.append((oname, otype))
        elif key == ":init":
            init_node = section
        elif key == ":goal":
            goal_node = section
        else:
            raise PDDLError(f"unknown section keyword {key!r}", section.loc)
    if init_node is not None:
        derived = domain.derived_names
        for fact in init_node.items[1:]:
            lst = _expect_list(fact, "a ground atom")
            atom = parse_atom(lst, scope, {}, strict=True)
            if atom.pred in derived:
                raise PDDLError(f"derived predicate in init: {atom.pred}", lst.loc)
            if atom.pred == EQUALITY:
                raise PDDLError("equality atoms cannot appear in init", lst.loc)
            init.add(atom)
    if goal_node is not None:
        if len(goal_node.items) != 2:
            raise PDDLError("(:goal <formula>) expected", goal_node.loc)
        goal_sexpr = goal_node.items[1]
        if isinstance(goal_sexpr, SList) and not goal_sexpr.items:
            goal = And((), goal_sexpr.loc)
        else:
            goal = parse_formula(goal_sexpr, scope, {})
    return ProblemDef(name, domain_name, tuple(objects), frozenset(init), goal, root.loc)
