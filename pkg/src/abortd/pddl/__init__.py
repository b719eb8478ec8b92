"""PDDL front-end: lifted model, reader, printer and validator."""

from .errors import Diagnostic, PDDLError, ValidationError
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
    free_variables,
)
from .parser import SUPPORTED_REQUIREMENTS, parse_domain, parse_problem
from .printer import format_atom, format_formula, print_domain, print_problem
from .validate import check_domain, validate_domain, validate_problem

__all__ = [
    "EQUALITY",
    "ROOT_TYPE",
    "SUPPORTED_REQUIREMENTS",
    "ActionSchema",
    "And",
    "Atom",
    "AxiomDef",
    "Diagnostic",
    "DomainDef",
    "Exists",
    "Forall",
    "Formula",
    "Literal",
    "Loc",
    "Not",
    "Or",
    "PDDLError",
    "PredicateDecl",
    "ProblemDef",
    "TypedVar",
    "TypeTree",
    "ValidationError",
    "check_domain",
    "format_atom",
    "format_formula",
    "free_variables",
    "parse_domain",
    "parse_problem",
    "print_domain",
    "print_problem",
    "validate_domain",
    "validate_problem",
]
