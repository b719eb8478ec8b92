"""The built-in kitchen domain and the safe-state goal."""

from __future__ import annotations

import logging
from functools import lru_cache
from importlib import resources
from typing import Iterable, Optional

from .pddl import And, Atom, DomainDef, Formula, check_domain, parse_domain

log = logging.getLogger(__name__)

# leaf type -> derived predicate that says an object of that type is safe
SAFETY_RULES: dict[str, str] = {
    "perishable": "safe-perishable",
    "nonperishable": "safe-nonperishable",
    "vessel": "safe-vessel",
    "utensil": "safe-utensil",
    "disposable": "safe-disposable",
    "device": "safe-device",
    "fridge": "safe-clopenable",
    "clopenablestorage": "safe-clopenable",
}

# fixed furniture that needs no rule of its own
NO_RULE_NEEDED = frozenset({"notclopenablestorage", "trash_can"})


def domain_text() -> str:
    return resources.files("abortd.data").joinpath("kitchen.pddl").read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def builtin_domain() -> DomainDef:
    return check_domain(parse_domain(domain_text(), "kitchen.pddl"))


def safety_predicate(typ: str, domain: Optional[DomainDef] = None) -> Optional[str]:
    """Rule for ``typ``, looked up along its ancestor chain."""
    tree = (domain or builtin_domain()).types
    for t in tree.ancestors(typ):
        if t in SAFETY_RULES:
            return SAFETY_RULES[t]
    return None


def safe_goal(objects: Iterable[tuple[str, str]], warnings: Optional[list[str]] = None) -> Formula:
    """One safe-* atom per object with a rule, then empty hands."""
    parts: list[Formula] = []
    for name, typ in objects:
        pred = safety_predicate(typ)
        if pred is None:
            if typ not in NO_RULE_NEEDED:
                msg = f"W004: no safety rule for {name} ({typ}); left out of the goal"
                log.warning(msg)
                if warnings is not None:
                    warnings.append(msg)
            continue
        parts.append(Atom(pred, (name,)))
    parts.append(Atom("robot-can-grasp", ()))
    return And(tuple(parts))
