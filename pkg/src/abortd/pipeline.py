"""End-to-end abort planning shared by the CLI and the HTTP service."""

from __future__ import annotations

import ast
import json
import re
from dataclasses import dataclass, field
from typing import Any

from .grounding import GroundTask, ground
from .kitchen import builtin_domain
from .mapper import MappedWorld, WorldSnapshot, map_world, normalize_name
from .ontology import OntologySets
from .pddl import DomainDef, ProblemDef, check_domain, parse_domain, parse_problem
from .search import (
    DEFAULT_MAX_EXPANSIONS,
    DEFAULT_MAX_SECONDS,
    Plan,
    PlanStep,
    SearchStats,
    gbfs,
)


@dataclass(frozen=True)
class Limits:
    max_expansions: int = DEFAULT_MAX_EXPANSIONS
    max_seconds: float = DEFAULT_MAX_SECONDS

    @classmethod
    def from_json(cls, doc: Any) -> "Limits":
        if doc is None:
            return cls()
        if not isinstance(doc, dict):
            raise ValueError("'limits' must be an object")
        exp = doc.get("max_expansions", DEFAULT_MAX_EXPANSIONS)
        sec = doc.get("max_seconds", DEFAULT_MAX_SECONDS)
        if not isinstance(exp, int) or isinstance(exp, bool) or exp <= 0:
            raise ValueError("max_expansions must be a positive integer")
        if not isinstance(sec, (int, float)) or isinstance(sec, bool) or sec <= 0:
            raise ValueError("max_seconds must be a positive number")
        # requests may tighten the budget but never exceed the defaults
        return cls(min(exp, DEFAULT_MAX_EXPANSIONS), min(float(sec), DEFAULT_MAX_SECONDS))


@dataclass
class AbortResult:
    mapped: MappedWorld
    task: GroundTask
    plan: Plan  # PDDL names
    rendered: Plan  # snapshot names
    stats: SearchStats = field(default_factory=SearchStats)

    def response(self) -> dict:
        return {
            "plan": self.rendered.to_json(),
            "paper_style": [s.paper_style() for s in self.rendered],
            "stats": {"expansions": self.stats.expansions, "seconds": round(self.stats.seconds, 6)},
            "warnings": list(self.mapped.warnings),
        }


def plan_json(plan: Plan) -> str:
    """Canonical plan JSON; CLI and service both emit exactly this."""
    return json.dumps(plan.to_json(), separators=(", ", ": "))


def abort(snapshot: WorldSnapshot, kb: OntologySets, limits: Limits = Limits()) -> AbortResult:
    """Map the world, ground the kitchen task and search for a safe-state plan.

    Search failures propagate as :class:`search.Unsolvable` or
    :class:`search.LimitExceeded`.
    """
    mapped = map_world(snapshot, kb)
    task = ground(builtin_domain(), mapped.problem)
    result = gbfs(task, limits.max_expansions, limits.max_seconds)
    return AbortResult(mapped, task, result.plan, mapped.render(result.plan), result.stats)


def load_task(domain_text: str, problem_text: str, domain_file: str = "<domain>", problem_file: str = "<problem>"):
    domain = check_domain(parse_domain(domain_text, domain_file))
    problem = parse_problem(problem_text, domain, problem_file)
    return domain, problem, ground(domain, problem)


def plan_task(domain: DomainDef, problem: ProblemDef, limits: Limits = Limits()):
    task = ground(domain, problem)
    return task, gbfs(task, limits.max_expansions, limits.max_seconds)


# -- plan files -------------------------------------------------------------------


def _resolve(name: str, known: set[str]) -> str:
    low = name.lower()
    if low in known:
        return low
    snake = normalize_name(name)
    return snake if snake in known else low


def parse_plan_text(text: str, objects: set[str]) -> Plan:
    """Read a plan as JSON, tuple lines ('put', ['a', 'b']) or s-expressions (put a b).

    Snapshot spellings are mapped back to PDDL names when they match.
    """
    stripped = text.strip()
    raw: list[tuple[str, list[str]]] = []
    if stripped.startswith("["):
        doc = json.loads(stripped)
        raw = [(d["action"], list(d["args"])) for d in doc]
    else:
        for line in stripped.splitlines():
            line = line.strip().rstrip(",").strip()
            if not line or line.startswith(";") or line.endswith(":"):
                continue
            if re.match(r"^\(\s*['\"]", line):
                name, args = ast.literal_eval(line)
                raw.append((str(name), [str(a) for a in args]))
            elif re.fullmatch(r"\(\s*[^()\s]+(\s+[^()\s]+)*\s*\)", line):
                parts = line[1:-1].split()
                raw.append((parts[0], parts[1:]))
            else:
                raise ValueError(f"cannot read plan line: {line!r}")
    steps = []
    for name, args in raw:
        steps.append(PlanStep(name.lower(), tuple(_resolve(a, objects) for a in args)))
    return Plan(tuple(steps))


def as_snapshot(doc: Any) -> tuple[WorldSnapshot, Limits]:
    if isinstance(doc, dict) and "snapshot" in doc:
        return WorldSnapshot.from_json(doc["snapshot"]), Limits.from_json(doc.get("limits"))
    limits = Limits.from_json(doc.get("limits")) if isinstance(doc, dict) else Limits()
    return WorldSnapshot.from_json(doc), limits


def objects_of(problem: ProblemDef) -> set[str]:
    return {name for name, _ in problem.objects}
