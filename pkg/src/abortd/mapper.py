"""World snapshot -> PDDL problem over the kitchen domain.

Snapshot JSON, version 1::

    {"version": 1,
     "robot": {"leftHand": "name" | null, "rightHand": "name" | null},
     "objects": [{"name": "mediumBowl3",
                  "characteristics": ["canContain", "portable"],
                  "location": "kitchenCabinet" | null,
                  "opened": false,        # optional, canOpen objects
                  "poweredOn": false,     # optional, canTurnOn objects
                  "immobile": false}]}

Warnings carry stable codes: W001 unknown characteristic, W002 default
classification, W003 scenery skipped, W004 object without safety rule,
W005 location on skipped scenery, W006 flag on an object that cannot carry it.
"""

from __future__ import annotations

import enum
import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

from .kitchen import builtin_domain, safe_goal
from .ontology import OntologySets
from .pddl import Atom, ProblemDef
from .search import Plan, PlanStep

log = logging.getLogger(__name__)

SNAPSHOT_VERSION = 1

KNOWN_CHARACTERISTICS = frozenset(
    {
        "canCut",
        "canBake",
        "canContain",
        "canOpen",
        "canTurnOn",
        "isFridge",
        "isTrash",
        "isMeal",
        "edible",
        "perishableHint",
        "portable",
    }
)

# characteristics that make an immobile object more than scenery
_TYPING_FLAGS = frozenset({"canCut", "canBake", "canContain", "canTurnOn", "isFridge", "isTrash", "edible", "isMeal"})


class SnapshotError(ValueError):
    pass


@dataclass(frozen=True)
class ObjectRecord:
    name: str
    characteristics: frozenset[str] = frozenset()
    location: Optional[str] = None
    opened: Optional[bool] = None
    powered_on: Optional[bool] = None
    immobile: bool = False

    def has(self, flag: str) -> bool:
        return flag in self.characteristics


@dataclass(frozen=True)
class WorldSnapshot:
    objects: tuple[ObjectRecord, ...] = ()
    left_hand: Optional[str] = None
    right_hand: Optional[str] = None

    @classmethod
    def from_json(cls, doc: Any) -> "WorldSnapshot":
        if not isinstance(doc, dict):
            raise SnapshotError("snapshot must be a JSON object")
        version = doc.get("version")
        if version != SNAPSHOT_VERSION:
            raise SnapshotError(f"unsupported snapshot version {version!r} (expected {SNAPSHOT_VERSION})")
        robot = doc.get("robot", {})
        objects = doc.get("objects")
        if not isinstance(robot, dict) or not isinstance(objects, list):
            raise SnapshotError("snapshot needs a 'robot' object and an 'objects' list")
        records = []
        for i, obj in enumerate(objects):
            if not isinstance(obj, dict) or not isinstance(obj.get("name"), str) or not obj["name"]:
                raise SnapshotError(f"objects[{i}] needs a non-empty 'name'")
            chars = obj.get("characteristics", [])
            if not isinstance(chars, list) or not all(isinstance(c, str) for c in chars):
                raise SnapshotError(f"objects[{i}].characteristics must be a list of strings")
            records.append(
                ObjectRecord(
                    name=obj["name"],
                    characteristics=frozenset(chars),
                    location=obj.get("location"),
                    opened=obj.get("opened"),
                    powered_on=obj.get("poweredOn"),
                    immobile=bool(obj.get("immobile", False)),
                )
            )
        return cls(tuple(records), robot.get("leftHand"), robot.get("rightHand"))

    @classmethod
    def load(cls, path: Union[str, Path]) -> "WorldSnapshot":
        with open(path, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SnapshotError(f"{path}: not valid JSON: {exc}") from exc
        return cls.from_json(doc)


class Source(enum.Enum):
    LOCAL_RULE = "local"
    ONTOLOGY = "ontology"
    DEFAULT = "default"


@dataclass(frozen=True)
class Classification:
    pddl_type: str
    source: Source
    rule: str


# first match wins
_LADDER: tuple[tuple[str, str, Any], ...] = (
    ("R1", "fridge", lambda r: r.has("isFridge")),
    ("R2", "trash_can", lambda r: r.has("isTrash")),
    ("R3", "device", lambda r: r.has("canTurnOn")),
    ("R4", "clopenablestorage", lambda r: r.has("canOpen") and r.has("canContain") and r.immobile),
    ("R5", "notclopenablestorage", lambda r: r.has("canContain") and r.immobile),
    ("R6", "vessel", lambda r: r.has("canContain") and r.has("portable")),
    ("R7", "utensil", lambda r: r.has("canCut") or r.has("canBake")),
    ("R8", "perishable", lambda r: r.has("edible") and r.has("perishableHint")),
    ("R9", "nonperishable", lambda r: r.has("edible")),
)


def normalize_name(name: str) -> str:
    """camelCase -> snake_case; digits stay attached (mediumBowl3 -> medium_bowl3)."""
    snake = re.sub(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])", "_", name)
    snake = re.sub(r"[^A-Za-z0-9_\-]+", "_", snake)
    return snake.lower()


def ontology_key(pddl_name: str) -> str:
    """Label form used for knowledge-graph lookups: frying_pan2 -> "frying pan"."""
    return " ".join(re.sub(r"[\d_]+$", "", pddl_name).replace("_", " ").replace("-", " ").split())


def classify(record: ObjectRecord, kb: OntologySets) -> Classification:
    for rule, typ, test in _LADDER:
        if test(record):
            return Classification(typ, Source.LOCAL_RULE, rule)
    key = ontology_key(normalize_name(record.name))
    if key in kb.perishables:
        return Classification("perishable", Source.ONTOLOGY, "ONT-perishable")
    if key in kb.utensils:
        return Classification("utensil", Source.ONTOLOGY, "ONT-utensil")
    return Classification("nonperishable", Source.DEFAULT, "DEFAULT")


def is_scenery(record: ObjectRecord) -> bool:
    return record.immobile and not (record.characteristics & _TYPING_FLAGS)


@dataclass
class MappedWorld:
    problem: ProblemDef
    aliases: dict[str, str]  # PDDL name -> snapshot name
    classifications: dict[str, Classification]  # keyed by snapshot name
    warnings: list[str] = field(default_factory=list)

    def render(self, plan: Plan) -> Plan:
        return render_plan_names(plan, self.aliases)


def _warn(warnings: list[str], msg: str) -> None:
    log.warning(msg)
    warnings.append(msg)


def map_world(snapshot: WorldSnapshot, kb: OntologySets, name: str = "abort") -> MappedWorld:
    """Classify every object and build init atoms plus the safe-state goal."""
    warnings: list[str] = []
    by_name = {r.name: r for r in snapshot.objects}
    if len(by_name) != len(snapshot.objects):
        dupes = sorted({r.name for r in snapshot.objects if sum(o.name == r.name for o in snapshot.objects) > 1})
        raise SnapshotError(f"duplicate object names: {', '.join(dupes)}")
    held = {}
    for hand, obj in (("left", snapshot.left_hand), ("right", snapshot.right_hand)):
        if obj is None or obj == "":
            continue
        if obj not in by_name:
            raise SnapshotError(f"{hand} hand holds unknown object {obj!r}")
        if obj in held:
            raise SnapshotError(f"{obj!r} is held in both hands")
        held[obj] = hand
        if by_name[obj].location is not None:
            raise SnapshotError(f"{obj!r} is held but also located at {by_name[obj].location!r}")
    for r in snapshot.objects:
        if r.location is not None and r.location not in by_name:
            raise SnapshotError(f"{r.name!r} is located at unknown object {r.location!r}")
        if r.location == r.name:
            raise SnapshotError(f"{r.name!r} is located inside itself")

    aliases: dict[str, str] = {}
    for r in snapshot.objects:
        pname = normalize_name(r.name)
        if pname in aliases:
            raise SnapshotError(f"names {aliases[pname]!r} and {r.name!r} both normalize to {pname!r}")
        aliases[pname] = r.name

    classifications: dict[str, Classification] = {}
    objects: list[tuple[str, str]] = []
    skipped: set[str] = set()
    for r in snapshot.objects:
        for flag in sorted(r.characteristics - KNOWN_CHARACTERISTICS):
            _warn(warnings, f"W001: unknown characteristic {flag!r} on {r.name}; ignored")
        if is_scenery(r) and r.name not in held:
            skipped.add(r.name)
            _warn(warnings, f"W003: {r.name} is immobile scenery; left out of the problem")
            continue
        c = classify(r, kb)
        if c.source is Source.DEFAULT:
            _warn(warnings, f"W002: no rule or ontology entry classifies {r.name}; assuming nonperishable")
        classifications[r.name] = c
        objects.append((normalize_name(r.name), c.pddl_type))

    types = builtin_domain().types
    init: set[Atom] = set()
    for r in snapshot.objects:
        if r.name in skipped:
            continue
        me = normalize_name(r.name)
        typ = classifications[r.name].pddl_type
        if r.location is not None:
            if r.location in skipped:
                _warn(warnings, f"W005: {r.name} rests on scenery {r.location}; location dropped")
            else:
                init.add(Atom("at", (me, normalize_name(r.location))))
        if r.name in held:
            init.add(Atom(f"holding-{held[r.name]}", (me,)))
        if r.opened:
            if types.is_subtype(typ, "clopenable"):
                init.add(Atom("opened", (me,)))
            else:
                _warn(warnings, f"W006: {r.name} is marked opened but is a {typ}; ignored")
        if r.powered_on:
            if types.is_subtype(typ, "device"):
                init.add(Atom("device-on", (me,)))
            else:
                _warn(warnings, f"W006: {r.name} is marked powered on but is a {typ}; ignored")
        if r.immobile:
            init.add(Atom("immobile", (me,)))

    goal = safe_goal(objects, warnings)
    problem = ProblemDef(name, builtin_domain().name, tuple(objects), frozenset(init), goal)
    return MappedWorld(problem, {p: aliases[p] for p, _ in objects}, classifications, warnings)


def render_plan_names(plan: Plan, aliases: dict[str, str]) -> Plan:
    """Rewrite plan arguments in the snapshot's own spelling."""
    return Plan(tuple(PlanStep(s.action, tuple(aliases.get(a, a) for a in s.args), s.schema) for s in plan))


def classify_table(snapshot: WorldSnapshot, kb: OntologySets) -> list[tuple[str, str, str]]:
    rows = []
    for r in snapshot.objects:
        if is_scenery(r):
            rows.append((normalize_name(r.name), "-", "scenery"))
            continue
        c = classify(r, kb)
        rows.append((normalize_name(r.name), c.pddl_type, c.source.value))
    return rows
