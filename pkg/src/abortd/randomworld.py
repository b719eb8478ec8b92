"""Seeded random kitchen snapshots for property tests and benchmarks."""

from __future__ import annotations

import random
from typing import Any, Optional

from .mapper import WorldSnapshot

# name, characteristics, immobile
_STORAGES = (
    ("kitchenCounter", ["canContain"], True),
    ("kitchenCabinet", ["canContain", "canOpen"], True),
    ("fridge", ["isFridge", "canContain", "canOpen"], True),
    ("oven", ["canTurnOn", "canBake", "canContain", "canOpen"], True),
)

_ITEMS = (
    ("mediumBowl", ["canContain", "portable"]),
    ("cookingKnife", ["canCut", "portable"]),
    ("bakingTray", ["canBake", "portable"]),
    ("fryingPan", ["portable"]),  # utensil via the ontology
    ("apple", ["portable"]),  # perishable via the ontology
    ("onion", ["portable"]),
    ("milk", ["edible", "perishableHint", "portable"]),
    ("bread", ["edible", "portable"]),
)


def random_snapshot_doc(rng: random.Random, max_objects: int = 8, p_loose: float = 0.05) -> dict[str, Any]:
    """Snapshot JSON with at most ``max_objects`` objects.

    Storages are drawn first, then portable items. Each item is held, placed in
    a storage or in an earlier vessel (so containment stays acyclic), or with
    probability ``p_loose`` has no location at all.
    """
    n = rng.randint(2, max_objects)
    storages = [s for s in _STORAGES if rng.random() < 0.6]
    if not storages:
        storages = [rng.choice(_STORAGES)]
    storages = storages[: n - 1]

    objects: list[dict[str, Any]] = []
    for name, chars, immobile in storages:
        obj: dict[str, Any] = {"name": name, "characteristics": list(chars), "location": None, "immobile": immobile}
        if "canOpen" in chars:
            obj["opened"] = rng.random() < 0.5
        if "canTurnOn" in chars:
            obj["poweredOn"] = rng.random() < 0.5
        objects.append(obj)

    containers = [o["name"] for o in objects]
    hands: list[Optional[str]] = [None, None]
    counts: dict[str, int] = {}
    for _ in range(n - len(objects)):
        base, chars = rng.choice(_ITEMS)
        counts[base] = counts.get(base, 0) + 1
        name = f"{base}{counts[base]}"
        obj = {"name": name, "characteristics": list(chars), "location": None, "immobile": False}
        free = [i for i, h in enumerate(hands) if h is None]
        roll = rng.random()
        if free and roll < 0.25:
            hands[rng.choice(free)] = name
        elif roll < 1.0 - p_loose:
            obj["location"] = rng.choice(containers)
        objects.append(obj)
        if "canContain" in chars and obj["location"] is not None:
            containers.append(name)
    return {"version": 1, "robot": {"leftHand": hands[0], "rightHand": hands[1]}, "objects": objects}


def random_snapshot(rng: random.Random, max_objects: int = 8, p_loose: float = 0.05) -> WorldSnapshot:
    return WorldSnapshot.from_json(random_snapshot_doc(rng, max_objects, p_loose))
