import random

import pytest

from abortd.axioms import closure
from abortd.grounding import ground
from abortd.kitchen import NO_RULE_NEEDED, SAFETY_RULES, builtin_domain, domain_text, safe_goal, safety_predicate
from abortd.mapper import map_world
from abortd.pddl import And, Atom, Exists, Not, TypedVar, parse_domain, parse_problem, validate_domain
from abortd.randomworld import random_snapshot
from abortd.search import Unsolvable, final_state, gbfs

from conftest import scenario


def test_embedded_text_validates():
    assert validate_domain(parse_domain(domain_text())) == []


def test_base_predicates():
    d = builtin_domain()
    sig = {p.name: tuple(v.type for v in p.params) for p in d.predicates}
    assert sig == {
        "at": ("locatable", "locatable"),
        "opened": ("clopenable",),
        "device-on": ("device",),
        "holding-left": ("locatable",),
        "holding-right": ("locatable",),
        "immobile": ("locatable",),
    }


def test_actions_and_display_names():
    d = builtin_domain()
    assert [a.name for a in d.actions] == ["close", "move", "turn-off", "put-left", "put-right"]
    assert len([a for a in d.actions if a.display_name == "put"]) == 2


def test_move_precondition():
    move = builtin_domain().action("move")
    assert set(move.precondition.args) == {
        Atom("robot-can-grasp"),
        Not(Atom("immobile", ("?gr",))),
        Atom("at", ("?gr", "?src")),
    }


def test_safe_perishable_body():
    (ax,) = [a for a in builtin_domain().derived if a.name == "safe-perishable"]
    assert ax.body == Exists((TypedVar("?fr", "fridge"),), Atom("transitive-at", ("?p", "?fr")))


def test_types_match_listing():
    tree = builtin_domain().types
    assert tree.parents == {
        "locatable": "object",
        "container": "locatable", "utensil": "locatable", "food": "locatable", "disposable": "locatable",
        "vessel": "container", "storage": "container", "trash_can": "container",
        "clopenable": "storage", "notclopenablestorage": "storage",
        "device": "clopenable", "fridge": "clopenable", "clopenablestorage": "clopenable",
        "perishable": "food", "nonperishable": "food",
    }


def test_every_leaf_has_one_rule_or_is_fixture():
    tree = builtin_domain().types
    leaves = [t for t in tree.names if not tree.children(t) and tree.is_subtype(t, "locatable")]
    for leaf in leaves:
        rules = [SAFETY_RULES[t] for t in tree.ancestors(leaf) if t in SAFETY_RULES]
        if leaf in NO_RULE_NEEDED:
            assert rules == []
        else:
            assert len(rules) == 1, leaf
            assert safety_predicate(leaf) == rules[0]


def test_goal_scenario2(kb):
    goal = map_world(scenario(2), kb).problem.goal
    assert Atom("safe-perishable", ("onion",)) in goal.args
    assert Atom("safe-utensil", ("cooking_knife",)) in goal.args
    assert goal.args[-1] == Atom("robot-can-grasp")


def test_goal_zero_objects():
    assert safe_goal([]) == And((Atom("robot-can-grasp"),))


def test_goal_fridge_closed():
    warnings = []
    goal = safe_goal([("f", "fridge"), ("c", "notclopenablestorage"), ("x", "food")], warnings)
    assert Atom("safe-clopenable", ("f",)) in goal.args
    assert all(a.terms != ("c",) for a in goal.args)
    assert len(warnings) == 1 and warnings[0].startswith("W004")
    d = builtin_domain()
    p = parse_problem("(define (problem f) (:domain kitchen) (:objects f - fridge) (:init (opened f)) (:goal (safe-clopenable f)))", d)
    task = ground(d, p)
    fact = task.facts.id(("safe-clopenable", "f"))
    assert fact not in closure(task.init, task)
    assert fact in closure(frozenset(), task)


def test_oven_counts_as_storage():
    d = builtin_domain()
    p = parse_problem(
        "(define (problem o) (:domain kitchen) (:objects oven - device tray - utensil) "
        "(:init (holding-left tray) (immobile oven)) (:goal (and (safe-utensil tray) (safe-device oven) (robot-can-grasp))))",
        d,
    )
    plan = gbfs(ground(d, p)).plan
    assert [(s.action, s.args) for s in plan] == [("put", ("tray", "oven"))]


def _check_safe(task, cl):
    types = dict(task.objects)
    tree = builtin_domain().types
    true = {task.facts.atoms[f] for f in cl.true_facts}
    assert not any(a[0] in ("holding-left", "holding-right") for a in true)
    for o, t in types.items():
        if t == "perishable":
            assert any(a[0] == "transitive-at" and a[1] == o and types[a[2]] == "fridge" for a in true)
        if tree.is_subtype(t, "device"):
            assert ("device-on", o) not in true
        if tree.is_subtype(t, "clopenable"):
            assert ("opened", o) not in true


@pytest.mark.parametrize("n", [1, 2])
def test_goal_semantics_on_scenarios(kb, n):
    task = ground(builtin_domain(), map_world(scenario(n), kb).problem)
    _check_safe(task, final_state(task, gbfs(task).plan))


def test_goal_semantics_on_random_worlds(kb):
    rng = random.Random(77)
    solved = 0
    for _ in range(40):
        task = ground(builtin_domain(), map_world(random_snapshot(rng), kb).problem)
        try:
            plan = gbfs(task).plan
        except Unsolvable:
            continue
        _check_safe(task, final_state(task, plan))
        solved += 1
    assert solved >= 20
