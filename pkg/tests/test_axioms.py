import random
from concurrent.futures import ThreadPoolExecutor

import pytest

from abortd.axioms import NegativeCycle, closure, dependency_graph, evaluate, format_closure, predicate_levels, stratify
from abortd.grounding import TRUE, Lit, ground
from abortd.kitchen import builtin_domain
from abortd.mapper import map_world
from abortd.pddl import parse_domain, parse_problem

from conftest import scenario
from gen_domains import random_domains
from oracles import LiftedModel, random_base_state, transitive_at_oracle


def _domain(derived: str) -> str:
    return f"""(define (domain t)
      (:requirements :derived-predicates :negative-preconditions)
      (:predicates (b ?x))
      {derived})"""


def _micro(init):
    d = builtin_domain()
    p = parse_problem(
        "(define (problem m) (:domain kitchen) (:objects apple - perishable bowl - vessel fridge - fridge) "
        f"(:init {' '.join(init)}) (:goal (and)))",
        d,
    )
    return ground(d, p)


def _fact(task, *atom):
    return task.facts.id(tuple(atom))


# -- stratification -----------------------------------------------------------------


def test_kitchen_levels():
    level = predicate_levels(builtin_domain().derived)
    assert level["transitive-at"] == 0
    assert level["safe-perishable"] >= level["transitive-at"]
    assert level["safe-device"] >= level["safe-clopenable"]
    assert list(level) == sorted(level)


def test_single_axiom_one_stratum():
    d = parse_domain(_domain("(:derived (rcg) (not (exists (?o) (b ?o))))"))
    s = stratify(d.derived)
    assert s.level == {"rcg": 0}
    assert len(s.strata) == 1


def test_self_negation_cycle():
    d = parse_domain(_domain("(:derived (p) (not (p)))"))
    with pytest.raises(NegativeCycle) as info:
        stratify(d.derived)
    assert info.value.cycle == ["p", "p"]


def test_indirect_negative_cycle():
    d = parse_domain(_domain("(:derived (p) (q)) (:derived (q) (not (p)))"))
    with pytest.raises(NegativeCycle) as info:
        stratify(d.derived)
    cyc = info.value.cycle
    assert cyc[0] == cyc[-1] and set(cyc) == {"p", "q"}
    assert "p" in str(info.value) and "q" in str(info.value)


def test_negation_forces_higher_level():
    d = parse_domain(_domain("(:derived (q ?x) (b ?x)) (:derived (p ?x) (not (q ?x))) (:derived (r ?x) (p ?x))"))
    level = predicate_levels(d.derived)
    assert level == {"p": 1, "q": 0, "r": 1}
    graph = dependency_graph(d.derived)
    assert graph["p"] == {"q": True}


def test_positive_recursion_same_level():
    d = parse_domain(_domain("(:derived (p ?x) (or (b ?x) (q ?x))) (:derived (q ?x) (p ?x))"))
    assert predicate_levels(d.derived) == {"p": 0, "q": 0}


# -- closure ---------------------------------------------------------------------------


def test_apple_transitively_at_fridge():
    task = _micro(["(at apple bowl)", "(at bowl fridge)"])
    cl = closure(task.init, task)
    assert _fact(task, "transitive-at", "apple", "fridge") in cl
    assert _fact(task, "safe-perishable", "apple") in cl
    assert _fact(task, "transitive-at", "fridge", "apple") not in cl


def test_robot_can_grasp():
    task = _micro([])
    rcg = _fact(task, "robot-can-grasp")
    assert rcg in closure(task.init, task)
    task = _micro(["(holding-right bowl)"])
    assert rcg not in closure(task.init, task)
    assert evaluate(Lit(rcg, False), closure(task.init, task))


def test_evaluate_examples(kb):
    task = ground(builtin_domain(), map_world(scenario(2), kb).problem)
    cl = closure(task.init, task)
    assert evaluate(TRUE, cl)
    assert not evaluate(Lit(_fact(task, "safe-perishable", "onion")), cl)
    assert evaluate(Lit(_fact(task, "safe-perishable", "apple")), cl)
    empty = _micro([])
    assert not evaluate(Lit(_fact(empty, "robot-can-grasp"), False), closure(empty.init, empty))


def test_closed_door_makes_device_safe():
    d = builtin_domain()
    p = parse_problem(
        "(define (problem o) (:domain kitchen) (:objects oven - device) (:init (opened oven)) (:goal (and)))", d
    )
    task = ground(d, p)
    safe = _fact(task, "safe-device", "oven")
    assert safe not in closure(task.init, task)
    assert safe in closure(frozenset(), task)


def test_format_closure(kb):
    task = _micro(["(at apple bowl)"])
    text = format_closure(task, closure(task.init, task))
    assert text.startswith("stratum 0: ")
    assert "(transitive-at apple bowl)" in text


def test_closure_matches_lifted_oracle_seeded():
    d = builtin_domain()
    objects = [("apple", "perishable"), ("bowl", "vessel"), ("fridge", "fridge"), ("counter", "notclopenablestorage"),
               ("oven", "device"), ("bread", "nonperishable")]
    p = parse_problem(
        "(define (problem r) (:domain kitchen) (:objects " + " ".join(f"{o} - {t}" for o, t in objects) + ") (:init) (:goal (and)))",
        d,
    )
    task = ground(d, p, prune_task=False)
    model = LiftedModel(d, objects)
    rng = random.Random(5)
    names = [o for o, _ in objects]
    for _ in range(150):
        base = random_base_state(task, rng)
        cl = closure(base, task)
        got = {task.facts.atoms[f] for f in cl.derived}
        assert got == model.closure({task.facts.atoms[f] for f in base})
        edges = {task.facts.atoms[f][1:] for f in base if task.facts.atoms[f][0] == "at"}
        tat = {a[1:] for a in got if a[0] == "transitive-at"}
        assert tat == transitive_at_oracle(edges, names)


def test_random_programs_match_lifted_oracle():
    rng = random.Random(11)
    checked = 0
    for d in random_domains(2024, 80):
        if not d.derived:
            continue
        model_levels = LiftedModel(d, []).levels()
        try:
            stratify(d.derived)
        except NegativeCycle:
            assert model_levels is None
            continue
        assert model_levels is not None
        assert predicate_levels(d.derived) == model_levels
        tnames = sorted(d.types.names)
        objects = [(f"o{i}", rng.choice(tnames)) for i in range(rng.randint(0, 4))]
        p = parse_problem(
            "(define (problem r) (:domain " + d.name + ") (:objects "
            + " ".join(f"{o} - {t}" for o, t in objects) + ") (:init) (:goal (and)))",
            d,
        )
        task = ground(d, p, prune_task=False)
        model = LiftedModel(d, objects)
        for _ in range(10):
            base = random_base_state(task, rng, 0.3, 0.4)
            got = {task.facts.atoms[f] for f in closure(base, task).derived}
            assert got == model.closure({task.facts.atoms[f] for f in base})
        checked += 1
    assert checked >= 20


def test_monotone_without_negation():
    d = parse_domain(_domain("(:derived (p ?x) (or (b ?x) (exists (?y) (and (b ?y) (q ?y))))) (:derived (q ?x) (p ?x))"))
    p = parse_problem("(define (problem m) (:domain t) (:objects a b c) (:init) (:goal (and)))", d)
    task = ground(d, p, prune_task=False)
    rng = random.Random(3)
    for _ in range(50):
        base = random_base_state(task, rng, 0.3, 0.3)
        extra = base | {rng.choice(list(task.facts.base_ids))}
        assert closure(base, task).derived <= closure(extra, task).derived


def test_closure_deterministic_across_threads(kb):
    task = ground(builtin_domain(), map_world(scenario(2), kb).problem)
    rng = random.Random(8)
    states = [random_base_state(task, rng) for _ in range(40)]
    serial = [closure(s, task) for s in states]
    with ThreadPoolExecutor(max_workers=4) as pool:
        parallel = list(pool.map(lambda s: closure(s, task), states))
    assert serial == parallel
