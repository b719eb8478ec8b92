import itertools

import pytest

from abortd.grounding import FALSE, TRUE, Conj, Const, Disj, Lit, conj, disj, dump, ground, holds, prune
from abortd.kitchen import builtin_domain
from abortd.mapper import map_world
from abortd.pddl import parse_domain, parse_problem
from abortd.axioms import closure
from abortd.search import applicable, apply, gbfs, goal_reached, validate_plan

from conftest import scenario

CHAIN = """
(define (domain chain)
  (:requirements :typing :derived-predicates :existential-preconditions :universal-preconditions)
  (:types thing - object)
  (:predicates (at ?x - thing ?y - thing) (flag))
  (:derived (tat ?x - thing ?y - thing)
    (or (at ?x ?y) (exists (?z - thing) (and (at ?x ?z) (tat ?z ?y)))))
  (:action raise :parameters () :precondition (forall (?t - thing) (not (at ?t ?t))) :effect (flag)))
"""


def _subtypes_oracle(parents: dict[str, str], typ: str) -> set[str]:
    # every type whose parent chain reaches typ; written without TypeTree
    out = set()
    for t in set(parents) | set(parents.values()) | {"object"}:
        cur = t
        while True:
            if cur == typ:
                out.add(t)
                break
            if cur not in parents:
                break
            cur = parents[cur]
    return out


def _problem_text(objects, init, goal="(and)"):
    objs = " ".join(f"{o} - {t}" for o, t in objects)
    return f"(define (problem p) (:domain kitchen) (:objects {objs}) (:init {' '.join(init)}) (:goal {goal}))"


def test_instantiation_count_matches_enumeration(kb):
    domain = builtin_domain()
    problem = map_world(scenario(1), kb).problem
    task = ground(domain, problem, prune_task=False)
    parents = domain.types.parents
    by_type = {}
    for schema in domain.actions:
        lists = []
        for v in schema.params:
            allowed = _subtypes_oracle(parents, v.type)
            lists.append([o for o, t in problem.objects if t in allowed])
        expected = list(itertools.product(*lists))
        got = [a.args for a in task.actions if a.name == schema.name]
        assert got == expected, schema.name
        by_type[schema.name] = len(expected)
    assert len(task.actions) == sum(by_type.values())
    # 9 locatables, 6 containers (4 storages + 2 bowls), 4 storages
    assert by_type["move"] == 9 * 6 * 4


def test_move_bindings_subtype_correct(kb):
    domain = builtin_domain()
    problem = map_world(scenario(1), kb).problem
    task = ground(domain, problem)
    types = problem.object_types
    for a in task.actions:
        if a.name == "move":
            gr, src, dest = a.args
            assert domain.types.is_subtype(types[src], "container")
            assert domain.types.is_subtype(types[dest], "storage")


def test_zero_objects():
    domain = parse_domain(CHAIN)
    task = ground(domain, parse_problem("(define (problem e) (:domain chain) (:objects) (:init) (:goal (and)))", domain))
    assert len(task.actions) == 1  # only the parameterless action
    assert task.axioms == ()
    assert task.goal == TRUE
    domain2 = parse_domain(CHAIN.replace("(:action raise :parameters () :precondition (forall (?t - thing) (not (at ?t ?t))) :effect (flag))", ""))
    task2 = ground(domain2, parse_problem("(define (problem e) (:domain chain) (:init) (:goal (and)))", domain2))
    assert (len(task2.actions), len(task2.axioms), task2.goal) == (0, 0, TRUE)


def test_empty_quantifiers():
    domain = parse_domain(CHAIN)
    task = ground(domain, parse_problem("(define (problem e) (:domain chain) (:init) (:goal (flag)))", domain), prune_task=False)
    (raise_,) = task.actions
    assert raise_.pre == TRUE  # forall over nothing
    p = parse_problem("(define (problem e) (:domain chain) (:init) (:goal (exists (?t - thing) (at ?t ?t))))", domain)
    assert ground(domain, p).goal == FALSE


def test_micro_world_transitive_at_heads():
    d = builtin_domain()
    p = parse_problem(
        _problem_text([("apple", "perishable"), ("bowl", "vessel"), ("fridge", "fridge")], ["(at apple bowl)", "(at bowl fridge)"]),
        d,
    )
    task = ground(d, p)
    heads = sorted(task.atom(ax.head)[1:] for ax in task.axioms if ax.pred == "transitive-at")
    names = ["apple", "bowl", "fridge"]
    assert heads == sorted(itertools.product(names, names))


def test_fact_table_layout(kb):
    task = ground(builtin_domain(), map_world(scenario(2), kb).problem)
    facts = task.facts
    derived_preds = builtin_domain().derived_names
    for i in facts.base_ids:
        assert facts.atoms[i][0] not in derived_preds
    for i in facts.derived_ids:
        assert facts.atoms[i][0] in derived_preds
    assert len(set(facts.atoms)) == len(facts.atoms)
    for i, atom in enumerate(facts.atoms):
        assert facts.id(atom) == i
    for pred, (lo, hi) in facts.ranges().items():
        assert all(facts.atoms[i][0] == pred for i in range(lo, hi))
    for a in task.actions:
        assert not (a.add & a.delete)
        assert all(f < facts.n_base for f in a.add | a.delete)
    for ax in task.axioms:
        assert facts.is_derived(ax.head)
    assert all(f < facts.n_base for f in task.init)


def test_prune_removes_unopenable_close():
    d = builtin_domain()
    p = parse_problem(_problem_text([("fridge", "fridge"), ("cab", "clopenablestorage")], ["(opened cab)"]), d)
    task = ground(d, p)
    closes = [a.args for a in task.actions if a.name == "close"]
    assert closes == [("cab",)]
    assert ("opened", "fridge") not in task.facts.index


def test_prune_fixpoint_identity():
    d = builtin_domain()
    p = parse_problem(_problem_text([("fridge", "fridge")], ["(opened fridge)"]), d)
    once = ground(d, p)
    assert prune(once) == once


def test_pruned_and_unpruned_plans_agree(kb):
    problem = map_world(scenario(2), kb).problem
    full = ground(builtin_domain(), problem, prune_task=False)
    small = ground(builtin_domain(), problem)
    assert len(small.actions) < len(full.actions)
    for task in (full, small):
        plan = gbfs(task).plan
        assert validate_plan(full, plan) and validate_plan(small, plan)
        assert len(plan) == 2


def _sequences(task, depth):
    """Every applicable action sequence of length <= depth, with its end state."""
    out = []
    frontier = [((), frozenset(task.init))]
    for _ in range(depth):
        nxt = []
        for seq, state in frontier:
            cl = closure(state, task)
            for a in task.actions:
                if applicable(cl, a):
                    nxt.append((seq + (a,), apply(state, a)))
        out.extend(nxt)
        frontier = nxt
    return out


def test_pruning_soundness_exhaustive():
    d = builtin_domain()
    p = parse_problem(
        _problem_text(
            [("bowl", "vessel"), ("fridge", "fridge"), ("apple", "perishable")],
            ["(holding-left apple)", "(at bowl fridge)", "(immobile fridge)"],
        ),
        d,
    )
    full = ground(d, p, prune_task=False)
    small = ground(d, p)
    kept = {(a.name, a.args) for a in small.actions}
    seqs = _sequences(full, 3)
    assert seqs
    for seq, state in seqs:
        assert all((a.name, a.args) in kept for a in seq)
        end_full = goal_reached(closure(state, full), full)
        # same plan replayed in the pruned task
        s = frozenset(small.init)
        by_key = {(a.name, a.args): a for a in small.actions}
        for a in seq:
            b = by_key[(a.name, a.args)]
            assert applicable(closure(s, small), b)
            s = apply(s, b)
        assert goal_reached(closure(s, small), small) == end_full


def test_formula_simplification():
    assert conj([]) == TRUE and disj([]) == FALSE
    assert conj([Lit(1), FALSE]) == FALSE
    assert disj([Lit(1), TRUE]) == TRUE
    assert conj([Lit(1)]) == Lit(1)
    f = Conj((Lit(0), Disj((Lit(1, False), Lit(2)))))
    assert holds(f, {0}) and holds(f, {0, 2}) and not holds(f, {0, 1}) and not holds(f, set())
    assert Const(True) == TRUE


def test_dump_format(kb):
    task = ground(builtin_domain(), map_world(scenario(1), kb).problem)
    lines = dump(task).splitlines()
    assert lines[0].startswith("fact 0 (")
    puts = [l for l in lines if l.startswith("action (put-right medium_bowl3 kitchen_counter)")]
    assert len(puts) == 1
    assert " pre=" in puts[0] and " add=" in puts[0] and " del=" in puts[0]
    assert lines[-1].startswith("goal ")
    assert dump(task) == dump(ground(builtin_domain(), map_world(scenario(1), kb).problem))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_chain_grounding_scales(n):
    domain = parse_domain(CHAIN)
    objs = " ".join(f"o{i}" for i in range(n))
    task = ground(domain, parse_problem(f"(define (problem c) (:domain chain) (:objects {objs} - thing) (:init) (:goal (and)))", domain))
    assert sum(1 for ax in task.axioms if ax.pred == "tat") == n * n
