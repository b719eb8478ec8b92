"""Derived predicates on a tiny world: what becomes true as objects move."""

from abortd.axioms import closure, format_closure, stratify
from abortd.grounding import ground
from abortd.kitchen import builtin_domain
from abortd.pddl import parse_problem
from abortd.search import apply

d = builtin_domain()
strat = stratify(d.derived)
print("strata:", {lvl: sorted(p for p, l in strat.level.items() if l == lvl) for lvl in sorted(set(strat.level.values()))})

problem = parse_problem(
    """(define (problem micro) (:domain kitchen)
      (:objects apple - perishable bowl - vessel counter - notclopenablestorage fridge - fridge)
      (:init (at apple bowl) (at bowl counter) (immobile counter) (immobile fridge))
      (:goal (safe-perishable apple)))""",
    d,
)
task = ground(d, problem)

state = frozenset(task.init)
print("\nbowl on the counter:")
print(format_closure(task, closure(state, task)))

move = next(a for a in task.actions if a.name == "move" and a.args == ("bowl", "counter", "fridge"))
state = apply(state, move)
print("\nafter (move bowl counter fridge):")
print(format_closure(task, closure(state, task)))
