import json
import subprocess
import sys

import pytest

from abortd import ontology
from abortd.cli import main
from abortd.kitchen import domain_text

from conftest import SCENARIOS

S1 = str(SCENARIOS / "scenario1.json")
S2 = str(SCENARIOS / "scenario2.json")

SATISFIED = """(define (problem done) (:domain kitchen)
  (:objects bowl - vessel counter - notclopenablestorage)
  (:init (at bowl counter) (immobile counter))
  (:goal (and (safe-vessel bowl) (robot-can-grasp))))
"""

STUCK = """(define (problem stuck) (:domain kitchen)
  (:objects onion - perishable)
  (:init (holding-left onion))
  (:goal (safe-perishable onion)))
"""


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:  # argparse exits directly
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_abort_scenario1(capsys):
    code, out, err = run(capsys, "abort", S1)
    assert code == 0
    assert out == "('put', ['mediumBowl3', 'kitchenCounter'])\n"
    assert "expansions=" in err


def test_abort_scenario2(capsys):
    code, out, _ = run(capsys, "abort", S2)
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 2
    assert lines[0].startswith("('put', ['cookingKnife', ")
    assert lines[1] == "('move', ['onion', 'kitchenCounter', 'fridge'])"


def test_abort_json(capsys):
    code, out, _ = run(capsys, "abort", S2, "--json")
    assert code == 0
    plan = json.loads(out)
    assert plan[-1] == {"action": "move", "args": ["onion", "kitchenCounter", "fridge"]}


def test_abort_already_safe(capsys, tmp_path):
    snap = {"version": 1, "robot": {}, "objects": [{"name": "counter", "characteristics": ["canContain"], "immobile": True}]}
    code, out, _ = run(capsys, "abort", write(tmp_path, "s.json", json.dumps(snap)))
    assert (code, out) == (0, "world already safe\n")


def test_abort_unsolvable(capsys, tmp_path):
    snap = {"version": 1, "robot": {"leftHand": "milk"}, "objects": [{"name": "milk", "characteristics": ["edible", "perishableHint"]}]}
    code, out, err = run(capsys, "abort", write(tmp_path, "s.json", json.dumps(snap)))
    assert code == 2 and out == "" and "unsolvable" in err


def test_abort_limit(capsys):
    code, _, err = run(capsys, "abort", S2, "--max-expansions", "1")
    assert code == 4 and "limit exceeded" in err


def test_dump_ground(capsys, tmp_path):
    target = tmp_path / "g.txt"
    assert run(capsys, "abort", S1, "--dump-ground", str(target))[0] == 0
    assert "put-right" in target.read_text()


@pytest.mark.parametrize(
    "argv",
    [
        ["abort", "missing.json"],
        ["frobnicate"],
        ["abort", S1, "--max-expansions", "0"],
        ["abort", S1, "--cache", "nowhere.json"],
    ],
)
def test_input_errors_exit_3(capsys, argv):
    assert run(capsys, *argv)[0] == 3


def test_bad_snapshot_exit_3(capsys, tmp_path):
    code, _, err = run(capsys, "abort", write(tmp_path, "s.json", "{oops"))
    assert code == 3 and "not valid JSON" in err
    code, _, err = run(capsys, "abort", write(tmp_path, "t.json", '{"version": 9}'))
    assert code == 3 and "version" in err


def test_validate_plan_formats(capsys, tmp_path):
    dfile = write(tmp_path, "d.pddl", domain_text())
    assert run(capsys, "map", S2, "-o", str(tmp_path / "p.pddl"))[0] == 0
    pfile = str(tmp_path / "p.pddl")
    good = [
        "('put', ['cookingKnife', 'kitchenCounter']),\n('move', ['onion', 'kitchenCounter', 'fridge'])\n",
        '[{"action": "put", "args": ["cooking_knife", "kitchen_counter"]}, {"action": "move", "args": ["onion", "kitchen_counter", "fridge"]}]',
        "(put-right cooking_knife kitchen_counter)\n(move onion kitchen_counter fridge)\n",
    ]
    for i, text in enumerate(good):
        code, out, _ = run(capsys, "validate", dfile, pfile, write(tmp_path, f"plan{i}.txt", text))
        assert (code, out) == (0, "VALID\n")
    swapped = "('move', ['onion', 'kitchenCounter', 'fridge'])\n('put', ['cookingKnife', 'kitchenCounter'])\n"
    code, out, _ = run(capsys, "validate", dfile, pfile, write(tmp_path, "bad.txt", swapped))
    assert code == 1 and out.startswith("INVALID at step 0")
    assert run(capsys, "validate", dfile, pfile, write(tmp_path, "junk.txt", "((("))[0] == 3


def test_plan_satisfied_goal(capsys, tmp_path):
    dfile = str(tmp_path / "kitchen.pddl")
    assert run(capsys, "domain", "--dump", "-o", dfile)[0] == 0
    code, out, _ = run(capsys, "plan", dfile, write(tmp_path, "p.pddl", SATISFIED))
    assert (code, out) == (0, "\n")
    code, out, _ = run(capsys, "plan", dfile, write(tmp_path, "p.pddl", SATISFIED), "--json")
    assert (code, out) == (0, "[]\n")
    assert run(capsys, "plan", dfile, write(tmp_path, "q.pddl", STUCK))[0] == 2


def test_plan_bad_pddl(capsys, tmp_path):
    dfile = write(tmp_path, "d.pddl", domain_text())
    code, _, err = run(capsys, "plan", dfile, write(tmp_path, "p.pddl", "(define (problem"))
    assert code == 3 and "p.pddl" in err


def test_domain_stdout(capsys):
    code, out, _ = run(capsys, "domain")
    assert code == 0 and out == domain_text()


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", S2)
    assert code == 0
    rows = out.splitlines()
    assert "onion perishable ontology" in rows
    assert "cooking_knife utensil local" in rows
    code, out, _ = run(capsys, "classify", S2, "--json")
    assert {"name": "onion", "type": "perishable", "source": "ontology"} in json.loads(out)


def test_ontology_show(capsys):
    code, out, _ = run(capsys, "ontology")
    assert code == 0 and out.startswith("source: cache ")
    code, out, _ = run(capsys, "ontology", "show", "--json")
    assert "onion" in json.loads(out)["perishables"]


def test_env_cache_honored(capsys, tmp_path, monkeypatch):
    cache = tmp_path / "mine.json"
    ontology.write_cache(ontology.from_labels([], []), cache)
    monkeypatch.setenv("ABORTD_CACHE", str(cache))
    code, out, _ = run(capsys, "classify", S2)
    assert code == 0
    assert "onion nonperishable default" in out.splitlines()


def test_env_endpoint_falls_back(monkeypatch):
    monkeypatch.setenv("ABORTD_SPARQL_ENDPOINT", "http://127.0.0.1:9/sparql")
    proc = subprocess.run([sys.executable, "-m", "abortd.cli", "classify", S2], capture_output=True, text=True)
    assert proc.returncode == 0 and "W101" in proc.stderr
    assert "onion perishable ontology" in proc.stdout.splitlines()


def test_console_script_matches_main(capsys):
    proc = subprocess.run([sys.executable, "-m", "abortd.cli", "abort", S2, "--json"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == run(capsys, "abort", S2, "--json")[1]
