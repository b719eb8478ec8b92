import json
from pathlib import Path

import pytest

from abortd import ontology
from abortd.kitchen import builtin_domain
from abortd.mapper import WorldSnapshot

ROOT = Path(__file__).resolve().parent.parent
SCENARIOS = ROOT / "scenarios"
FIXTURES = Path(__file__).resolve().parent / "fixtures"


@pytest.fixture(scope="session")
def kb():
    return ontology.read_cache(ontology.bundled_cache_path())


@pytest.fixture(scope="session")
def kitchen():
    return builtin_domain()


def scenario_doc(n: int) -> dict:
    return json.loads((SCENARIOS / f"scenario{n}.json").read_text())


def scenario(n: int) -> WorldSnapshot:
    return WorldSnapshot.from_json(scenario_doc(n))


@pytest.fixture(autouse=True)
def _isolated_cwd(tmp_path, monkeypatch):
    # a stray ./ontology_cache.json in the checkout must not leak into tests
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("ABORTD_SPARQL_ENDPOINT", raising=False)
    monkeypatch.delenv("ABORTD_CACHE", raising=False)
