"""DBpedia lookups for perishable foods and utensils, with an offline cache.

Two SELECT queries are sent to a SPARQL endpoint; every ``?thing`` IRI in the
answer is reduced to a lower-case label (``dbr:Frying_pan`` -> "frying pan").
Results are cached as JSON so the mapper, the CLI and the tests work without
network access. A cache built from a hand-curated sample of endpoint answers
ships inside the package.
"""

from __future__ import annotations

import json
import logging
import os
import re
import tempfile
import urllib.error
import urllib.parse
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Union

log = logging.getLogger(__name__)

DEFAULT_ENDPOINT = "https://dbpedia.org/sparql"
DEFAULT_CACHE = "ontology_cache.json"
TIMEOUT_SECONDS = 10.0
RETRIES = 1

PREFIXES = (
    "PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>\n"
    "PREFIX dbo: <http://dbpedia.org/ontology/>\n"
    "PREFIX dcterms: <http://purl.org/dc/terms/>\n"
    "PREFIX dbc: <http://dbpedia.org/resource/Category:>\n"
)

PERISHABLES_BODY = """SELECT DISTINCT ?thing 
WHERE {
    {?thing rdf:type dbo:Food .
    ?thing dbo:ingredient ?ingredient .}
    UNION {?thing dcterms:subject dbc:Edible_fruits .}
    UNION {?thing dcterms:subject dbc:Fruit_vegetables .}
    UNION {?thing dcterms:subject dbc:Root_vegetables .}}"""

UTENSILS_BODY = """SELECT DISTINCT ?thing 
WHERE {
    {?thing dcterms:subject dbc:Cookware_and_bakeware .}
    UNION
    {?thing dcterms:subject dbc:Cooking_vessels .}}"""


@dataclass(frozen=True)
class QuerySpec:
    name: str
    text: str

    @property
    def where(self) -> str:
        return self.text[self.text.index("WHERE"):]


PERISHABLES_QUERY = QuerySpec("perishables", PREFIXES + PERISHABLES_BODY)
UTENSILS_QUERY = QuerySpec("utensils", PREFIXES + UTENSILS_BODY)


class OntologyError(Exception):
    pass


class Unavailable(OntologyError):
    """The endpoint could not be reached or answered with an HTTP error."""


class ParseError(OntologyError):
    def __init__(self, message: str, body: Union[str, bytes] = ""):
        if isinstance(body, bytes):
            body = body.decode("utf-8", "replace")
        self.excerpt = body[:200]
        super().__init__(f"{message}; body starts with: {self.excerpt!r}")


class OntologyUnavailable(OntologyError):
    """Neither the endpoint nor a cache file could provide the label sets."""


@dataclass(frozen=True)
class Provenance:
    kind: str  # "live" or "cache"
    source: str  # endpoint URL or cache file path
    timestamp: str


@dataclass(frozen=True)
class OntologySets:
    perishables: frozenset[str]
    utensils: frozenset[str]
    provenance: Provenance

    def to_json(self, endpoint: str = "") -> dict:
        return {
            "perishables": sorted(self.perishables),
            "utensils": sorted(self.utensils),
            "fetched_at": self.provenance.timestamp,
            "endpoint": endpoint or (self.provenance.source if self.provenance.kind == "live" else ""),
        }


_PAREN = re.compile(r"\s*\([^)]*\)")


def normalize_label(iri: str) -> str:
    """Last IRI segment, percent-decoded, disambiguator dropped, lower case."""
    segment = iri.rstrip("/").rsplit("/", 1)[-1]
    segment = segment.rsplit("#", 1)[-1]
    text = urllib.parse.unquote(segment).replace("_", " ")
    text = _PAREN.sub("", text)
    return " ".join(text.lower().split())


def labels_from_response(body: Union[str, bytes], var: str = "thing") -> set[str]:
    """Labels from a SPARQL JSON results document."""
    try:
        doc = json.loads(body)
        bindings = doc["results"]["bindings"]
        values = [b[var]["value"] for b in bindings if var in b]
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"malformed SPARQL JSON response ({exc.__class__.__name__})", body) from exc
    labels = {normalize_label(v) for v in values}
    labels.discard("")
    if not labels:
        log.info("SPARQL response had no bindings")
    return labels


def run_query(endpoint: str, query: QuerySpec, timeout: float = TIMEOUT_SECONDS) -> bytes:
    params = urllib.parse.urlencode({"query": query.text, "format": "application/sparql-results+json"})
    req = urllib.request.Request(
        f"{endpoint}?{params}", headers={"Accept": "application/sparql-results+json"}
    )
    last: Exception | None = None
    for _attempt in range(1 + RETRIES):
        try:
            with urllib.request.urlopen(req, timeout=timeout) as resp:
                return resp.read()
        except (urllib.error.URLError, TimeoutError, OSError) as exc:
            last = exc
    raise Unavailable(f"{endpoint}: {last}")


def fetch_perishables(endpoint: str = DEFAULT_ENDPOINT, timeout: float = TIMEOUT_SECONDS) -> set[str]:
    return labels_from_response(run_query(endpoint, PERISHABLES_QUERY, timeout))


def fetch_utensils(endpoint: str = DEFAULT_ENDPOINT, timeout: float = TIMEOUT_SECONDS) -> set[str]:
    return labels_from_response(run_query(endpoint, UTENSILS_QUERY, timeout))


# -- cache ------------------------------------------------------------------------


def bundled_cache_path() -> Path:
    return Path(str(resources.files("abortd.data").joinpath("ontology_cache.json")))


def write_cache(sets: OntologySets, path: Union[str, Path], endpoint: str = "") -> None:
    """Atomic write: temp file in the target directory, then rename."""
    path = Path(path)
    payload = sets.to_json(endpoint)
    fd, tmp = tempfile.mkstemp(prefix=".ontology-", suffix=".json", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_cache(path: Union[str, Path]) -> OntologySets:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
        perishables = frozenset(doc["perishables"])
        utensils = frozenset(doc["utensils"])
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise OntologyUnavailable(f"cannot read ontology cache {path}: {exc}") from exc
    return OntologySets(perishables, utensils, Provenance("cache", str(path), doc.get("fetched_at", "")))


def from_labels(perishables: Iterable[str], utensils: Iterable[str], source: str = "memory") -> OntologySets:
    return OntologySets(frozenset(perishables), frozenset(utensils), Provenance("cache", source, ""))


def load(endpoint: Optional[str] = None, cache_path: Union[str, Path, None] = None) -> OntologySets:
    """Label sets from the endpoint when given, else (or on failure) from a cache.

    Without an explicit ``cache_path`` the cache is ``./ontology_cache.json``
    when present, otherwise the copy bundled with the package. A live
    success rewrites the cache file.
    """
    explicit = cache_path is not None
    path = Path(cache_path) if explicit else Path(DEFAULT_CACHE)
    if endpoint:
        try:
            with ThreadPoolExecutor(max_workers=2) as pool:
                f_p = pool.submit(fetch_perishables, endpoint)
                f_u = pool.submit(fetch_utensils, endpoint)
                perishables, utensils = f_p.result(), f_u.result()
        except (Unavailable, ParseError) as exc:
            log.warning("W101: ontology endpoint unusable (%s); falling back to cache", exc)
        else:
            stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
            sets = OntologySets(frozenset(perishables), frozenset(utensils), Provenance("live", endpoint, stamp))
            try:
                write_cache(sets, path, endpoint)
            except OSError as exc:
                log.warning("W102: could not write ontology cache %s: %s", path, exc)
            return sets
    if path.exists():
        return read_cache(path)
    if not explicit:
        return read_cache(bundled_cache_path())
    hint = "pass --endpoint to fetch live data (which rewrites the cache) or point --cache at an existing file"
    raise OntologyUnavailable(f"no ontology data: cache {path} does not exist; {hint}")
