"""Command line front-end.

Exit codes:

    0  plan found (or plan VALID, or command succeeded)
    1  plan INVALID (validate)
    2  problem unsolvable
    3  input or environment error: unreadable file, bad PDDL or snapshot,
       no ontology data, bad usage
    4  search limit exceeded
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, ontology
from .grounding import dump
from .kitchen import domain_text
from .mapper import SnapshotError, WorldSnapshot, classify_table, map_world
from .pddl import PDDLError, ValidationError, print_problem
from .pipeline import Limits, abort, load_task, objects_of, parse_plan_text, plan_json
from .search import DEFAULT_MAX_EXPANSIONS, DEFAULT_MAX_SECONDS, LimitExceeded, Plan, Unsolvable, gbfs, validate_plan

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_UNSOLVABLE = 2
EXIT_ENV = 3
EXIT_LIMIT = 4

ENV_ENDPOINT = "ABORTD_SPARQL_ENDPOINT"
ENV_CACHE = "ABORTD_CACHE"


class _Parser(argparse.ArgumentParser):
    # usage errors share the input-error code so that 2 keeps meaning "unsolvable"
    def error(self, message: str):  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_ENV, f"{self.prog}: error: {message}\n")


class _Fail(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Fail(f"cannot read {path}: {exc.strerror or exc}", EXIT_ENV) from exc


def _limits(args) -> Limits:
    return Limits(args.max_expansions, args.max_seconds)


def _kb(args) -> ontology.OntologySets:
    endpoint = args.endpoint or os.environ.get(ENV_ENDPOINT) or None
    cache = args.cache or os.environ.get(ENV_CACHE) or None
    return ontology.load(endpoint, cache)


def _snapshot(path: str) -> WorldSnapshot:
    text = _read(path)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _Fail(f"{path}: not valid JSON: {exc}", EXIT_ENV) from exc
    return WorldSnapshot.from_json(doc)


def _emit_plan(plan: Plan, as_json: bool, empty_note: bool = True) -> None:
    if as_json:
        print(plan_json(plan))
    elif len(plan) == 0 and empty_note:
        print("world already safe")
    else:
        print(plan.paper_style())


def _stats_line(stats) -> None:
    print(
        f"abortd: expansions={stats.expansions} generated={stats.generated} seconds={stats.seconds:.3f}",
        file=sys.stderr,
    )


# -- subcommands ------------------------------------------------------------------


def cmd_abort(args) -> int:
    snapshot = _snapshot(args.snapshot)
    kb = _kb(args)
    result = abort(snapshot, kb, _limits(args))
    if args.dump_ground:
        Path(args.dump_ground).write_text(dump(result.task), encoding="utf-8")
    _emit_plan(result.rendered, args.json)
    _stats_line(result.stats)
    return EXIT_OK


def cmd_plan(args) -> int:
    domain, problem, task = load_task(_read(args.domain), _read(args.problem), args.domain, args.problem)
    if args.dump_ground:
        Path(args.dump_ground).write_text(dump(task), encoding="utf-8")
    limits = _limits(args)
    result = gbfs(task, limits.max_expansions, limits.max_seconds)
    _emit_plan(result.plan, args.json, empty_note=False)
    _stats_line(result.stats)
    return EXIT_OK


def cmd_validate(args) -> int:
    _, problem, task = load_task(_read(args.domain), _read(args.problem), args.domain, args.problem)
    try:
        plan = parse_plan_text(_read(args.planfile), objects_of(problem))
    except (ValueError, SyntaxError, KeyError, TypeError) as exc:
        raise _Fail(f"{args.planfile}: cannot parse plan: {exc}", EXIT_ENV) from exc
    verdict = validate_plan(task, plan)
    print(verdict)
    return EXIT_OK if verdict else EXIT_INVALID


def cmd_classify(args) -> int:
    rows = classify_table(_snapshot(args.snapshot), _kb(args))
    if args.json:
        print(json.dumps([{"name": n, "type": t, "source": s} for n, t, s in rows]))
    else:
        for name, typ, source in rows:
            print(f"{name} {typ} {source}")
    return EXIT_OK


def cmd_domain(args) -> int:
    text = domain_text()
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_map(args) -> int:
    mapped = map_world(_snapshot(args.snapshot), _kb(args))
    text = print_problem(mapped.problem)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_ontology(args) -> int:
    if args.action == "refresh":
        endpoint = args.endpoint or os.environ.get(ENV_ENDPOINT) or ontology.DEFAULT_ENDPOINT
        cache = args.cache or os.environ.get(ENV_CACHE) or ontology.DEFAULT_CACHE
        with ThreadPoolExecutor(max_workers=2) as pool:
            f_p = pool.submit(ontology.fetch_perishables, endpoint)
            f_u = pool.submit(ontology.fetch_utensils, endpoint)
            perishables, utensils = f_p.result(), f_u.result()
        stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        sets = ontology.OntologySets(
            frozenset(perishables), frozenset(utensils), ontology.Provenance("live", endpoint, stamp)
        )
        ontology.write_cache(sets, cache, endpoint)
        print(f"wrote {cache}: {len(perishables)} perishables, {len(utensils)} utensils")
        return EXIT_OK
    kb = _kb(args)
    if args.json:
        print(json.dumps(kb.to_json(), indent=2))
    else:
        p = kb.provenance
        print(f"source: {p.kind} {p.source}")
        print(f"fetched_at: {p.timestamp or '-'}")
        print(f"perishables: {len(kb.perishables)}")
        print(f"utensils: {len(kb.utensils)}")
    return EXIT_OK


def cmd_serve(args) -> int:
    from .service import serve

    serve(args.bind, _kb(args), _limits(args))
    return EXIT_OK


# -- argument parsing -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="abortd", description="Plan a robot back to a safe kitchen state.")
    parser.add_argument("--version", action="version", version=f"abortd {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log debug output to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def kb_flags(p):
        p.add_argument("--endpoint", help=f"SPARQL endpoint for live lookup (env {ENV_ENDPOINT})")
        p.add_argument("--cache", help=f"ontology cache file (env {ENV_CACHE})")

    def limit_flags(p):
        p.add_argument("--max-expansions", type=int, default=DEFAULT_MAX_EXPANSIONS)
        p.add_argument("--max-seconds", type=float, default=DEFAULT_MAX_SECONDS)

    p = sub.add_parser("abort", help="plan from a world snapshot to a safe state")
    p.add_argument("snapshot")
    p.add_argument("--json", action="store_true", help="print the plan as JSON")
    p.add_argument("--dump-ground", metavar="FILE", help="write the ground task listing")
    kb_flags(p)
    limit_flags(p)
    p.set_defaults(func=cmd_abort)

    p = sub.add_parser("plan", help="plan for a PDDL domain and problem")
    p.add_argument("domain")
    p.add_argument("problem")
    p.add_argument("--json", action="store_true")
    p.add_argument("--dump-ground", metavar="FILE")
    limit_flags(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("validate", help="check a plan against a PDDL domain and problem")
    p.add_argument("domain")
    p.add_argument("problem")
    p.add_argument("planfile")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("classify", help="show the PDDL type chosen for every snapshot object")
    p.add_argument("snapshot")
    p.add_argument("--json", action="store_true")
    kb_flags(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("domain", help="export the embedded kitchen domain")
    p.add_argument("--dump", action="store_true", help="print the domain (default)")
    p.add_argument("-o", "--output", help="write to a file instead of stdout")
    p.set_defaults(func=cmd_domain)

    p = sub.add_parser("map", help="print the PDDL problem built from a snapshot")
    p.add_argument("snapshot")
    p.add_argument("-o", "--output")
    kb_flags(p)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("ontology", help="inspect or refresh the ontology cache")
    p.add_argument("action", choices=["show", "refresh"], nargs="?", default="show")
    p.add_argument("--json", action="store_true")
    kb_flags(p)
    p.set_defaults(func=cmd_ontology)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--bind", default="127.0.0.1:8080", help="HOST:PORT (default %(default)s)")
    kb_flags(p)
    limit_flags(p)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="abortd: %(message)s",
        stream=sys.stderr,
    )
    if getattr(args, "max_expansions", 1) <= 0 or getattr(args, "max_seconds", 1) <= 0:
        parser.error("search limits must be positive")
    try:
        return args.func(args)
    except _Fail as exc:
        print(f"abortd: error: {exc}", file=sys.stderr)
        return exc.code
    except Unsolvable as exc:
        print(f"abortd: unsolvable: {exc} (expansions={exc.stats.expansions})", file=sys.stderr)
        return EXIT_UNSOLVABLE
    except LimitExceeded as exc:
        print(f"abortd: limit exceeded: {exc} (expansions={exc.stats.expansions})", file=sys.stderr)
        return EXIT_LIMIT
    except ValidationError as exc:
        for d in exc.diagnostics:
            print(f"abortd: {d}", file=sys.stderr)
        return EXIT_ENV
    except (PDDLError, SnapshotError) as exc:
        print(f"abortd: error: {exc}", file=sys.stderr)
        return EXIT_ENV
    except ontology.OntologyError as exc:
        print(f"abortd: ontology: {exc}", file=sys.stderr)
        return EXIT_ENV
    except (OSError, ValueError) as exc:
        print(f"abortd: error: {exc}", file=sys.stderr)
        return EXIT_ENV


if __name__ == "__main__":
    sys.exit(main())
