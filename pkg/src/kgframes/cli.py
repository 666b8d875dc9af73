"""Command-line front end.

Commands: ``compile`` prints the generated SPARQL, ``run`` executes it
against an endpoint, ``verify`` checks both local evaluation routes
agree on supplied graph files, ``bench`` compares naive and optimized
generation, and ``explore`` tabulates class frequencies.

Exit codes: 0 success, 1 usage or validation error, 2 endpoint error,
3 timeout, 4 verification failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from typing import Dict, List, Optional

from .algebra import eval_model
from .emitter import emit
from .executor import (
    EndpointConfig,
    EndpointError,
    EndpointTimeout,
    ExecutorError,
    execute,
    to_csv,
    to_json,
    to_tsv,
)
from .frames import KnowledgeGraph
from .generator import generate, naive_generate, subquery_count
from .program import FrameProgram, ProgramError, load_program
from .relational import eval_frame
from .store import GraphStore
from .tables import ResultTable, bag_equal, first_difference
from .terms import Iri, numeric_value

ENDPOINT_ENV = "KGFRAMES_ENDPOINT"

_FORMATS = {"csv": to_csv, "tsv": to_tsv, "json": to_json}


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; remap to 1 so endpoint
    errors keep their own code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kgframes", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True)

    compile_cmd = commands.add_parser("compile", help="print the generated SPARQL")
    compile_cmd.add_argument("program", help="frame program file")
    compile_cmd.add_argument(
        "--naive", action="store_true", help="one subquery per operator"
    )
    compile_cmd.set_defaults(handler=cmd_compile)

    run_cmd = commands.add_parser("run", help="execute against an endpoint")
    run_cmd.add_argument("program")
    run_cmd.add_argument("--endpoint", default=None, help=f"default ${ENDPOINT_ENV}")
    run_cmd.add_argument("--format", choices=sorted(_FORMATS), default="csv")
    run_cmd.add_argument("--page-size", type=int, default=10000)
    run_cmd.set_defaults(handler=cmd_run)

    verify_cmd = commands.add_parser(
        "verify", help="check both local evaluation routes agree"
    )
    verify_cmd.add_argument("program")
    verify_cmd.add_argument(
        "--graph",
        action="append",
        default=[],
        metavar="[NAME=]FILE",
        help="N-Triples file for a declared graph",
    )
    verify_cmd.set_defaults(handler=cmd_verify)

    bench_cmd = commands.add_parser(
        "bench", help="compare naive and optimized generation"
    )
    bench_cmd.add_argument("program")
    bench_cmd.add_argument("--endpoint", default=None)
    bench_cmd.add_argument(
        "--local", action="append", default=[], metavar="[NAME=]FILE"
    )
    bench_cmd.add_argument("--repeat", type=int, default=3)
    bench_cmd.set_defaults(handler=cmd_bench)

    explore_cmd = commands.add_parser("explore", help="class frequency table")
    explore_cmd.add_argument("--endpoint", default=None)
    explore_cmd.add_argument("--local", default=None, metavar="FILE")
    explore_cmd.add_argument(
        "--graph-uri", default=None, help="graph to read (endpoint mode)"
    )
    explore_cmd.set_defaults(handler=cmd_explore)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ProgramError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except EndpointTimeout as exc:
        print(f"timeout: {exc}", file=sys.stderr)
        return 3
    except (EndpointError, ExecutorError) as exc:
        print(f"endpoint error: {exc}", file=sys.stderr)
        return 2
    except NotImplementedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def cmd_compile(args) -> int:
    program = load_program(args.program)
    model = naive_generate(program.result) if args.naive else generate(program.result)
    sys.stdout.write(emit(model))
    return 0


def _endpoint_config(args, page_size: Optional[int] = None) -> EndpointConfig:
    url = args.endpoint or os.environ.get(ENDPOINT_ENV)
    if not url:
        raise ProgramError(f"no endpoint given and ${ENDPOINT_ENV} is not set")
    if page_size is not None:
        return EndpointConfig(url, page_size=page_size)
    return EndpointConfig(url)


def cmd_run(args) -> int:
    program = load_program(args.program)
    query = emit(generate(program.result))
    config = _endpoint_config(args, page_size=args.page_size)
    table = execute(query, config)
    sys.stdout.write(_FORMATS[args.format](table))
    print(f"{len(table.rows)} rows", file=sys.stderr)
    return 0


def _load_stores(program: FrameProgram, specs: List[str]) -> Dict[str, GraphStore]:
    """Map declared graph URIs to stores loaded from [NAME=]FILE specs."""
    names = list(program.graphs)
    by_name: Dict[str, str] = {}
    positional: List[str] = []
    for spec in specs:
        if "=" in spec:
            name, _, path = spec.partition("=")
            if name not in program.graphs:
                raise ProgramError(f"graph {name!r} is not declared in the program")
            by_name[name] = path
        else:
            positional.append(spec)
    for name in names:
        if name not in by_name and positional:
            by_name[name] = positional.pop(0)
    missing = [name for name in names if name not in by_name]
    if missing:
        raise ProgramError(f"no graph file for: {', '.join(missing)}")
    stores: Dict[str, GraphStore] = {}
    for name, path in by_name.items():
        uri = program.graphs[name]
        try:
            with open(path, "r", encoding="utf-8") as handle:
                stores[uri.text] = GraphStore.from_ntriples(uri, handle.read())
        except FileNotFoundError:
            raise ProgramError(f"graph file not found: {path}")
    return stores


def cmd_verify(args) -> int:
    program = load_program(args.program)
    stores = _load_stores(program, args.graph)
    frame = program.result
    reference = eval_frame(frame, stores)
    optimized = eval_model(generate(frame), stores)
    naive = eval_model(naive_generate(frame), stores)
    witness = first_difference(reference, optimized)
    if witness is not None:
        print("FAIL: optimized query disagrees with direct evaluation")
        print(f"  {witness}")
        return 4
    if not bag_equal(optimized, naive):
        witness = first_difference(optimized, naive)
        print("FAIL: naive and optimized queries disagree")
        print(f"  {witness}")
        return 4
    print(f"PASS: {len(reference.rows)} rows, both routes and both variants agree")
    return 0


def cmd_bench(args) -> int:
    program = load_program(args.program)
    if args.repeat < 1:
        raise ProgramError("--repeat must be at least 1")
    if bool(args.endpoint or os.environ.get(ENDPOINT_ENV)) == bool(args.local):
        raise ProgramError("bench needs exactly one of --endpoint or --local")
    stores = _load_stores(program, args.local) if args.local else None
    variants = [
        ("naive", naive_generate(program.result)),
        ("optimized", generate(program.result)),
    ]
    means: Dict[str, float] = {}
    print(f"{'variant':<10} {'subqueries':>10} {'bytes':>8} {'mean_seconds':>14}")
    for name, model in variants:
        query = emit(model)
        elapsed = []
        for _ in range(args.repeat):
            start = time.perf_counter()
            if stores is not None:
                eval_model(model, stores)
            else:
                execute(query, _endpoint_config(args))
            elapsed.append(time.perf_counter() - start)
        means[name] = sum(elapsed) / len(elapsed)
        print(
            f"{name:<10} {subquery_count(model):>10} "
            f"{len(query.encode('utf-8')):>8} {means[name]:>14.6f}"
        )
    if means["optimized"] > 0:
        print(f"ratio naive/optimized: {means['naive'] / means['optimized']:.2f}")
    return 0


def cmd_explore(args) -> int:
    if bool(args.endpoint or os.environ.get(ENDPOINT_ENV)) == bool(args.local):
        raise ProgramError("explore needs exactly one of --endpoint or --local")
    if args.local:
        uri = Iri(f"file:{args.local}")
        with open(args.local, "r", encoding="utf-8") as handle:
            store = GraphStore.from_ntriples(uri, handle.read())
        frame = KnowledgeGraph(uri.text).explore_classes()
        table = eval_model(generate(frame), {uri.text: store})
    else:
        graph_uri = args.graph_uri or "urn:default"
        frame = KnowledgeGraph(graph_uri).explore_classes()
        query = emit(generate(frame))
        if args.graph_uri is None:
            # No graph named: let the endpoint use its default graph.
            query = "\n".join(
                line for line in query.splitlines() if not line.startswith("FROM ")
            ) + "\n"
        table = execute(query, _endpoint_config(args))
    order = table.columns.index("frequency")
    rows = sorted(
        table.rows, key=lambda row: -(numeric_value(row[order]) or 0.0)
    )
    sys.stdout.write(to_tsv(ResultTable(table.columns, rows)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
