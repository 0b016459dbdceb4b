"""Command-line harness: generate graphs, build spanners, verify and report.

Exit status is 0 when every asserted check passes, 1 on a check failure,
2 on a configuration or input error and 3 when a distributed program broke
its own contract.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import ConfigError, InputError, ProtocolError
from .generators import KINDS, generate
from .graph import Graph, format_edge_list, read_edge_list
from .protocol.construction import ExecutionTrace, build_spanner
from .schedule import EXPLORATORY, GUARANTEED, build_schedule
from .verifier import LEVELS, verify

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_PROTOCOL = 0, 1, 2, 3

log = logging.getLogger("nearspan")


def _parse_params(items: list[str]) -> dict[str, str]:
    params = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigError("generator", f"parameter must look like key=value, got {item!r}")
        params[key] = value
    return params


def _write(path: str | None, text: str) -> None:
    if path is None:
        return
    if path == "-":
        sys.stdout.write(text)
        return
    Path(path).write_text(text, encoding="utf-8")
    log.info("wrote %s", path)


def _load_graph(args) -> Graph:
    if getattr(args, "graph", None):
        return read_edge_list(args.graph)
    if getattr(args, "gen", None):
        return generate(args.gen, _parse_params(args.param), args.seed)
    raise ConfigError("graph source", "give --graph FILE or --gen KIND")


def _add_graph_source(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", help="edge-list file ('n m' header, one edge per line)")
    src.add_argument("--gen", choices=KINDS, help="generate the input instead of reading it")
    p.add_argument("--param", action="append", metavar="KEY=VALUE", help="generator parameter, repeatable")
    p.add_argument("--seed", type=int, default=0, help="generator seed (gnp only)")


def _add_schedule(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kappa", type=int, required=True)
    p.add_argument("--c", type=int, required=True, help="rho = 1/c")
    p.add_argument("--mode", choices=(GUARANTEED, EXPLORATORY), default=GUARANTEED)
    p.add_argument("--eps", required=True, help="exact fraction such as 1/2")


def _add_verify_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--level", choices=LEVELS, default="full")
    p.add_argument("--sources", type=int, default=None, help="sample this many stretch sources")


def _build(args, graph: Graph) -> ExecutionTrace:
    schedule = build_schedule(graph.n, args.kappa, args.c, args.mode, args.eps)
    for note in schedule.notes:
        log.warning("%s", note)
    try:
        _, trace = build_spanner(graph, schedule)
    except ProtocolError as exc:
        partial = getattr(exc, "partial_trace", None)
        if partial is not None:
            _write(args.trace, partial.dumps(verbose=args.full_trace))
        _write(args.spanner, f"# FAILED: {exc}\n")
        raise
    _write(args.spanner, format_edge_list(graph.n, trace.spanner))
    _write(args.trace, trace.dumps(verbose=args.full_trace))
    return trace


def cmd_generate(args) -> int:
    graph = generate(args.kind, _parse_params(args.param), args.seed)
    _write(args.out, format_edge_list(graph.n, graph.edges()))
    return EXIT_OK


def cmd_build(args) -> int:
    _build(args, _load_graph(args))
    return EXIT_OK


def _finish(report, out: str | None) -> int:
    _write(out, report.dumps())
    for line in report.failures():
        log.error("%s", line)
    return EXIT_OK if report.passed else EXIT_CHECK


def cmd_verify(args) -> int:
    graph = read_edge_list(args.graph)
    try:
        data = json.loads(Path(args.trace).read_text(encoding="utf-8"))
        trace = ExecutionTrace.from_json(data)
    except (OSError, ValueError, KeyError) as exc:
        raise InputError(f"{args.trace}: {exc}") from None
    if trace.status != "complete":
        raise InputError(f"{args.trace}: trace is marked {trace.status!r}")
    return _finish(verify(graph, trace, args.level, args.sources), args.report)


def cmd_run(args) -> int:
    graph = _load_graph(args)
    trace = _build(args, graph)
    return _finish(verify(graph, trace, args.level, args.sources), args.report)


def cmd_report(args) -> int:
    try:
        data = json.loads(Path(args.file).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise InputError(f"{args.file}: {exc}") from None
    out = sys.stdout
    if "checks" in data:
        out.write(f"verification level {data['level']}: {'PASS' if data['passed'] else 'FAIL'}\n")
        out.write(f"edges {data['edge_count']}, rounds {data['round_total']}\n")
        for c in data["checks"]:
            out.write(f"  [{'ok' if c['passed'] else 'FAIL'}] {c['name']} {c['detail']}\n")
        for b in data["bound_comparisons"]:
            kind = "assert" if b["asserted"] else "shape"
            out.write(f"  {kind:6} {b['quantity']}: {b['measured']} vs {b['bound']} (slack {b['slack_factor']})\n")
        s = data.get("max_stretch_observed")
        if s:
            out.write(
                f"  stretch: worst surplus {s['worst_additive_surplus']} at {s['worst_additive_pair']},"
                f" worst ratio {s['worst_multiplicative']} over {s['pairs_checked']} pairs\n"
            )
        return EXIT_OK if data["passed"] else EXIT_CHECK
    if "phases" in data:
        out.write(f"trace {data.get('status', 'complete')}: {data['spanner_edges']} edges, {data['rounds_total']} rounds\n")
        for p in data["phases"]:
            out.write(
                f"  phase {p['phase']}: |P|={p['clusters']} deg={p['deg']} delta={p['delta']}"
                f" |W|={p['popular']} |RS|={p['ruling_set']} |U|={p['unclustered']}"
                f" +{p['forest_edges']}/{p['interconnect_edges']} edges, {p['rounds_used']} rounds\n"
            )
        return EXIT_OK
    raise InputError(f"{args.file}: neither a trace nor a verification report")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nearspan", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a generated graph as an edge list")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_generate)

    for name, func, helptext in (
        ("build", cmd_build, "run the construction"),
        ("run", cmd_run, "build and verify"),
    ):
        p = sub.add_parser(name, help=helptext)
        _add_graph_source(p)
        _add_schedule(p)
        p.add_argument("--spanner", help="spanner edge-list output")
        p.add_argument("--trace", help="trace JSON output")
        p.add_argument("--full-trace", action="store_true", help="write every per-phase artifact")
        if name == "run":
            _add_verify_opts(p)
            p.add_argument("--report", default="-", help="verification report output")
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="verify a full trace against its input graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--trace", required=True)
    p.add_argument("--report", default="-")
    _add_verify_opts(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", help="summarise a trace or verification report")
    p.add_argument("file")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, InputError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except ProtocolError as exc:
        log.error("internal protocol error: %s", exc)
        return EXIT_PROTOCOL


if __name__ == "__main__":
    sys.exit(main())
