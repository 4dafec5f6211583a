"""Command line driver.

Positional arguments that name existing files are loaded as .tgr documents;
the remaining positionals name items inside them.  Exit codes: 0 for
success or a true/converged verdict, 1 for false/diverged, 2 for
inconclusive, 64 for usage errors, 65 for parse or validation errors.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import converge as cv
from . import metric, order
from .core import NoSuchNode, TermGraphError, canonicalize, iso, bisimilar, unravel_to_depth
from .dot import export_dot
from .order import glb_set, leq_bot, local_truncate
from .report import reports_json_text, reports_text, write_figures
from .rewrite import LEFTMOST_OUTERMOST, Trace, run
from .tgr import Document, format_graph, parse_files

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64
EXIT_DATA = 65


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="tgrew", description="Term graph rewriting and convergence analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    def cmd(name, names_help, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("args", nargs="+", help=f".tgr files, then {names_help}")
        return p

    cmd("canon", "a graph name")
    cmd("iso", "two graph names")
    cmd("bisim", "two graph names")
    cmd("dist", "two graph names")
    cmd("leq", "two graph names")
    cmd("glb", "two or more graph names")
    p = cmd("truncate", "a graph name")
    p.add_argument("-d", "--depth", type=int, required=True)
    p = cmd("local-truncate", "a graph name")
    p.add_argument("-n", "--node", required=True)
    p = cmd("unravel", "a graph name")
    p.add_argument("-d", "--depth", type=int, required=True)
    p = cmd("reduce", "a system name (optional if unique) and a graph name")
    p.add_argument("--strategy", default="lo")
    p.add_argument("--max-steps", type=int, default=1000)
    p.add_argument("--trace", metavar="OUT.tgr")
    p = cmd("converge", "a system name (optional if unique) and a graph name")
    p.add_argument("--mode", required=True, choices=["weak-m", "weak-p", "strong-m", "strong-p", "all"])
    p.add_argument("-d", "--depth", type=int, default=order.DEFAULT_DEPTH)
    p.add_argument("-w", "--window", type=int, default=order.DEFAULT_WINDOW)
    p.add_argument("--strategy", default="lo")
    p.add_argument("--max-steps", type=int, default=1000)
    p.add_argument("--json", action="store_true")
    p.add_argument("--figures", metavar="DIR")
    cmd("export-dot", "a graph name")
    return parser


def _split_args(args: list[str]) -> tuple[list[str], list[str]]:
    files = []
    names = []
    for a in args:
        if os.path.isfile(a):
            files.append(a)
        else:
            names.append(a)
    if not files:
        raise _Usage("no .tgr input files given")
    return files, names


def _graph(doc: Document, name: str):
    if name not in doc.graphs:
        raise _Usage(f"no termgraph named {name!r}")
    return doc.graphs[name]


def _need(names: list[str], count: int, what: str) -> list[str]:
    if len(names) != count:
        raise _Usage(f"expected {what}, got {len(names)} name(s)")
    return names


def _system_and_graph(doc: Document, names: list[str]):
    if len(names) == 2:
        system_name, graph_name = names
        if system_name not in doc.systems:
            raise _Usage(f"no grs named {system_name!r}")
        return doc.systems[system_name], _graph(doc, graph_name)
    if len(names) == 1:
        if len(doc.systems) != 1:
            raise _Usage("graph name given but the documents define no unique grs")
        (system,) = doc.systems.values()
        return system, _graph(doc, names[0])
    raise _Usage("expected a system name (optional if unique) and a graph name")


def _strategy(doc: Document, option: str):
    if option in ("lo", LEFTMOST_OUTERMOST):
        return LEFTMOST_OUTERMOST
    if option.startswith("script:"):
        name = option.split(":", 1)[1]
        if name not in doc.scripts:
            raise _Usage(f"no script named {name!r}")
        return doc.scripts[name]
    raise _Usage(f"unknown strategy {option!r} (use 'lo' or 'script:NAME')")


def _write_trace(trace: Trace, path: str) -> None:
    parts = ["# reduction trace", format_graph(trace.initial, "g0")]
    for i, step in enumerate(trace.steps):
        parts.append(
            f"# step {i}: rule {step.rule} at node n{step.redex_node} depth {step.redex_depth}"
        )
        parts.append(format_graph(step.target, f"g{i + 1}"))
    parts.append(f"# termination: {trace.termination}")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(parts) + "\n")


def commands(argv: list[str]) -> int:
    """Run one subcommand; prints to stdout/stderr and returns the exit code."""
    try:
        ns = _build_parser().parse_args(argv)
        files, names = _split_args(ns.args)
        doc = parse_files(files)
        cmd = ns.command

        if cmd == "canon":
            (name,) = _need(names, 1, "one graph name")
            print(format_graph(canonicalize(_graph(doc, name)), name))
            return EXIT_OK
        if cmd in ("iso", "bisim", "leq"):
            a, b = _need(names, 2, "two graph names")
            op = {"iso": iso, "bisim": bisimilar, "leq": leq_bot}[cmd]
            verdict = op(_graph(doc, a), _graph(doc, b))
            print("true" if verdict else "false")
            return EXIT_OK if verdict else EXIT_FALSE
        if cmd == "dist":
            a, b = _need(names, 2, "two graph names")
            print(str(metric.dist(_graph(doc, a), _graph(doc, b))))
            return EXIT_OK
        if cmd == "glb":
            if len(names) < 2:
                raise _Usage("expected two or more graph names")
            print(format_graph(glb_set([_graph(doc, n) for n in names]), "glb"))
            return EXIT_OK
        if cmd == "truncate":
            (name,) = _need(names, 1, "one graph name")
            print(format_graph(canonicalize(metric.truncate(_graph(doc, name), ns.depth)), name))
            return EXIT_OK
        if cmd == "local-truncate":
            (name,) = _need(names, 1, "one graph name")
            g = _graph(doc, name)
            if ns.node not in g:
                raise NoSuchNode(ns.node)
            print(format_graph(canonicalize(local_truncate(g, ns.node)), name))
            return EXIT_OK
        if cmd == "unravel":
            (name,) = _need(names, 1, "one graph name")
            print(format_graph(unravel_to_depth(_graph(doc, name), ns.depth), name))
            return EXIT_OK
        if cmd == "export-dot":
            (name,) = _need(names, 1, "one graph name")
            print(export_dot(_graph(doc, name), name), end="")
            return EXIT_OK
        if cmd == "reduce":
            system, g = _system_and_graph(doc, names)
            trace = run(g, system, _strategy(doc, ns.strategy), ns.max_steps)
            print(f"steps: {len(trace.steps)}")
            print(f"termination: {trace.termination}")
            print(f"final: {format_graph(trace.graphs()[-1], 'final')}")
            if ns.trace:
                _write_trace(trace, ns.trace)
            return EXIT_OK
        if cmd == "converge":
            system, g = _system_and_graph(doc, names)
            trace = run(g, system, _strategy(doc, ns.strategy), ns.max_steps)
            if ns.mode == "all":
                reports = cv.analyze_all(trace, ns.depth, ns.window)
            else:
                analyzer = {
                    "weak-m": cv.analyze_weak_m,
                    "weak-p": cv.analyze_weak_p,
                    "strong-m": cv.analyze_strong_m,
                    "strong-p": cv.analyze_strong_p,
                }[ns.mode]
                reports = {ns.mode: analyzer(trace, ns.depth, ns.window)}
            print(reports_json_text(reports) if ns.json else reports_text(reports))
            if ns.figures:
                write_figures(trace, ns.figures)
            verdicts = [r.verdict for r in reports.values()]
            if any(v == cv.INCONCLUSIVE for v in verdicts):
                return EXIT_INCONCLUSIVE
            if any(v == cv.DIVERGED for v in verdicts):
                return EXIT_FALSE
            return EXIT_OK
        raise _Usage(f"unknown command {cmd!r}")
    except _Usage as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TermGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(commands(sys.argv[1:]))
