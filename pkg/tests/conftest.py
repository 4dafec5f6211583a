"""Shared builders: worked example systems, random graphs, oracles."""

from __future__ import annotations

import random
import re

import pytest


def pytest_runtest_logreport(report):
    """One visible pass/fail line per acceptance criterion."""
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    m = re.search(r"criterion_(\d+)", report.nodeid)
    if m is None:
        return
    status = "PASS" if report.passed else "FAIL"
    print(f"\n[acceptance criterion {int(m.group(1)):02d}] {status}", flush=True)

from tgrew.core import (
    BOT,
    CanonicalTermGraph,
    Signature,
    TermGraph,
    canonicalize,
    reachable,
    validate,
)
from tgrew.order import local_truncate
from tgrew.rewrite import Grs, Rule, Script, validate_rule
from tgrew.terms import BOTTOM, Term, term, term_truncate


def tg(table: dict, root: str, sig: Signature) -> TermGraph:
    """Build and validate a graph; bare strings are nullary shorthands."""
    clean = {}
    for node, entry in table.items():
        if isinstance(entry, str):
            clean[node] = (entry, ())
        else:
            symbol, successors = entry
            clean[node] = (symbol, tuple(successors))
    return validate(clean, root, sig)


def ctg(table: dict, root: str, sig: Signature) -> CanonicalTermGraph:
    return canonicalize(tg(table, root, sig))


# --- sharing example: the two presentations of f(c,c) ---------------------

SIG_FC = Signature({"f": 2, "c": 0, "a": 0, "b": 0})


@pytest.fixture
def sig_fc() -> Signature:
    return SIG_FC


@pytest.fixture
def unshared_fcc() -> CanonicalTermGraph:
    return ctg({"n0": ("f", ["n1", "n2"]), "n1": "c", "n2": "c"}, "n0", SIG_FC)


@pytest.fixture
def shared_fcc() -> CanonicalTermGraph:
    return ctg({"n0": ("f", ["n1", "n1"]), "n1": "c"}, "n0", SIG_FC)


def weird_rules() -> tuple[Grs, Script]:
    """Two rules with the same unshared lhs whose right-hand sides differ
    only in sharing; alternating them flips between the two presentations."""
    lhs = {"l0": ("f", ["c1", "c2"]), "c1": ("c", []), "c2": ("c", [])}
    merge = validate_rule(
        {**lhs, "r0": ("f", ["c3", "c3"]), "c3": ("c", [])}, "l0", "r0", "merge", SIG_FC
    )
    split = validate_rule(
        {**lhs, "r0": ("f", ["c3", "c4"]), "c3": ("c", []), "c4": ("c", [])}, "l0", "r0", "split", SIG_FC
    )
    grs = Grs(SIG_FC, (merge, split))
    alternate = Script(tuple(("merge" if i % 2 == 0 else "split", ()) for i in range(20)))
    return grs, alternate


@pytest.fixture
def weird() -> tuple[Grs, Script]:
    return weird_rules()


# --- fixed point combinator rules ------------------------------------------

SIG_Y = Signature({"app": 2, "Y": 0, "fun": 0})


def fixpoint_rules() -> tuple[Rule, Rule]:
    """Two rules that unravel to app(Y,$x) -> app($x, app(Y,$x)).

    ``unfold`` copies the application; ``knot`` points the copy back at the
    redex root, so one step ties a cycle.
    """
    lhs = {"l": ("app", ["y", "x"]), "y": ("Y", []), "x": ("$x", [])}
    unfold = validate_rule(
        {**lhs, "r": ("app", ["x", "a"]), "a": ("app", ["y2", "x"]), "y2": ("Y", [])},
        "l", "r", "unfold", SIG_Y,
    )
    knot = validate_rule({**lhs, "r": ("app", ["x", "l"])}, "l", "r", "knot", SIG_Y)
    return unfold, knot


@pytest.fixture
def fixpoint() -> tuple[Rule, Rule]:
    return fixpoint_rules()


def y_start() -> CanonicalTermGraph:
    return ctg({"n0": ("app", ["n1", "n2"]), "n1": "Y", "n2": "fun"}, "n0", SIG_Y)


@pytest.fixture
def y_app() -> CanonicalTermGraph:
    return y_start()


def y_unfolding_cut(d: int) -> CanonicalTermGraph:
    """Depth-d approximant of the infinite unfolding app(fun, app(fun, ...))
    with a single shared fun node, built directly."""
    assert d >= 1
    table: dict = {"f": ("fun", ()), "end": (BOT, ())}
    for i in range(d):
        nxt = "end" if i == d - 1 else f"a{i + 1}"
        table[f"a{i}"] = ("app", ("f", nxt))
    return ctg(table, "a0", SIG_Y)


# --- the number stream ------------------------------------------------------

SIG_FROM = Signature({"from": 1, "cons": 2, "s": 1, "zero": 0})


def from_rule() -> Rule:
    return validate_rule(
        {
            "l": ("from", ["x"]),
            "x": ("$x", []),
            "r": ("cons", ["x", "f2"]),
            "f2": ("from", ["s2"]),
            "s2": ("s", ["x"]),
        },
        "l", "r", "from_step", SIG_FROM,
    )


def from_start() -> CanonicalTermGraph:
    return ctg({"n": ("from", ["z"]), "z": "zero"}, "n", SIG_FROM)


def tower(k: int) -> Term:
    t = term("zero")
    for _ in range(k):
        t = term("s", t)
    return t


def nat_stream_cut(d: int) -> Term:
    """Depth-d cut of the infinite list zero :: s(zero) :: s(s(zero)) :: ...

    Built spine-first from the closed form of the n-th element, so it is
    independent of any rewriting machinery.
    """
    spine = BOTTOM
    for k in reversed(range(d + 1)):
        spine = term("cons", tower(k), spine)
    return term_truncate(spine, d)


# --- the single-symbol loop -------------------------------------------------

SIG_A = Signature({"a": 0})


def loop_system() -> tuple[Grs, CanonicalTermGraph]:
    rule = validate_rule({"l": ("a", []), "r": ("a", [])}, "l", "r", "loop", SIG_A)
    return Grs(SIG_A, (rule,)), ctg({"n": "a"}, "n", SIG_A)


# --- random graphs -----------------------------------------------------------

RANDOM_SYMBOLS = {"f": 2, "g": 1, "c": 0, "b": 0}
SIG_RANDOM = Signature(RANDOM_SYMBOLS)


def random_graph(
    rng: random.Random,
    max_nodes: int = 10,
    symbols: dict[str, int] | None = None,
    bot_prob: float = 0.0,
) -> CanonicalTermGraph:
    """A random valid graph: draw a node table, keep the reachable part."""
    symbols = dict(symbols or RANDOM_SYMBOLS)
    names = list(symbols)
    k = rng.randint(1, max_nodes)
    lab = {}
    suc = {}
    for i in range(k):
        if bot_prob and rng.random() < bot_prob:
            lab[i] = BOT
            suc[i] = ()
            continue
        symbol = rng.choice(names)
        lab[i] = symbol
        suc[i] = tuple(rng.randrange(k) for _ in range(symbols[symbol]))
    g = TermGraph(0, lab, suc)
    keep = reachable(g, 0)
    return canonicalize(
        TermGraph(0, {n: lab[n] for n in lab if n in keep}, {n: suc[n] for n in lab if n in keep})
    )


def truncate_some(rng: random.Random, g: TermGraph, rounds: int = 1) -> CanonicalTermGraph:
    """A random lower bound of g: locally truncate a few nodes."""
    out = canonicalize(g)
    for _ in range(rounds):
        if len(out) == 0:
            break
        n = rng.choice(out.nodes)
        out = canonicalize(local_truncate(out, n))
    return out


def random_tree(rng: random.Random, max_size: int = 12, symbols: dict[str, int] | None = None,
                bot_prob: float = 0.15) -> Term:
    """A random term tree of bounded node count."""
    symbols = dict(symbols or RANDOM_SYMBOLS)
    budget = rng.randint(1, max_size)

    def build(depth_left: int) -> Term:
        nonlocal budget
        budget -= 1
        if bot_prob and rng.random() < bot_prob:
            return BOTTOM
        candidates = [s for s, a in symbols.items() if a == 0 or (budget > 0 and depth_left > 0)]
        symbol = rng.choice(candidates)
        arity = symbols[symbol]
        return Term(symbol, tuple(build(depth_left - 1) for _ in range(arity)))

    return build(6)


# --- exhaustive enumeration of small partial graphs -------------------------

_ENUM_CACHE: dict[tuple, list[CanonicalTermGraph]] = {}


def enumerate_partial_graphs(max_nodes: int, symbols: dict[str, int]) -> list[CanonicalTermGraph]:
    """Every canonical partial graph with at most max_nodes nodes.

    Enumerates node tables with dense allocation (a successor may name the
    next unallocated node, which allocates it) and keeps the assignments
    whose canonical renaming is the identity, so each isomorphism class
    appears exactly once.
    """
    key = (max_nodes, tuple(sorted(symbols.items())))
    if key in _ENUM_CACHE:
        return _ENUM_CACHE[key]
    alphabet = dict(symbols)
    alphabet[BOT] = 0
    out: list[CanonicalTermGraph] = []

    def assign(labels: list[str], succs: list[tuple[int, ...]], allocated: int) -> None:
        i = len(labels)
        if i == allocated:
            g = CanonicalTermGraph(labels, succs)
            if canonicalize(TermGraph(0, dict(enumerate(labels)), dict(enumerate(succs)))) == g:
                out.append(g)
            return
        for symbol, arity in alphabet.items():
            def targets(slots: int, chosen: tuple[int, ...], alloc: int) -> None:
                if slots == 0:
                    assign(labels + [symbol], succs + [chosen], alloc)
                    return
                limit = min(alloc + 1, max_nodes)
                for t in range(limit):
                    targets(slots - 1, chosen + (t,), max(alloc, t + 1))

            targets(arity, (), allocated)

    assign([], [], 1)
    _ENUM_CACHE[key] = out
    return out
