"""First-order terms as trees: the desk-scale oracle layer.

Everything here works on plain recursive trees, independently of the graph
machinery, so that the tree notions of distance, ordering, rewriting and
limits can cross-check their graph generalisations.  Terms print and parse
in functional notation: ``f(a, g(b))``, variables ``$x``, holes ``bot``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from . import metric, order
from .core import (
    BOT,
    CanonicalTermGraph,
    EmptyInput,
    Position,
    TermGraph,
    canonicalize,
    detect_periodic_tail,
    is_variable,
    unravel_to_depth,
)
from .metric import OMEGA, Distance, ZERO


@dataclass(frozen=True)
class Term:
    symbol: str
    args: tuple["Term", ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.symbol
        return f"{self.symbol}({', '.join(map(str, self.args))})"


BOTTOM = Term(BOT)


def term(symbol: str, *args: Term) -> Term:
    return Term(symbol, tuple(args))


class TermSyntaxError(Exception):
    pass


def parse_term(text: str) -> Term:
    """Parse functional notation: ``f(a, g($x))``, ``bot``."""
    pos = 0

    def skip_ws() -> None:
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def ident() -> str:
        nonlocal pos
        start = pos
        if pos < len(text) and text[pos] == "$":
            pos += 1
        while pos < len(text) and (text[pos].isalnum() or text[pos] == "_"):
            pos += 1
        if pos == start or text[start:pos] == "$":
            raise TermSyntaxError(f"expected a symbol at offset {start}")
        return text[start:pos]

    def expr() -> Term:
        nonlocal pos
        skip_ws()
        symbol = ident()
        skip_ws()
        args: list[Term] = []
        if pos < len(text) and text[pos] == "(":
            pos += 1
            while True:
                args.append(expr())
                skip_ws()
                if pos >= len(text):
                    raise TermSyntaxError("unterminated argument list")
                if text[pos] == ",":
                    pos += 1
                    continue
                if text[pos] == ")":
                    pos += 1
                    break
                raise TermSyntaxError(f"expected ',' or ')' at offset {pos}")
        return Term(symbol, tuple(args))

    result = expr()
    skip_ws()
    if pos != len(text):
        raise TermSyntaxError(f"trailing input at offset {pos}")
    return result


def positions(t: Term) -> Iterator[tuple[Position, Term]]:
    stack: list[tuple[Position, Term]] = [((), t)]
    while stack:
        pos, sub = stack.pop()
        yield pos, sub
        for i in reversed(range(len(sub.args))):
            stack.append((pos + (i,), sub.args[i]))


def subterm(t: Term, pos: Position) -> Term:
    for i in pos:
        if i >= len(t.args):
            raise IndexError(f"no subterm at {pos}")
        t = t.args[i]
    return t


def replace_at(t: Term, pos: Position, replacement: Term) -> Term:
    if not pos:
        return replacement
    i = pos[0]
    if i >= len(t.args):
        raise IndexError(f"no subterm at {pos}")
    args = list(t.args)
    args[i] = replace_at(args[i], pos[1:], replacement)
    return Term(t.symbol, tuple(args))


def _min_difference_depth(s: Term, t: Term) -> int | None:
    """Minimal depth of a position where s and t differ; None when equal."""
    if s == t:
        return None
    if s.symbol != t.symbol or len(s.args) != len(t.args):
        return 0
    best: int | None = None
    for a, b in zip(s.args, t.args):
        d = _min_difference_depth(a, b)
        if d is not None and (best is None or d + 1 < best):
            best = d + 1
    return best


def dd(s: Term, t: Term) -> Distance:
    """Term metric: 2^-d with d the minimal depth at which s and t differ."""
    d = _min_difference_depth(s, t)
    return ZERO if d is None else Distance(d)


def leq_bot_term(s: Term, t: Term) -> bool:
    """True when s is t with some subterms replaced by ``bot``."""
    if s.symbol == BOT:
        return True
    if s.symbol != t.symbol or len(s.args) != len(t.args):
        return False
    return all(leq_bot_term(a, b) for a, b in zip(s.args, t.args))


def term_glb(s: Term, t: Term) -> Term:
    """Positionwise greatest lower bound: common structure, holes elsewhere."""
    if s.symbol != t.symbol or len(s.args) != len(t.args):
        return BOTTOM
    return Term(s.symbol, tuple(term_glb(a, b) for a, b in zip(s.args, t.args)))


def term_truncate(t: Term, d: int | float) -> Term:
    """Cut at depth d: nodes at depth exactly d become ``bot``."""
    if d == OMEGA:
        return t
    if d == 0:
        return BOTTOM
    return Term(t.symbol, tuple(term_truncate(a, d - 1) for a in t.args))


class NoMatchAtPosition(Exception):
    def __init__(self, pos: Position, detail: str = ""):
        self.pos = pos
        super().__init__(f"rule does not match at {list(pos)}" + (f": {detail}" if detail else ""))


def match_term(pattern: Term, t: Term, bindings: dict[str, Term] | None = None) -> dict[str, Term] | None:
    """First-order matching; repeated variables must bind equal subterms."""
    if bindings is None:
        bindings = {}
    if is_variable(pattern.symbol):
        bound = bindings.get(pattern.symbol)
        if bound is None:
            bindings[pattern.symbol] = t
            return bindings
        return bindings if bound == t else None
    if pattern.symbol != t.symbol or len(pattern.args) != len(t.args):
        return None
    for p, a in zip(pattern.args, t.args):
        if match_term(p, a, bindings) is None:
            return None
    return bindings


def instantiate(t: Term, bindings: dict[str, Term]) -> Term:
    if is_variable(t.symbol):
        try:
            return bindings[t.symbol]
        except KeyError:
            raise NoMatchAtPosition((), f"unbound variable {t.symbol}") from None
    return Term(t.symbol, tuple(instantiate(a, bindings) for a in t.args))


def term_rewrite_step(t: Term, rule: tuple[Term, Term], pos: Position) -> Term:
    """Contract the redex at pos with the given lhs/rhs pair."""
    lhs, rhs = rule
    try:
        redex = subterm(t, pos)
    except IndexError:
        raise NoMatchAtPosition(pos, "no such position") from None
    bindings = match_term(lhs, redex)
    if bindings is None:
        raise NoMatchAtPosition(pos)
    return replace_at(t, pos, instantiate(rhs, bindings))


@dataclass(frozen=True)
class TermLimit:
    approximant: Term | None
    status: str
    depth: int | None
    certificate: tuple[int, int] | None = None  # witness indices for divergence


def liminf_term(
    ts: list[Term],
    depth_bound: int = order.DEFAULT_DEPTH,
    window: int = order.DEFAULT_WINDOW,
) -> TermLimit:
    """Limit inferior of a term trace; mirrors the graph construction on trees."""
    if not ts:
        raise EmptyInput("liminf of an empty trace")
    n = len(ts)
    tail = detect_periodic_tail(ts)
    if tail is not None:
        start, period = tail
        acc = ts[n - period]
        for u in ts[n - period + 1:]:
            acc = term_glb(acc, u)
        return TermLimit(acc, order.EXACT, None)
    suffix_glbs: list[Term] = []
    acc = ts[-1]
    for t in reversed(ts):
        acc = term_glb(acc, t)
        suffix_glbs.append(acc)
    suffix_glbs.reverse()
    truncated = [term_truncate(s, depth_bound) for s in suffix_glbs]
    if n >= window and len(set(truncated[n - window:])) == 1:
        return TermLimit(truncated[-1], order.STABLE, depth_bound)
    return TermLimit(truncated[-1], order.INCONCLUSIVE, depth_bound)


def metric_limit_term(
    ts: list[Term],
    depth_bound: int = order.DEFAULT_DEPTH,
    window: int = order.DEFAULT_WINDOW,
) -> TermLimit:
    """Metric limit of a term trace; mirrors the graph construction on trees."""
    if not ts:
        raise EmptyInput("metric limit of an empty trace")
    n = len(ts)
    tail = detect_periodic_tail(ts)
    if tail is not None:
        start, period = tail
        if period == 1:
            return TermLimit(ts[-1], order.EXACT, None)
        base = n - period
        for k in range(1, period):
            if ts[base + k] != ts[base]:
                return TermLimit(None, metric.DIVERGENT, None, (base, base + k))
    truncated = [term_truncate(t, depth_bound) for t in ts]
    if n >= window and len(set(truncated[n - window:])) == 1:
        return TermLimit(truncated[-1], order.STABLE, depth_bound)
    return TermLimit(None, order.INCONCLUSIVE, depth_bound)


def term_convergence(
    ts: list[Term],
    redex_positions: list[Position],
    depth_bound: int = order.DEFAULT_DEPTH,
    window: int = order.DEFAULT_WINDOW,
) -> dict[str, TermLimit]:
    """Classify an open term trace under all four convergence disciplines.

    ``ts`` has one more entry than ``redex_positions``; position i is the
    redex contracted between ts[i] and ts[i+1].
    """
    if len(ts) != len(redex_positions) + 1:
        raise ValueError("need exactly one redex position per step")
    out = {
        "weak-m": metric_limit_term(ts, depth_bound, window),
        "weak-p": liminf_term(ts, depth_bound, window),
    }
    depths = [len(p) for p in redex_positions]
    pairs = list(zip(ts[:-1], redex_positions))
    tail = detect_periodic_tail(pairs) if pairs else None
    if tail is not None:
        start, _ = tail
        out["strong-m"] = TermLimit(None, metric.DIVERGENT, None, (start, max(depths[start:])))
    elif out["weak-m"].status in (order.EXACT, order.STABLE) and _eventually_exceeds(depths, depth_bound):
        weak = out["weak-m"]
        approx = term_truncate(weak.approximant, depth_bound)
        out["strong-m"] = TermLimit(approx, order.STABLE, depth_bound)
    else:
        out["strong-m"] = TermLimit(None, order.INCONCLUSIVE, depth_bound)
    contexts = [replace_at(t, p, BOTTOM) for t, p in zip(ts, redex_positions)]
    out["strong-p"] = liminf_term(contexts, depth_bound, window) if contexts else liminf_term(ts, depth_bound, window)
    return out


def _eventually_exceeds(depths: list[int], bound: int) -> bool:
    best = None
    low = None
    for d in reversed(depths):
        low = d if low is None else min(low, d)
        best = low if best is None else max(best, low)
    return best is not None and best > bound


def to_graph(t: Term) -> CanonicalTermGraph:
    """Encode a term as a canonical term tree graph."""
    lab: dict[Position, str] = {}
    suc: dict[Position, tuple[Position, ...]] = {}
    for pos, sub in positions(t):
        lab[pos] = sub.symbol
        suc[pos] = tuple(pos + (i,) for i in range(len(sub.args)))
    return canonicalize(TermGraph((), lab, suc))


def from_graph(g: TermGraph) -> Term:
    """Read a term tree graph back as a term; the graph must be acyclic."""

    def build(n, on_path: frozenset) -> Term:
        if n in on_path:
            raise ValueError("graph is cyclic; unravel to a depth first")
        return Term(g.lab(n), tuple(build(s, on_path | {n}) for s in g.suc(n)))

    return build(g.root, frozenset())


def check_unravel_preservation(
    graphs: list[TermGraph],
    depth_bound: int,
    window: int = order.DEFAULT_WINDOW,
    margin: int = 2,
) -> bool:
    """Check that unravelling commutes with trace limits, to a depth.

    The tree side works on unravellings cut a little deeper than
    ``depth_bound``, through the independent term-level limit operators; the
    graph side unravels the graph-level limit approximant.  Both are then
    compared at ``depth_bound`` exactly.  The metric half only applies when
    the graph trace converges metrically.
    """
    deep = depth_bound + margin
    tree_trace = [from_graph(unravel_to_depth(g, deep)) for g in graphs]

    graph_inf = order.liminf(graphs, depth_bound, window)
    tree_inf = liminf_term(tree_trace, deep, window)
    if graph_inf.status == order.INCONCLUSIVE or tree_inf.status == order.INCONCLUSIVE:
        return False
    lhs = term_truncate(tree_inf.approximant, depth_bound)
    rhs = from_graph(unravel_to_depth(graph_inf.approximant, depth_bound))
    if lhs != rhs:
        return False

    graph_lim = metric.metric_limit(graphs, depth_bound, window)
    if graph_lim.status in (order.EXACT, order.STABLE):
        tree_lim = metric_limit_term(tree_trace, deep, window)
        if tree_lim.status not in (order.EXACT, order.STABLE):
            return False
        lhs = term_truncate(tree_lim.approximant, depth_bound)
        rhs = from_graph(unravel_to_depth(graph_lim.approximant, depth_bound))
        if lhs != rhs:
            return False
    return True
