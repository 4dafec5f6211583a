"""The partial order on term graphs with holes, and limit inferiors.

``g <= h`` holds when a hole-filling homomorphism g -> h exists: nodes
labelled ``bot`` may map anywhere, everything else must preserve structure.
Greatest lower bounds are computed by a synchronized product, and the limit
inferior of a trace suffix is the least upper bound of its suffix glbs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    BOT,
    CanonicalTermGraph,
    EmptyInput,
    Node,
    NoSuchNode,
    TermGraph,
    canonicalize,
    delta_hom,
    detect_periodic_tail,
    reachable,
)

DEFAULT_DEPTH = 16
DEFAULT_WINDOW = 8

PartialTermGraph = TermGraph  # a graph that may contain bot-labelled holes


def leq_bot(g: TermGraph, h: TermGraph) -> bool:
    """True iff a hole-filling homomorphism g -> h exists."""
    return delta_hom(g, h, (BOT,)) is not None


def glb2(g: TermGraph, h: TermGraph) -> CanonicalTermGraph:
    """Greatest lower bound of two graphs by synchronized product.

    Nodes are the pairs reachable from (root, root); a pair keeps its common
    label when both sides agree and becomes ``bot`` otherwise.  The result is
    a lower bound of both inputs, and every common lower bound maps into it.
    """
    start = (g.root, h.root)
    lab: dict[tuple[Node, Node], str] = {}
    suc: dict[tuple[Node, Node], tuple] = {}
    stack = [start]
    seen = {start}
    while stack:
        m, n = stack.pop()
        if g.lab(m) == h.lab(n) and g.lab(m) != BOT:
            lab[(m, n)] = g.lab(m)
            children = tuple(zip(g.suc(m), h.suc(n)))
            suc[(m, n)] = children
            for child in children:
                if child not in seen:
                    seen.add(child)
                    stack.append(child)
        else:
            lab[(m, n)] = BOT
            suc[(m, n)] = ()
    return canonicalize(TermGraph(start, lab, suc))


def glb_set(graphs: list[TermGraph]) -> CanonicalTermGraph:
    """Greatest lower bound of a non-empty collection."""
    if not graphs:
        raise EmptyInput("glb of an empty collection")
    acc = canonicalize(graphs[0])
    for g in graphs[1:]:
        acc = glb2(acc, g)
    return acc


def local_truncate(g: TermGraph, n: Node) -> TermGraph:
    """Replace node n by a hole: relabel to ``bot``, drop its out-edges,
    and garbage collect whatever becomes unreachable.  The root stays."""
    if n not in g:
        raise NoSuchNode(n)
    lab = {m: (BOT if m == n else g.lab(m)) for m in g.nodes}
    suc = {m: (() if m == n else g.suc(m)) for m in g.nodes}
    cut = TermGraph(g.root, lab, suc)
    keep = reachable(cut, g.root)
    return TermGraph(
        g.root,
        {m: lab[m] for m in g.nodes if m in keep},
        {m: suc[m] for m in g.nodes if m in keep},
    )


EXACT = "exact"
STABLE = "stable-to-depth"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class LiminfResult:
    """Limit inferior of the infinite continuation of a trace prefix.

    ``exact`` is certified by an eventually periodic canonical trace, in
    which case the approximant is the glb over one full cycle.  ``stable``
    means the depth-d truncations of the suffix glbs were constant over the
    final window and the approximant is that truncation.
    """

    approximant: CanonicalTermGraph
    status: str
    depth: int | None
    beta: int


def liminf(
    graphs: list[TermGraph],
    depth_bound: int = DEFAULT_DEPTH,
    window: int = DEFAULT_WINDOW,
) -> LiminfResult:
    """Limit inferior over suffixes of a graph trace.

    Tries, in order: an eventually periodic tail (exact), stabilization of
    suffix-glb truncations at depth_bound over the final window entries,
    and otherwise reports the best-effort truncation as inconclusive.
    """
    from .metric import truncate  # local import; metric builds on this module

    if not graphs:
        raise EmptyInput("liminf of an empty trace")
    canon = [canonicalize(g) for g in graphs]
    n = len(canon)
    tail = detect_periodic_tail(canon)
    if tail is not None:
        start, period = tail
        return LiminfResult(glb_set(canon[n - period:]), EXACT, None, start)
    suffix_glbs = [glb_set(canon[beta:]) for beta in range(n)]
    truncated = [canonicalize(truncate(s, depth_bound)) for s in suffix_glbs]
    if n >= window and len(set(truncated[n - window:])) == 1:
        final = truncated[-1]
        beta = n - 1
        while beta > 0 and truncated[beta - 1] == final:
            beta -= 1
        return LiminfResult(final, STABLE, depth_bound, beta)
    return LiminfResult(truncated[-1], INCONCLUSIVE, depth_bound, n - 1)
