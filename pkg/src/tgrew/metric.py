"""Truncation, the graph ultrametric, and metric limits of traces.

Two graphs are at distance 2^-d when d is the greatest depth at which their
truncations are still isomorphic; isomorphic graphs are at distance zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering

from .core import (
    BOT,
    CanonicalTermGraph,
    EmptyInput,
    TermGraph,
    canonicalize,
    detect_periodic_tail,
    iso,
)
from .order import DEFAULT_DEPTH, DEFAULT_WINDOW, EXACT, INCONCLUSIVE, STABLE

OMEGA = float("inf")


@total_ordering
@dataclass(frozen=True)
class Distance:
    """A dyadic distance: zero, or 2^-exponent."""

    exponent: int | None  # None encodes zero

    @property
    def is_zero(self) -> bool:
        return self.exponent is None

    def as_float(self) -> float:
        return 0.0 if self.exponent is None else 2.0 ** -self.exponent

    def _key(self) -> float:
        return float("-inf") if self.exponent is None else -float(self.exponent)

    def __lt__(self, other: "Distance") -> bool:
        return self._key() < other._key()

    def __str__(self) -> str:
        return "0" if self.exponent is None else f"2^-{self.exponent}"


ZERO = Distance(None)


def truncate(g: TermGraph, d: int | float) -> TermGraph:
    """Simple truncation at depth d.

    Nodes of depth < d are kept unchanged, nodes at depth exactly d are
    relabelled ``bot`` with their out-edges removed, deeper nodes drop out.
    Passing ``OMEGA`` returns the graph unchanged.
    """
    if d == OMEGA:
        return g
    depths = _depths(g)
    lab = {}
    suc = {}
    for n in g.nodes:
        dn = depths[n]
        if dn > d:
            continue
        if dn == d:
            lab[n] = BOT
            suc[n] = ()
        else:
            lab[n] = g.lab(n)
            suc[n] = g.suc(n)
    return TermGraph(g.root, lab, suc)


def _depths(g: TermGraph) -> dict:
    from collections import deque

    dist = {g.root: 0}
    queue = deque([g.root])
    while queue:
        m = queue.popleft()
        for s in g.suc(m):
            if s not in dist:
                dist[s] = dist[m] + 1
                queue.append(s)
    return dist


def similarity_depth(g: TermGraph, h: TermGraph) -> int | float:
    """Greatest depth at which the truncations of g and h are isomorphic.

    OMEGA when the graphs themselves are isomorphic; otherwise finite, since
    truncation beyond the deepest node reproduces the graph and the loop
    must hit a failing depth by then.
    """
    if iso(g, h):
        return OMEGA
    e = 0
    bound = len(g) + len(h) + 1
    while iso(truncate(g, e + 1), truncate(h, e + 1)):
        e += 1
        assert e <= bound, "similarity search exceeded the structural bound"
    return e


def dist(g: TermGraph, h: TermGraph) -> Distance:
    """Simple distance: 0 for isomorphic graphs, else 2^-similarity_depth."""
    d = similarity_depth(g, h)
    if d == OMEGA:
        return ZERO
    return Distance(int(d))


DIVERGENT = "divergent"


@dataclass(frozen=True)
class PeriodicDivergence:
    """Witness that a trace cannot be Cauchy: two graphs at fixed positive
    distance recur with the tail's period."""

    start: int
    period: int
    index_a: int
    index_b: int
    exponent: int

    def replay(self, graphs: list[TermGraph]) -> bool:
        canon = [canonicalize(g) for g in graphs]
        n = len(canon)
        for i in range(self.start, n - self.period):
            if canon[i] != canon[i + self.period]:
                return False
        a, b = self.index_a, self.index_b
        expected = Distance(self.exponent)
        while b < n:
            if dist(canon[a], canon[b]) != expected:
                return False
            a += self.period
            b += self.period
        return True


@dataclass(frozen=True)
class LimitResult:
    """Metric limit of the infinite continuation of a trace prefix.

    ``divergent`` certifies, under a detected periodic tail with at least two
    distinct graphs, that no limit can exist; the approximant is then None.
    """

    approximant: CanonicalTermGraph | None
    status: str
    depth: int | None
    certificate: PeriodicDivergence | None = None


def metric_limit(
    graphs: list[TermGraph],
    depth_bound: int = DEFAULT_DEPTH,
    window: int = DEFAULT_WINDOW,
) -> LimitResult:
    """Limit of a graph trace in the simple metric.

    An eventually constant canonical trace gives an exact limit; a periodic
    non-constant tail certifies divergence; otherwise constancy of the
    depth-bounded truncations over the final window gives an approximant.
    """
    if not graphs:
        raise EmptyInput("metric limit of an empty trace")
    canon = [canonicalize(g) for g in graphs]
    n = len(canon)
    tail = detect_periodic_tail(canon)
    if tail is not None:
        start, period = tail
        if period == 1:
            return LimitResult(canon[-1], EXACT, None)
        base = n - period
        for k in range(1, period):
            if canon[base + k] != canon[base]:
                e = similarity_depth(canon[base], canon[base + k])
                cert = PeriodicDivergence(start, period, base, base + k, int(e))
                return LimitResult(None, DIVERGENT, None, cert)
    truncated = [canonicalize(truncate(g, depth_bound)) for g in canon]
    if n >= window and len(set(truncated[n - window:])) == 1:
        return LimitResult(truncated[-1], STABLE, depth_bound)
    return LimitResult(None, INCONCLUSIVE, depth_bound)
