"""Rooted, ordered, labelled term graphs.

A term graph is a finite directed graph whose nodes carry symbols from a
signature; a node labelled with a k-ary symbol has exactly k ordered
successors, and every node is reachable from a distinguished root.  Cycles
are allowed, which is how finite graphs stand in for infinite trees.

The nullary symbol ``bot`` marks holes ("undefined"), and nullary symbols
starting with ``$`` are variables.  Both are ordinary labels here; only
operations parametrised by a suspension set treat them specially.
"""

from __future__ import annotations

from collections import deque
from typing import Hashable, Iterable, Mapping, Sequence

Node = Hashable
Position = tuple[int, ...]
NodeMap = dict  # total node-to-node function witnessing a homomorphism

BOT = "bot"
VAR_PREFIX = "$"


def is_variable(symbol: str) -> bool:
    return symbol.startswith(VAR_PREFIX)


class TermGraphError(Exception):
    """Base class for graph construction and lookup failures."""


class UnknownSymbol(TermGraphError):
    def __init__(self, symbol: str, detail: str = ""):
        self.symbol = symbol
        super().__init__(f"unknown symbol {symbol!r}" + (f" ({detail})" if detail else ""))


class ArityMismatch(TermGraphError):
    def __init__(self, node: Node, detail: str):
        self.node = node
        super().__init__(detail)


class UnreachableNode(TermGraphError):
    def __init__(self, node: Node):
        self.node = node
        super().__init__(f"node {node!r} is not reachable from the root")


class DanglingSuccessor(TermGraphError):
    def __init__(self, node: Node, successor: Node):
        self.node = node
        self.successor = successor
        super().__init__(f"node {node!r} has undefined successor {successor!r}")


class NoSuchNode(TermGraphError):
    def __init__(self, node: Node):
        self.node = node
        super().__init__(f"no node {node!r} in graph")


class EmptyInput(TermGraphError):
    pass


class Signature:
    """Maps symbol names to arities.

    ``bot`` and ``$``-prefixed variables are implicitly nullary and need not
    be declared; declaring them with a different arity is rejected.
    """

    def __init__(self, symbols: Mapping[str, int] | None = None):
        self._symbols: dict[str, int] = {}
        for name, arity in (symbols or {}).items():
            self.declare(name, arity)

    def declare(self, name: str, arity: int) -> None:
        if arity < 0:
            raise ValueError(f"negative arity for {name!r}")
        if (name == BOT or is_variable(name)) and arity != 0:
            raise ArityMismatch(name, f"reserved symbol {name!r} must be nullary")
        old = self._symbols.get(name)
        if old is not None and old != arity:
            raise ArityMismatch(name, f"symbol {name!r} declared with arity {old} and {arity}")
        self._symbols[name] = arity

    def arity(self, name: str) -> int:
        if name == BOT or is_variable(name):
            return 0
        try:
            return self._symbols[name]
        except KeyError:
            raise UnknownSymbol(name) from None

    def __contains__(self, name: str) -> bool:
        return name == BOT or is_variable(name) or name in self._symbols

    @property
    def symbols(self) -> dict[str, int]:
        return dict(self._symbols)

    def merged(self, other: "Signature") -> "Signature":
        out = Signature(self._symbols)
        for name, arity in other._symbols.items():
            out.declare(name, arity)
        return out

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}/{v}" for k, v in sorted(self._symbols.items()))
        return f"Signature({inner})"


class TermGraph:
    """Immutable rooted ordered labelled graph.

    Construct untrusted input through :func:`validate`; the constructor
    itself assumes a well-formed node table.  Node identity is any hashable
    value; canonical graphs use 0..k-1.
    """

    __slots__ = ("_root", "_lab", "_suc", "_nodes")

    def __init__(self, root: Node, lab: Mapping[Node, str], suc: Mapping[Node, Sequence[Node]]):
        self._root = root
        self._lab = dict(lab)
        self._suc = {n: tuple(s) for n, s in suc.items()}
        self._nodes = tuple(self._lab)

    @property
    def root(self) -> Node:
        return self._root

    @property
    def nodes(self) -> tuple[Node, ...]:
        return self._nodes

    def lab(self, n: Node) -> str:
        try:
            return self._lab[n]
        except KeyError:
            raise NoSuchNode(n) from None

    def suc(self, n: Node) -> tuple[Node, ...]:
        try:
            return self._suc[n]
        except KeyError:
            raise NoSuchNode(n) from None

    def table(self) -> dict[Node, tuple[str, tuple[Node, ...]]]:
        return {n: (self._lab[n], self._suc[n]) for n in self._nodes}

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, n: Node) -> bool:
        return n in self._lab

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TermGraph):
            return NotImplemented
        return self._root == other._root and self._lab == other._lab and self._suc == other._suc

    def __repr__(self) -> str:
        parts = []
        for n in self._nodes:
            args = ",".join(map(str, self._suc[n]))
            parts.append(f"{n}:{self._lab[n]}" + (f"({args})" if args else ""))
        return f"<graph root={self._root} {' '.join(parts)}>"


class CanonicalTermGraph(TermGraph):
    """Isomorphism-class representative with nodes 0..k-1.

    Node i is the node whose least position (shortest, then lexicographically
    smallest) is the i-th in that order; node 0 is the root.  Two canonical
    graphs are equal as values exactly when the underlying graphs are
    isomorphic, so instances are hashable and usable as dict keys.
    """

    __slots__ = ("labels", "succs", "_hash")

    def __init__(self, labels: Sequence[str], succs: Sequence[Sequence[int]]):
        self.labels = tuple(labels)
        self.succs = tuple(tuple(s) for s in succs)
        super().__init__(0, dict(enumerate(self.labels)), dict(enumerate(self.succs)))
        self._hash = hash((self.labels, self.succs))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, CanonicalTermGraph):
            return self.labels == other.labels and self.succs == other.succs
        return super().__eq__(other)


def validate(
    table: Mapping[Node, tuple[str, Sequence[Node]]],
    root: Node,
    sig: Signature,
) -> TermGraph:
    """Check a raw node table and build a TermGraph.

    Rejects arity violations, successors that name no node, and nodes not
    reachable from the root (they are an error, never silently dropped).
    """
    if root not in table:
        raise NoSuchNode(root)
    for n, (symbol, successors) in table.items():
        arity = sig.arity(symbol)
        if arity != len(successors):
            raise ArityMismatch(
                n, f"node {n!r}: symbol {symbol!r} has arity {arity}, got {len(successors)} successors"
            )
        for s in successors:
            if s not in table:
                raise DanglingSuccessor(n, s)
    g = TermGraph(root, {n: v[0] for n, v in table.items()}, {n: v[1] for n, v in table.items()})
    reached = reachable(g, root)
    for n in table:
        if n not in reached:
            raise UnreachableNode(n)
    return g


def reachable(g: TermGraph, start: Node) -> set[Node]:
    seen = {start}
    stack = [start]
    while stack:
        for s in g.suc(stack.pop()):
            if s not in seen:
                seen.add(s)
                stack.append(s)
    return seen


def depth(g: TermGraph, n: Node) -> int:
    """Length of a shortest root-to-n path."""
    if n not in g:
        raise NoSuchNode(n)
    dist = {g.root: 0}
    queue = deque([g.root])
    while queue:
        m = queue.popleft()
        if m == n:
            return dist[m]
        for s in g.suc(m):
            if s not in dist:
                dist[s] = dist[m] + 1
                queue.append(s)
    raise NoSuchNode(n)  # unreachable in a valid graph


def positions_up_to(g: TermGraph, n: Node, maxlen: int) -> frozenset[Position]:
    """All positions of node n of length at most maxlen.

    Finite even for cyclic graphs, since the path length is bounded.
    """
    if n not in g:
        raise NoSuchNode(n)
    found: set[Position] = set()
    frontier: list[tuple[Node, Position]] = [(g.root, ())]
    for _ in range(maxlen + 1):
        nxt: list[tuple[Node, Position]] = []
        for node, pos in frontier:
            if node == n:
                found.add(pos)
            for i, s in enumerate(g.suc(node)):
                nxt.append((s, pos + (i,)))
        frontier = nxt
    return frozenset(found)


def bfs_order(g: TermGraph) -> list[Node]:
    """Nodes in least-position order: breadth first, successors in index order."""
    order = [g.root]
    seen = {g.root}
    queue = deque([g.root])
    while queue:
        for s in g.suc(queue.popleft()):
            if s not in seen:
                seen.add(s)
                order.append(s)
                queue.append(s)
    return order


def canonicalize(g: TermGraph) -> CanonicalTermGraph:
    """Rename nodes to 0..k-1 in least-position order.

    The result is isomorphic to the input, and equal canonical graphs
    correspond exactly to isomorphic inputs: the traversal order is forced,
    so any isomorphism must preserve it.
    """
    if isinstance(g, CanonicalTermGraph):
        return g
    order = bfs_order(g)
    index = {n: i for i, n in enumerate(order)}
    labels = [g.lab(n) for n in order]
    succs = [[index[s] for s in g.suc(n)] for n in order]
    return CanonicalTermGraph(labels, succs)


def delta_hom(g: TermGraph, h: TermGraph, delta: Iterable[str]) -> dict[Node, Node] | None:
    """The unique structure-preserving map g -> h, if one exists.

    The labelling and successor conditions are suspended at nodes whose
    label is in ``delta`` (which must contain nullary symbols only).  The
    root maps to the root, and successor conditions force every other
    image, so at most one candidate map exists; returns None when the
    forced map is inconsistent.
    """
    suspended = frozenset(delta)
    for n in g.nodes:
        if g.lab(n) in suspended and g.suc(n):
            raise ValueError(f"suspension set contains non-nullary symbol {g.lab(n)!r}")
    mapping: dict[Node, Node] = {g.root: h.root}
    stack = [g.root]
    while stack:
        n = stack.pop()
        if g.lab(n) in suspended:
            continue
        image = mapping[n]
        if g.lab(n) != h.lab(image):
            return None
        g_succ = g.suc(n)
        h_succ = h.suc(image)
        if len(g_succ) != len(h_succ):
            return None
        for a, b in zip(g_succ, h_succ):
            if a in mapping:
                if mapping[a] != b:
                    return None
            else:
                mapping[a] = b
                stack.append(a)
    return mapping


def iso(g: TermGraph, h: TermGraph) -> bool:
    """Isomorphism test by forced parallel traversal from the roots."""
    mapping = delta_hom(g, h, ())
    if mapping is None:
        return False
    return len(set(mapping.values())) == len(mapping) == len(h)


def subgraph(g: TermGraph, n: Node) -> TermGraph:
    """The sub-term graph of g rooted in n."""
    if n not in g:
        raise NoSuchNode(n)
    keep = reachable(g, n)
    lab = {m: g.lab(m) for m in g.nodes if m in keep}
    suc = {m: g.suc(m) for m in g.nodes if m in keep}
    return TermGraph(n, lab, suc)


def collapse(g: TermGraph) -> CanonicalTermGraph:
    """Maximally shared representative: merge all bisimilar nodes.

    Partition refinement starting from labels; two nodes stay together as
    long as their successors lie in pairwise equal classes.  The quotient is
    the smallest graph bisimilar to g.
    """
    cls: dict[Node, int] = {}
    keys = {}
    for n in g.nodes:
        key = g.lab(n)
        if key not in keys:
            keys[key] = len(keys)
        cls[n] = keys[key]
    while True:
        sigs: dict[tuple, int] = {}
        new_cls: dict[Node, int] = {}
        for n in g.nodes:
            sig = (cls[n], tuple(cls[s] for s in g.suc(n)))
            if sig not in sigs:
                sigs[sig] = len(sigs)
            new_cls[n] = sigs[sig]
        if len(sigs) == len(set(cls.values())):
            break
        cls = new_cls
    rep: dict[int, Node] = {}
    for n in g.nodes:
        rep.setdefault(cls[n], n)
    lab = {c: g.lab(n) for c, n in rep.items()}
    suc = {c: tuple(cls[s] for s in g.suc(n)) for c, n in rep.items()}
    return canonicalize(TermGraph(cls[g.root], lab, suc))


def bisimilar(g: TermGraph, h: TermGraph) -> bool:
    """True when g and h unravel to the same (possibly infinite) term."""
    return collapse(g) == collapse(h)


def unravel_to_depth(g: TermGraph, d: int) -> CanonicalTermGraph:
    """The depth-d truncation of the unravelling of g, as a term tree.

    Every node at tree depth exactly d is replaced by ``bot``; nodes above
    keep their label and are expanded fully.  This is the cut of the
    possibly infinite term U(g), not the unravelling of a cut graph.
    """
    lab: dict[Position, str] = {}
    suc: dict[Position, tuple[Position, ...]] = {}

    def expand(n: Node, pos: Position, remaining: int) -> None:
        if remaining == 0:
            lab[pos] = BOT
            suc[pos] = ()
            return
        children = []
        for i, s in enumerate(g.suc(n)):
            child = pos + (i,)
            children.append(child)
            expand(s, child, remaining - 1)
        lab[pos] = g.lab(n)
        suc[pos] = tuple(children)

    expand(g.root, (), d)
    return canonicalize(TermGraph((), lab, suc))


def is_tree(g: TermGraph) -> bool:
    """True when every node has exactly one position."""
    refs: dict[Node, int] = {n: 0 for n in g.nodes}
    for n in g.nodes:
        for s in g.suc(n):
            refs[s] += 1
    if refs[g.root] != 0:
        return False
    return all(c == 1 for n, c in refs.items() if n != g.root)


def is_total(g: TermGraph) -> bool:
    """True when no node is labelled ``bot``."""
    return all(g.lab(n) != BOT for n in g.nodes)


def is_total_to_depth(g: TermGraph, d: int) -> bool:
    """True when no node of depth < d is labelled ``bot``."""
    dist = {g.root: 0}
    queue = deque([g.root])
    while queue:
        m = queue.popleft()
        if dist[m] >= d:
            continue
        if g.lab(m) == BOT:
            return False
        for s in g.suc(m):
            if s not in dist:
                dist[s] = dist[m] + 1
                queue.append(s)
    return True


def detect_periodic_tail(seq: Sequence) -> tuple[int, int] | None:
    """Find the shortest period p of a trailing periodic pattern.

    Returns (start, period) such that seq[i] == seq[i+p] for all
    start <= i < len-p, requiring at least two full observed periods;
    None when no such tail exists.
    """
    n = len(seq)
    for p in range(1, n // 2 + 1):
        s = n - p
        while s > 0 and seq[s - 1] == seq[s - 1 + p]:
            s -= 1
        if n - s >= 2 * p:
            return s, p
    return None
