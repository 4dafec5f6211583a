"""Graph rewrite rules, matching, reduction steps, and trace generation.

A rule is one shared graph with two distinguished roots: matching finds the
forced variable-suspending homomorphism from the left-hand side into a
redex, the contractum is built by copying the right-hand side's own nodes,
and every edge into the redex root is then redirected to the contractum
root simultaneously before unreachable nodes are collected.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

from .core import (
    BOT,
    ArityMismatch,
    CanonicalTermGraph,
    DanglingSuccessor,
    Node,
    NoSuchNode,
    Position,
    Signature,
    TermGraph,
    TermGraphError,
    UnreachableNode,
    bfs_order,
    canonicalize,
    depth,
    is_variable,
    reachable,
)
from .order import local_truncate
from .terms import Term


class RuleError(TermGraphError):
    pass


class DuplicateVariableNode(RuleError):
    def __init__(self, variable: str):
        self.variable = variable
        super().__init__(f"variable {variable} labels more than one node")


class VariableAtLhsRoot(RuleError):
    pass


class VariableUnreachableFromLhs(RuleError):
    def __init__(self, variable: str):
        self.variable = variable
        super().__init__(f"variable {variable} is not reachable from the lhs root")


class BottomInRule(RuleError):
    pass


class RuleRootsCoincide(RuleError):
    pass


class NoMatch(TermGraphError):
    pass


class ScriptedRedexInvalid(TermGraphError):
    def __init__(self, index: int, detail: str):
        self.index = index
        super().__init__(f"script step {index}: {detail}")


class CyclicRuleNeedsBound(RuleError):
    pass


class Rule:
    """A rewrite rule (body graph, lhs root, rhs root) plus a name."""

    def __init__(
        self,
        name: str,
        lab: Mapping[Node, str],
        suc: Mapping[Node, Sequence[Node]],
        lhs_root: Node,
        rhs_root: Node,
    ):
        self.name = name
        self.lab = dict(lab)
        self.suc = {n: tuple(s) for n, s in suc.items()}
        self.lhs_root = lhs_root
        self.rhs_root = rhs_root
        self.lhs_nodes = self._reach(lhs_root)
        self.variables = frozenset(s for s in self.lab.values() if is_variable(s))

    def _reach(self, start: Node) -> set[Node]:
        seen = {start}
        stack = [start]
        while stack:
            for s in self.suc[stack.pop()]:
                if s not in seen:
                    seen.add(s)
                    stack.append(s)
        return seen

    def lhs(self) -> TermGraph:
        return TermGraph(
            self.lhs_root,
            {n: self.lab[n] for n in self.lab if n in self.lhs_nodes},
            {n: self.suc[n] for n in self.lab if n in self.lhs_nodes},
        )

    def rhs(self) -> TermGraph:
        keep = self._reach(self.rhs_root)
        return TermGraph(
            self.rhs_root,
            {n: self.lab[n] for n in self.lab if n in keep},
            {n: self.suc[n] for n in self.lab if n in keep},
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Rule):
            return NotImplemented
        return (
            self.name == other.name
            and self.lab == other.lab
            and self.suc == other.suc
            and self.lhs_root == other.lhs_root
            and self.rhs_root == other.rhs_root
        )

    def __repr__(self) -> str:
        return f"<rule {self.name}: {self.lhs_root} -> {self.rhs_root}>"


def validate_rule(
    table: Mapping[Node, tuple[str, Sequence[Node]]],
    lhs_root: Node,
    rhs_root: Node,
    name: str,
    sig: Signature,
) -> Rule:
    """Check the rule invariants and build a Rule.

    Every node must be reachable from one of the two roots, each variable
    may label one node only, the lhs root is not a variable, variables must
    be reachable from the lhs, and neither holes nor coinciding roots are
    allowed.
    """
    if lhs_root not in table:
        raise NoSuchNode(lhs_root)
    if rhs_root not in table:
        raise NoSuchNode(rhs_root)
    if lhs_root == rhs_root:
        raise RuleRootsCoincide(f"rule {name}: lhs and rhs root are the same node")
    for n, (symbol, successors) in table.items():
        if symbol == BOT:
            raise BottomInRule(f"rule {name}: node {n!r} is labelled bot")
        arity = sig.arity(symbol)
        if arity != len(successors):
            raise ArityMismatch(
                n, f"rule {name}, node {n!r}: symbol {symbol!r} has arity {arity}, got {len(successors)}"
            )
        for s in successors:
            if s not in table:
                raise DanglingSuccessor(n, s)
    lab = {n: v[0] for n, v in table.items()}
    suc = {n: tuple(v[1]) for n, v in table.items()}
    rule = Rule(name, lab, suc, lhs_root, rhs_root)
    covered = rule._reach(lhs_root) | rule._reach(rhs_root)
    for n in table:
        if n not in covered:
            raise UnreachableNode(n)
    if is_variable(lab[lhs_root]):
        raise VariableAtLhsRoot(f"rule {name}: lhs root is a variable")
    seen_vars: dict[str, Node] = {}
    for n, symbol in lab.items():
        if is_variable(symbol):
            if symbol in seen_vars:
                raise DuplicateVariableNode(symbol)
            seen_vars[symbol] = n
            if n not in rule.lhs_nodes:
                raise VariableUnreachableFromLhs(symbol)
    return rule


@dataclass
class Grs:
    """A term graph rewriting system: signature plus ordered rules."""

    signature: Signature
    rules: tuple[Rule, ...]

    def __post_init__(self):
        names = [r.name for r in self.rules]
        if len(set(names)) != len(names):
            raise RuleError("duplicate rule names")
        self.rules = tuple(self.rules)

    def rule(self, name: str) -> Rule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)


def match(rule: Rule, g: TermGraph, n: Node) -> dict[Node, Node] | None:
    """The forced variable-suspending homomorphism lhs -> g|n, or None.

    A shared variable node forced onto two different targets fails the
    match, which gives non-left-linear rules equality semantics for free.
    """
    if n not in g:
        raise NoSuchNode(n)
    mapping: dict[Node, Node] = {rule.lhs_root: n}
    stack = [rule.lhs_root]
    while stack:
        m = stack.pop()
        if is_variable(rule.lab[m]):
            continue
        image = mapping[m]
        if rule.lab[m] != g.lab(image) or len(rule.suc[m]) != len(g.suc(image)):
            return None
        for a, b in zip(rule.suc[m], g.suc(image)):
            if a in mapping:
                if mapping[a] != b:
                    return None
            else:
                mapping[a] = b
                stack.append(a)
    return mapping


def find_redexes(grs: Grs, g: TermGraph) -> list[tuple[str, Node]]:
    """All (rule name, node) pairs that match, outermost-leftmost first."""
    out = []
    for n in bfs_order(g):
        for rule in grs.rules:
            if match(rule, g, n) is not None:
                out.append((rule.name, n))
    return out


def pre_reduce(g: TermGraph, rule: Rule, n: Node, phi: Mapping[Node, Node]) -> TermGraph:
    """Apply a matched rule at node n, operationally.

    Nodes of the rule outside its left-hand side are copied in, with edges
    into the left-hand side redirected through the match; then all edges to
    the redex root move to the contractum root at once (the root itself is
    re-rooted there if it was the redex), and unreachable nodes are dropped.
    """
    fresh = {}
    counter = itertools.count()
    for m in rule.lab:
        if m not in rule.lhs_nodes:
            name = ("*", next(counter))
            while name in g:
                name = ("*", next(counter))
            fresh[m] = name

    def image(m: Node) -> Node:
        return phi[m] if m in rule.lhs_nodes else fresh[m]

    lab: dict[Node, str] = {m: g.lab(m) for m in g.nodes}
    suc: dict[Node, tuple[Node, ...]] = {m: g.suc(m) for m in g.nodes}
    for m, copy in fresh.items():
        lab[copy] = rule.lab[m]
        suc[copy] = tuple(image(s) for s in rule.suc[m])

    contractum = image(rule.rhs_root)
    suc = {m: tuple(contractum if s == n else s for s in targets) for m, targets in suc.items()}
    root = contractum if g.root == n else g.root

    keep = reachable(TermGraph(root, lab, suc), root)
    return TermGraph(
        root,
        {m: lab[m] for m in lab if m in keep},
        {m: suc[m] for m in lab if m in keep},
    )


@dataclass(frozen=True)
class Step:
    """One canonicalised reduction step with its analysis metadata."""

    source: CanonicalTermGraph
    target: CanonicalTermGraph
    rule: str
    redex_node: int
    redex_depth: int
    context: CanonicalTermGraph


def reduce_step(g: TermGraph, rule: Rule, n: Node) -> Step:
    """Contract the redex at node n and canonicalise the result.

    Accepts any graph; a non-canonical input is canonicalised first and the
    redex node translated along, so isomorphic inputs give equal Steps.
    """
    if isinstance(g, CanonicalTermGraph):
        source, node = g, n
    else:
        if n not in g:
            raise NoSuchNode(n)
        source = canonicalize(g)
        node = bfs_order(g).index(n)
    phi = match(rule, source, node)
    if phi is None:
        raise NoMatch(f"rule {rule.name} does not match at node {node}")
    target = canonicalize(pre_reduce(source, rule, node, phi))
    return Step(
        source=source,
        target=target,
        rule=rule.name,
        redex_node=node,
        redex_depth=depth(source, node),
        context=canonicalize(local_truncate(source, node)),
    )


NORMAL_FORM = "normal-form"
STEP_BUDGET = "step-budget"
CYCLE_DETECTED = "cycle-detected"

LEFTMOST_OUTERMOST = "leftmost-outermost"


@dataclass(frozen=True)
class Script:
    """An explicit list of (rule name, redex position) instructions."""

    entries: tuple[tuple[str, Position], ...]


@dataclass(frozen=True)
class Trace:
    """A finite reduction prefix: initial graph, steps, and why it stopped."""

    initial: CanonicalTermGraph
    steps: tuple[Step, ...]
    termination: str
    cycle_start: int | None = None

    def graphs(self) -> list[CanonicalTermGraph]:
        return [self.initial] + [s.target for s in self.steps]

    @property
    def closed(self) -> bool:
        return self.termination == NORMAL_FORM


def node_at_position(g: TermGraph, pos: Position) -> Node:
    n = g.root
    for i in pos:
        successors = g.suc(n)
        if i >= len(successors):
            raise NoSuchNode(tuple(pos))
        n = successors[i]
    return n


def run(
    g: TermGraph,
    grs: Grs,
    strategy: str | Script = LEFTMOST_OUTERMOST,
    max_steps: int = 1000,
) -> Trace:
    """Reduce repeatedly and record the trace.

    The default strategy picks the redex with the least position, breaking
    ties by rule declaration order.  A Script replays its instructions in
    order instead (and never triggers cycle detection, since its state
    always advances).  Stops on a normal form, on the step budget, or when
    a canonical graph recurs under the stateless default strategy.
    """
    current = canonicalize(g)
    steps: list[Step] = []
    scripted = isinstance(strategy, Script)
    if not scripted and strategy not in (LEFTMOST_OUTERMOST, "lo"):
        raise ValueError(f"unknown strategy {strategy!r}")
    seen: dict[CanonicalTermGraph, int] = {current: 0}
    termination = STEP_BUDGET
    cycle_start = None
    for i in range(max_steps):
        if scripted:
            if i >= len(strategy.entries):
                break
            rule_name, pos = strategy.entries[i]
            try:
                rule = grs.rule(rule_name)
            except KeyError:
                raise ScriptedRedexInvalid(i, f"no rule named {rule_name}") from None
            try:
                node = node_at_position(current, pos)
            except NoSuchNode:
                raise ScriptedRedexInvalid(i, f"no node at position {list(pos)}") from None
            if match(rule, current, node) is None:
                raise ScriptedRedexInvalid(i, f"rule {rule_name} does not match at {list(pos)}")
        else:
            redexes = find_redexes(grs, current)
            if not redexes:
                termination = NORMAL_FORM
                break
            rule_name, node = redexes[0]
            rule = grs.rule(rule_name)
        step = reduce_step(current, rule, node)
        steps.append(step)
        current = step.target
        if not scripted:
            if current in seen:
                termination = CYCLE_DETECTED
                cycle_start = seen[current]
                break
            seen[current] = len(steps)
    return Trace(canonicalize(g), tuple(steps), termination, cycle_start)


def unravel_rule(rule: Rule, depth_bound: int | None = None) -> tuple[Term, Term]:
    """The rule's two sides as term trees with variables.

    Cyclic sides need a finite depth bound and are cut with ``bot`` there;
    without a bound they are an error.
    """

    def expand(n: Node, remaining: int | None, on_path: frozenset) -> Term:
        if remaining is not None and remaining == 0:
            return Term(BOT)
        if n in on_path and remaining is None:
            raise CyclicRuleNeedsBound(f"rule {rule.name} is cyclic; pass a depth bound")
        nxt = None if remaining is None else remaining - 1
        return Term(rule.lab[n], tuple(expand(s, nxt, on_path | {n}) for s in rule.suc[n]))

    return (
        expand(rule.lhs_root, depth_bound, frozenset()),
        expand(rule.rhs_root, depth_bound, frozenset()),
    )
