"""Classify reduction traces under the four convergence disciplines.

Weak analysis looks at the sequence of whole graphs, through the metric
limit or the limit inferior.  Strong analysis additionally constrains the
redexes: metrically their depths must grow beyond every bound, and on the
order side the limit is formed from the reduction contexts instead.

A finite trace can certify divergence (a periodic tail keeps recurring) or
support convergence up to a depth, but never prove convergence of an
arbitrary continuation, so verdicts carry their epistemic status.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from . import metric, order
from .core import CanonicalTermGraph, canonicalize, detect_periodic_tail, is_total, is_total_to_depth, iso
from .metric import PeriodicDivergence, truncate
from .rewrite import CYCLE_DETECTED, Trace

WEAK_M = "weak-m"
WEAK_P = "weak-p"
STRONG_M = "strong-m"
STRONG_P = "strong-p"
DISCIPLINES = (WEAK_M, WEAK_P, STRONG_M, STRONG_P)

CONVERGED_EXACT = "converged-exact"
CONVERGED_TO_DEPTH = "converged-to-depth"
DIVERGED = "diverged"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class BoundedRedexDepth:
    """Witness that redex depths cannot tend to infinity: the trace tail is
    periodic and keeps contracting at depth at most ``bound``."""

    start: int
    period: int
    bound: int

    def replay(self, graphs: list[CanonicalTermGraph], depths: list[int]) -> bool:
        for i in range(self.start, len(graphs) - self.period):
            if graphs[i] != graphs[i + self.period]:
                return False
        tail = depths[self.start:]
        return bool(tail) and max(tail) <= self.bound


@dataclass(frozen=True)
class ConvergenceReport:
    discipline: str
    verdict: str
    depth: int | None = None
    limit: CanonicalTermGraph | None = None
    certificate: PeriodicDivergence | BoundedRedexDepth | None = None
    evidence: dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def converged(self) -> bool:
        return self.verdict in (CONVERGED_EXACT, CONVERGED_TO_DEPTH)


def _unrolled(trace: Trace, depth_bound: int, window: int):
    """Graph/depth/context sequences, extended along a certified cycle.

    When the run stopped because a state recurred, the continuation is
    known: the cycle's steps repeat forever.  Unrolling a few more periods
    lets the ordinary detectors see the periodicity.
    """
    graphs = trace.graphs()
    depths = [s.redex_depth for s in trace.steps]
    contexts = [s.context for s in trace.steps]
    if trace.termination == CYCLE_DETECTED and trace.cycle_start is not None:
        period = len(trace.steps) - trace.cycle_start
        extra = 2 * period + window + 2
        for k in range(extra):
            i = trace.cycle_start + (k % period)
            graphs.append(graphs[i + 1])
            depths.append(depths[i])
            contexts.append(contexts[i])
    return graphs, depths, contexts


def _closed_report(trace: Trace, discipline: str) -> ConvergenceReport:
    final = trace.graphs()[-1]
    return ConvergenceReport(discipline, CONVERGED_EXACT, limit=final, evidence={"closed": True})


def _from_limit(discipline: str, result: metric.LimitResult, evidence: dict) -> ConvergenceReport:
    if result.status == order.EXACT:
        return ConvergenceReport(discipline, CONVERGED_EXACT, limit=result.approximant, evidence=evidence)
    if result.status == order.STABLE:
        return ConvergenceReport(
            discipline, CONVERGED_TO_DEPTH, depth=result.depth, limit=result.approximant, evidence=evidence
        )
    if result.status == metric.DIVERGENT:
        return ConvergenceReport(discipline, DIVERGED, certificate=result.certificate, evidence=evidence)
    return ConvergenceReport(discipline, INCONCLUSIVE, evidence=evidence)


def _from_liminf(discipline: str, result: order.LiminfResult, evidence: dict) -> ConvergenceReport:
    evidence = dict(evidence, beta=result.beta)
    if result.status == order.EXACT:
        return ConvergenceReport(discipline, CONVERGED_EXACT, limit=result.approximant, evidence=evidence)
    if result.status == order.STABLE:
        return ConvergenceReport(
            discipline, CONVERGED_TO_DEPTH, depth=result.depth, limit=result.approximant, evidence=evidence
        )
    return ConvergenceReport(discipline, INCONCLUSIVE, evidence=evidence)


def analyze_weak_m(
    trace: Trace, depth_bound: int = order.DEFAULT_DEPTH, window: int = order.DEFAULT_WINDOW
) -> ConvergenceReport:
    """Metric limit of the graph sequence."""
    if trace.closed:
        return _closed_report(trace, WEAK_M)
    graphs, _, _ = _unrolled(trace, depth_bound, window)
    evidence = {"similarity_depths": _consecutive_depths(graphs)}
    return _from_limit(WEAK_M, metric.metric_limit(graphs, depth_bound, window), evidence)


def analyze_weak_p(
    trace: Trace, depth_bound: int = order.DEFAULT_DEPTH, window: int = order.DEFAULT_WINDOW
) -> ConvergenceReport:
    """Limit inferior of the graph sequence."""
    if trace.closed:
        return _closed_report(trace, WEAK_P)
    graphs, _, _ = _unrolled(trace, depth_bound, window)
    return _from_liminf(WEAK_P, order.liminf(graphs, depth_bound, window), {})


def analyze_strong_m(
    trace: Trace, depth_bound: int = order.DEFAULT_DEPTH, window: int = order.DEFAULT_WINDOW
) -> ConvergenceReport:
    """Metric limit plus the requirement that redex depths grow without bound.

    On a periodic tail the recurring redex depth is bounded, which refutes
    growth outright.  Otherwise the trace must both converge weakly and
    exhibit depths that exceed every threshold up to the depth bound.
    """
    if trace.closed:
        return _closed_report(trace, STRONG_M)
    graphs, depths, _ = _unrolled(trace, depth_bound, window)
    evidence = {"redex_depths": depths}
    tail = None
    if trace.steps:
        tail = _periodic_steps(graphs, depths)
    if tail is not None:
        start, period = tail
        cert = BoundedRedexDepth(start, period, max(depths[start:]))
        return ConvergenceReport(STRONG_M, DIVERGED, certificate=cert, evidence=evidence)
    weak = _from_limit(STRONG_M, metric.metric_limit(graphs, depth_bound, window), evidence)
    if weak.converged and _eventually_exceeds(depths, depth_bound):
        limit = weak.limit if weak.verdict == CONVERGED_TO_DEPTH else truncate(weak.limit, depth_bound)
        return ConvergenceReport(
            STRONG_M, CONVERGED_TO_DEPTH, depth=depth_bound, limit=canonicalize(limit), evidence=evidence
        )
    return ConvergenceReport(STRONG_M, INCONCLUSIVE, evidence=evidence)


def analyze_strong_p(
    trace: Trace, depth_bound: int = order.DEFAULT_DEPTH, window: int = order.DEFAULT_WINDOW
) -> ConvergenceReport:
    """Limit inferior of the reduction contexts."""
    if trace.closed:
        return _closed_report(trace, STRONG_P)
    graphs, _, contexts = _unrolled(trace, depth_bound, window)
    if not contexts:
        return ConvergenceReport(STRONG_P, INCONCLUSIVE, evidence={"note": "no steps"})
    return _from_liminf(STRONG_P, order.liminf(contexts, depth_bound, window), {})


def analyze_all(
    trace: Trace, depth_bound: int = order.DEFAULT_DEPTH, window: int = order.DEFAULT_WINDOW
) -> dict[str, ConvergenceReport]:
    return {
        WEAK_M: analyze_weak_m(trace, depth_bound, window),
        WEAK_P: analyze_weak_p(trace, depth_bound, window),
        STRONG_M: analyze_strong_m(trace, depth_bound, window),
        STRONG_P: analyze_strong_p(trace, depth_bound, window),
    }


def _consecutive_depths(graphs) -> list[int | float]:
    return [metric.similarity_depth(a, b) for a, b in zip(graphs, graphs[1:])]


def _periodic_steps(graphs, depths) -> tuple[int, int] | None:
    """Periodic tail of the step sequence: graph and redex depth together."""
    pairs = list(zip(graphs[:-1], depths))
    return detect_periodic_tail(pairs) if pairs else None


def _eventually_exceeds(depths: list[int], bound: int) -> bool:
    best = None
    low = None
    for d in reversed(depths):
        low = d if low is None else min(low, d)
        best = low if best is None else max(best, low)
    return best is not None and best > bound


@dataclass(frozen=True)
class CrossCheck:
    """Consistency of the four verdicts on one trace."""

    checks: tuple[tuple[str, bool, str], ...]

    @property
    def ok(self) -> bool:
        return all(passed for _, passed, _ in self.checks)

    def failures(self) -> list[str]:
        return [f"{name}: {detail}" for name, passed, detail in self.checks if not passed]


def cross_check(
    trace: Trace, depth_bound: int = order.DEFAULT_DEPTH, window: int = order.DEFAULT_WINDOW
) -> CrossCheck:
    """Check the relations the theory imposes between the disciplines.

    Weak metric convergence must imply weak order convergence with the same
    limit, and the strong disciplines must agree whenever the strong order
    limit is total (up to the analysis depth).
    """
    reports = analyze_all(trace, depth_bound, window)
    rm, rp = reports[WEAK_M], reports[WEAK_P]
    sm, sp = reports[STRONG_M], reports[STRONG_P]
    checks: list[tuple[str, bool, str]] = []

    if rm.converged:
        same = rp.converged and _limits_agree(rm, rp, depth_bound)
        checks.append(("weak-m implies weak-p", same, f"weak-p verdict {rp.verdict}"))
        if rm.verdict == CONVERGED_EXACT:
            exact = rp.verdict == CONVERGED_EXACT and iso(rm.limit, rp.limit)
            checks.append(("exact metric limit is exact liminf", exact, f"weak-p verdict {rp.verdict}"))

    sp_total = sp.converged and _limit_total(sp)
    if sm.converged:
        ok = sp_total and _limits_agree(sm, sp, depth_bound)
        checks.append(("strong-m implies total strong-p", ok, f"strong-p verdict {sp.verdict}"))
    if sp_total:
        ok = sm.converged and _limits_agree(sm, sp, depth_bound)
        checks.append(("total strong-p implies strong-m", ok, f"strong-m verdict {sm.verdict}"))

    if not checks:
        checks.append(("no cross-discipline obligations", True, ""))
    return CrossCheck(tuple(checks))


def _limit_total(report: ConvergenceReport) -> bool:
    if report.limit is None:
        return False
    if report.verdict == CONVERGED_EXACT:
        return is_total(report.limit)
    return is_total_to_depth(report.limit, report.depth)


def _limits_agree(a: ConvergenceReport, b: ConvergenceReport, depth_bound: int) -> bool:
    if a.limit is None or b.limit is None:
        return False
    depths = [r.depth for r in (a, b) if r.depth is not None]
    if not depths:
        return iso(a.limit, b.limit)
    d = min(depths)
    return canonicalize(truncate(a.limit, d)) == canonicalize(truncate(b.limit, d))
