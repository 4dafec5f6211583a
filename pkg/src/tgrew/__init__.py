"""tgrew: finite term graphs, rewriting, and convergence analysis."""

from .core import (
    BOT,
    ArityMismatch,
    CanonicalTermGraph,
    DanglingSuccessor,
    EmptyInput,
    NoSuchNode,
    Signature,
    TermGraph,
    TermGraphError,
    UnknownSymbol,
    UnreachableNode,
    bisimilar,
    canonicalize,
    collapse,
    delta_hom,
    depth,
    is_total,
    is_tree,
    is_variable,
    iso,
    positions_up_to,
    subgraph,
    unravel_to_depth,
    validate,
)
from .converge import (
    ConvergenceReport,
    analyze_all,
    analyze_strong_m,
    analyze_strong_p,
    analyze_weak_m,
    analyze_weak_p,
    cross_check,
)
from .dot import export_dot
from .metric import OMEGA, Distance, dist, metric_limit, similarity_depth, truncate
from .order import PartialTermGraph, glb2, glb_set, leq_bot, liminf, local_truncate
from .rewrite import (
    Grs,
    NoMatch,
    Rule,
    Script,
    Step,
    Trace,
    find_redexes,
    match,
    pre_reduce,
    reduce_step,
    run,
    unravel_rule,
    validate_rule,
)
from .terms import Term, dd, leq_bot_term, parse_term, term, term_rewrite_step
from .tgr import Document, ParseError, format_document, format_graph, parse

__version__ = "0.1.0"
