"""Deterministic DOT export for term graphs."""

from __future__ import annotations

from .core import TermGraph, canonicalize


def export_dot(g: TermGraph, name: str = "termgraph") -> str:
    """Render the canonical form of g as a DOT digraph.

    Node ids follow canonical naming and edges carry their successor index,
    so equal canonical graphs produce byte-identical output.
    """
    g = canonicalize(g)
    lines = [f"digraph {name} {{", "  node [shape=oval];"]
    for n in g.nodes:
        shape = ', penwidth=2' if n == g.root else ""
        lines.append(f'  n{n} [label="{g.lab(n)}"{shape}];')
    for n in g.nodes:
        for i, s in enumerate(g.suc(n)):
            lines.append(f'  n{n} -> n{s} [label="{i}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
