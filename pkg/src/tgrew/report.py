"""Convergence report serialization and trace figures.

Reports print as ``key: value`` lines and serialize to JSON objects of the
shape {discipline, verdict, depth, limit, certificate?}.  The figure writer
renders the per-step evidence (redex depths, similarity depths between
consecutive graphs) to PNG files next to a CSV of the same series.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from . import metric
from .converge import BoundedRedexDepth, ConvergenceReport, DISCIPLINES
from .metric import OMEGA, PeriodicDivergence
from .rewrite import Trace
from .tgr import format_graph_inline


def certificate_json(cert: PeriodicDivergence | BoundedRedexDepth | None) -> dict | None:
    if cert is None:
        return None
    if isinstance(cert, PeriodicDivergence):
        return {
            "type": "periodic-distance",
            "start": cert.start,
            "period": cert.period,
            "indices": [cert.index_a, cert.index_b],
            "distance": f"2^-{cert.exponent}",
        }
    return {
        "type": "bounded-redex-depth",
        "start": cert.start,
        "period": cert.period,
        "bound": cert.bound,
    }


def certificate_text(cert: PeriodicDivergence | BoundedRedexDepth) -> str:
    data = certificate_json(cert)
    inner = " ".join(f"{k}={v}" for k, v in data.items() if k != "type")
    return f"{data['type']} {inner}"


def report_json(report: ConvergenceReport) -> dict:
    obj = {
        "discipline": report.discipline,
        "verdict": report.verdict,
        "depth": report.depth,
        "limit": format_graph_inline(report.limit, "limit") if report.limit is not None else None,
    }
    if report.certificate is not None:
        obj["certificate"] = certificate_json(report.certificate)
    return obj


def reports_json(reports: dict[str, ConvergenceReport]) -> list[dict]:
    return [report_json(reports[d]) for d in DISCIPLINES if d in reports]


def report_text(report: ConvergenceReport) -> str:
    lines = [f"discipline: {report.discipline}", f"verdict: {report.verdict}"]
    if report.depth is not None:
        lines.append(f"depth: {report.depth}")
    if report.limit is not None:
        lines.append(f"limit: {format_graph_inline(report.limit, 'limit')}")
    if report.certificate is not None:
        lines.append(f"certificate: {certificate_text(report.certificate)}")
    return "\n".join(lines)


def reports_text(reports: dict[str, ConvergenceReport]) -> str:
    return "\n\n".join(report_text(reports[d]) for d in DISCIPLINES if d in reports)


def reports_json_text(reports: dict[str, ConvergenceReport]) -> str:
    objs = reports_json(reports)
    return json.dumps(objs[0] if len(objs) == 1 else objs, indent=2)


def trace_evidence(trace: Trace) -> list[dict]:
    """Per-step series: rule, redex depth, similarity depth to the next graph."""
    graphs = trace.graphs()
    rows = []
    for i, step in enumerate(trace.steps):
        similarity = metric.similarity_depth(graphs[i], graphs[i + 1])
        rows.append(
            {
                "step": i,
                "rule": step.rule,
                "redex_depth": step.redex_depth,
                "similarity_depth": "omega" if similarity == OMEGA else int(similarity),
            }
        )
    return rows


def write_evidence_csv(trace: Trace, path: Path) -> None:
    rows = trace_evidence(trace)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=["step", "rule", "redex_depth", "similarity_depth"])
        writer.writeheader()
        writer.writerows(rows)


def write_figures(trace: Trace, outdir: str | Path) -> list[Path]:
    """Render the trace evidence to PNG files plus a CSV, in outdir."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = trace_evidence(trace)
    written = []

    steps = [r["step"] for r in rows]
    depths = [r["redex_depth"] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(steps, depths, marker="o", color="tab:blue")
    ax.set_xlabel("step")
    ax.set_ylabel("redex depth")
    ax.set_title("Redex depth per reduction step")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path = outdir / "redex_depths.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    cap = max((r["redex_depth"] for r in rows), default=0) + 2
    sims = [cap if r["similarity_depth"] == "omega" else r["similarity_depth"] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(steps, sims, marker="s", color="tab:orange")
    ax.set_xlabel("step")
    ax.set_ylabel("similarity depth to next graph")
    ax.set_title(f"Consecutive similarity depths (isomorphic capped at {cap})")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path = outdir / "similarity_depths.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    csv_path = outdir / "evidence.csv"
    write_evidence_csv(trace, csv_path)
    written.append(csv_path)
    return written
