"""Markdown rendering of evaluation tables.

Layouts follow the conventional reporting shapes for this kind of
evaluation: stratified cumulative-percentage tables, count matrices with
band or rating axes, and per-coder acceptability shares. Undefined
percentages (empty strata) render as an em dash.
"""

from __future__ import annotations

from .evaluation import (
    AcceptabilitySummary,
    BandTable,
    CountMatrix,
    CountShare,
)

DASH = "—"

_LABELS = {
    "all": "All",
    "single_finding": "Single-finding",
    "multi_finding": "Multi-finding",
    "exact": "Exact",
    "good": "Good",
    "acceptable": "Acceptable",
    "not_acceptable": "Not acceptable",
    "good_or_acceptable": "Good or Acceptable",
}


def display_label(key: str) -> str:
    return _LABELS.get(key, key)


def _pct(share: CountShare) -> str:
    return DASH if share.percent is None else str(share.percent)


def _markdown_table(header: list[str], rows: list[list[str]]) -> str:
    lines = [
        "| " + " | ".join(header) + " |",
        "|" + "|".join("---" for _ in header) + "|",
    ]
    lines.extend("| " + " | ".join(row) + " |" for row in rows)
    return "\n".join(lines) + "\n"


def render_band_table(table: BandTable, title: str) -> str:
    """One row per stratum (or rating), cumulative percent columns."""
    header = ["", "n", "Exact match (%)"] + [
        f"{col} (%)" for col in table.columns()[1:]
    ]
    body = []
    for key, row in table.rows.items():
        cells = [display_label(key), str(row.n)]
        cells.extend(_pct(row.cumulative[col]) for col in table.columns())
        body.append(cells)
    return f"### {title}\n\n" + _markdown_table(header, body)


def render_matrix(matrix: CountMatrix, title: str, corner: str = "") -> str:
    """Raw-count matrix; rows are the left coder, columns the right."""
    header = [corner] + [display_label(c) for c in matrix.col_labels]
    body = []
    for label, counts in zip(matrix.row_labels, matrix.counts):
        body.append([display_label(label)] + [str(c) for c in counts])
    note = f"Total cases: {matrix.total()} (counts, not percentages)\n"
    return f"### {title}\n\n" + _markdown_table(header, body) + "\n" + note


def render_acceptability(summary: AcceptabilitySummary, title: str) -> str:
    header = [
        "",
        "n",
        "Good (%)",
        "Acceptable (%)",
        "Good or Acceptable (%)",
        "Not acceptable (%)",
    ]
    order = ["good", "acceptable", "good_or_acceptable", "not_acceptable"]
    body = []
    for coder, row in summary.coders.items():
        body.append([coder, str(row.n)] + [_pct(row.shares[k]) for k in order])
    avg = summary.micro_average
    body.append(["Micro-average", str(avg.n)] + [_pct(avg.shares[k]) for k in order])
    return f"### {title}\n\n" + _markdown_table(header, body)
