"""Matplotlib renderings of evaluation tables, written to files.

Every function takes an already-aggregated table and a target path; no
figure state leaks between calls. The Agg backend is forced so report
runs work headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .evaluation import BandTable, CountMatrix  # noqa: E402
from .render import display_label  # noqa: E402


def save_band_table_figure(table: BandTable, title: str, path: str) -> None:
    """Grouped bars of cumulative percentages, one group per column."""
    columns = table.columns()
    populated = {k: r for k, r in table.rows.items() if r.n > 0}
    fig, ax = plt.subplots(figsize=(7, 4))
    width = 0.8 / max(len(populated), 1)
    for i, (key, row) in enumerate(populated.items()):
        xs = [j + i * width for j in range(len(columns))]
        ys = [row.cumulative[c].percent for c in columns]
        ax.bar(xs, ys, width=width, label=f"{display_label(key)} (n={row.n})")
    ax.set_xticks([j + 0.4 - width / 2 for j in range(len(columns))])
    ax.set_xticklabels([display_label(c) for c in columns])
    ax.set_ylim(0, 100)
    ax.set_ylabel("Cumulative share of comparisons (%)")
    ax.set_title(title)
    ax.legend(loc="lower right", fontsize=8)
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_matrix_figure(
    matrix: CountMatrix, title: str, path: str, left_name: str = "", right_name: str = ""
) -> None:
    """Heatmap of a count matrix with the counts printed in the cells."""
    data = [list(row) for row in matrix.counts]
    fig, ax = plt.subplots(figsize=(6, 5))
    image = ax.imshow(data, cmap="Blues")
    ax.set_xticks(range(len(matrix.col_labels)))
    ax.set_xticklabels([display_label(c) for c in matrix.col_labels], rotation=30, ha="right")
    ax.set_yticks(range(len(matrix.row_labels)))
    ax.set_yticklabels([display_label(r) for r in matrix.row_labels])
    if right_name:
        ax.set_xlabel(right_name)
    if left_name:
        ax.set_ylabel(left_name)
    peak = max((max(row) for row in data), default=0)
    for i, row in enumerate(data):
        for j, count in enumerate(row):
            color = "white" if peak and count > peak / 2 else "black"
            ax.text(j, i, str(count), ha="center", va="center", color=color)
    ax.set_title(title)
    fig.colorbar(image, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
