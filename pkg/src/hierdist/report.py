"""Assembles a full evaluation run into report files.

One run ingests the terminology, loads the annotations, computes every
configured coder comparison once, and derives all aggregate tables from
those shared rows. Outputs: a schema-versioned JSON document holding
everything (exact rationals included), a combined CSV of per-example
comparison rows, optional markdown tables, and optional figures. Output
is deterministic: identical inputs produce byte-identical JSON.
"""

from __future__ import annotations

import csv
import io
import json
import os
import re

from .config import RunConfig
from .errors import ConfigError, IngestIOError, MissingRating, UnknownCoder
from .evaluation import (
    AnnotationSet,
    ComparisonRow,
    ExclusionRecord,
    band_table,
    acceptability_summary,
    cross_band_matrix,
    distance_vs_rating,
    load_annotations,
    micro_average,
    pair_comparison,
    rating_crosstab,
)
from .hierarchy import FocusView, focus_subgraph
from .ingest import IngestReport, ingest
from .render import render_acceptability, render_band_table, render_matrix

SCHEMA_VERSION = 1

# Two denominator conventions for the average minimum distance are in
# circulation and disagree whenever the compared sets overlap, so every
# report states which one produced its numbers.
POLICY_NOTE = (
    "The set-distance denominator is configurable because two conventions "
    "exist and disagree on overlapping sets: 'term_count' divides the summed "
    "minimum distances by |X|+|Y| (the number of terms in the sum), while "
    "'set_union' divides by |X union Y|. Values are only comparable between "
    "runs using the same policy; see the 'policy' field of this run's config."
)

ROWS_CSV_HEADER = (
    "left_coder",
    "right_coder",
    "example_id",
    "left_codes",
    "right_codes",
    "numerator",
    "denominator",
    "value",
    "stratum",
    "band",
)


class ReportRun:
    """All computed artifacts of one report run, ready to serialize."""

    def __init__(self, config: RunConfig):
        self.config = config
        result = ingest(config.ingest)
        self.graph = result.graph
        self.ingest_report: IngestReport = result.report
        self.view: FocusView = focus_subgraph(
            self.graph, config.focus_root, inclusive=config.focus_inclusive
        )
        try:
            with open(config.annotations_path, "r", encoding="utf-8", newline="") as stream:
                self.annotations: AnnotationSet = load_annotations(stream)
        except OSError as exc:
            raise IngestIOError(config.annotations_path, exc) from exc
        self._pair_rows: dict[tuple[str, str], tuple[list[ComparisonRow], list[ExclusionRecord]]] = {}

    def rows_for(self, left: str, right: str) -> tuple[list[ComparisonRow], list[ExclusionRecord]]:
        key = (left, right)
        if key not in self._pair_rows:
            self._pair_rows[key] = pair_comparison(
                self.annotations,
                left,
                right,
                self.view,
                policy=self.config.policy,
                thresholds=self.config.thresholds,
            )
        return self._pair_rows[key]

    def document(self) -> dict:
        """The complete report as one JSON-serializable dict."""
        config = self.config
        comparisons = []
        for left, right in config.comparisons:
            rows, exclusions = self.rows_for(left, right)
            comparisons.append(
                {
                    "left": left,
                    "right": right,
                    "rows": [row.as_dict() for row in rows],
                    "exclusions": [record.as_dict() for record in exclusions],
                    "band_table": band_table(rows, config.thresholds).as_dict(),
                }
            )

        micro = {}
        for name, pairs in config.micro_average_groups.items():
            row_lists = [self.rows_for(left, right)[0] for left, right in pairs]
            micro[name] = {
                "comparisons": [list(pair) for pair in pairs],
                "band_table": micro_average(row_lists, config.thresholds).as_dict(),
            }

        matrices = []
        for left, right, reference in config.similarity_matrices:
            left_rows, _ = self.rows_for(left, reference)
            right_rows, _ = self.rows_for(right, reference)
            matrix = cross_band_matrix(left_rows, right_rows, config.thresholds)
            matrices.append(
                {"left": left, "right": right, "reference": reference, "matrix": matrix.as_dict()}
            )

        crosstabs = []
        for left, right in config.rating_crosstabs:
            for coder in (left, right):
                if not self.annotations.has_coder(coder):
                    raise UnknownCoder(coder)
            matrix = rating_crosstab(
                self.annotations.ratings_of(left), self.annotations.ratings_of(right)
            )
            crosstabs.append({"left": left, "right": right, "matrix": matrix.as_dict()})

        acceptability = None
        if config.acceptability_coders:
            ratings_by_coder = {}
            for coder in config.acceptability_coders:
                if not self.annotations.has_coder(coder):
                    raise UnknownCoder(coder)
                ratings = [
                    r for r in self.annotations.ratings_of(coder).values() if r is not None
                ]
                if not ratings:
                    raise ConfigError(f"coder {coder!r} has no rated examples")
                ratings_by_coder[coder] = ratings
            acceptability = acceptability_summary(ratings_by_coder).as_dict()

        dvr = None
        if config.distance_vs_rating is not None:
            reference, coders = config.distance_vs_rating
            pairs = []
            compared = 0
            for coder in coders:
                rows, _ = self.rows_for(coder, reference)
                compared += len(rows)
                for row in rows:
                    rating = self.annotations.rating_of(row.example_id, coder)
                    if rating is None:
                        raise MissingRating(row.example_id, coder)
                    pairs.append((row, rating))
            table = distance_vs_rating(pairs, config.thresholds)
            dvr = {
                "reference": reference,
                "coders": list(coders),
                "rows_compared": compared,
                "table": table.as_dict(),
            }

        return {
            "schema_version": SCHEMA_VERSION,
            "policy_note": POLICY_NOTE,
            "config": config.as_dict(),
            "ingest_report": self.ingest_report.as_dict(),
            "focus": {
                "root": config.focus_root,
                "inclusive": config.focus_inclusive,
                "member_count": len(self.view.members),
            },
            "comparisons": comparisons,
            "micro_averages": micro,
            "similarity_matrices": matrices,
            "rating_crosstabs": crosstabs,
            "acceptability": acceptability,
            "distance_vs_rating": dvr,
        }

    def rows_csv(self) -> str:
        """All per-example comparison rows as one delimited table."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(ROWS_CSV_HEADER)
        for left, right in self.config.comparisons:
            rows, _ = self.rows_for(left, right)
            for row in rows:
                writer.writerow(
                    (
                        left,
                        right,
                        row.example_id,
                        "|".join(str(c) for c in row.left_set.sorted()),
                        "|".join(str(c) for c in row.right_set.sorted()),
                        row.distance.numerator,
                        row.distance.denominator,
                        str(row.distance.value),
                        row.stratum.value,
                        row.band,
                    )
                )
        return buffer.getvalue()

    def markdown(self, document: dict) -> str:
        sections = [f"# Agreement evaluation report\n"]
        for entry in document["comparisons"]:
            table = band_table(
                self.rows_for(entry["left"], entry["right"])[0], self.config.thresholds
            )
            sections.append(
                render_band_table(
                    table, f"Distance bands: {entry['left']} vs {entry['right']}"
                )
            )
        for name, entry in document["micro_averages"].items():
            pairs = [tuple(p) for p in entry["comparisons"]]
            row_lists = [self.rows_for(left, right)[0] for left, right in pairs]
            table = micro_average(row_lists, self.config.thresholds)
            pair_text = ", ".join(f"{left} vs {right}" for left, right in pairs)
            sections.append(render_band_table(table, f"Micro-average {name} ({pair_text})"))
        for entry in document["similarity_matrices"]:
            left_rows, _ = self.rows_for(entry["left"], entry["reference"])
            right_rows, _ = self.rows_for(entry["right"], entry["reference"])
            matrix = cross_band_matrix(left_rows, right_rows, self.config.thresholds)
            sections.append(
                render_matrix(
                    matrix,
                    f"Similarity to {entry['reference']}: {entry['left']} (rows) vs "
                    f"{entry['right']} (columns)",
                )
            )
        for entry in document["rating_crosstabs"]:
            matrix = rating_crosstab(
                self.annotations.ratings_of(entry["left"]),
                self.annotations.ratings_of(entry["right"]),
            )
            sections.append(
                render_matrix(
                    matrix, f"Ratings: {entry['left']} (rows) vs {entry['right']} (columns)"
                )
            )
        if document["acceptability"] is not None:
            ratings_by_coder = {
                coder: [
                    r
                    for r in self.annotations.ratings_of(coder).values()
                    if r is not None
                ]
                for coder in self.config.acceptability_coders
            }
            sections.append(
                render_acceptability(
                    acceptability_summary(ratings_by_coder), "Clinical intent ratings"
                )
            )
        if document["distance_vs_rating"] is not None:
            reference, coders = self.config.distance_vs_rating
            pairs = []
            for coder in coders:
                rows, _ = self.rows_for(coder, reference)
                pairs.extend(
                    (row, self.annotations.rating_of(row.example_id, coder)) for row in rows
                )
            table = distance_vs_rating(pairs, self.config.thresholds)
            sections.append(
                render_band_table(
                    table, f"Distance to {reference} by rating (pooled: {', '.join(coders)})"
                )
            )
        return "\n".join(sections)

    def figures(self, document: dict, figures_dir: str) -> list[str]:
        # Imported lazily so report runs without figures never touch
        # matplotlib.
        from .figures import save_band_table_figure, save_matrix_figure

        os.makedirs(figures_dir, exist_ok=True)
        written = []
        for entry in document["comparisons"]:
            rows, _ = self.rows_for(entry["left"], entry["right"])
            table = band_table(rows, self.config.thresholds)
            name = f"bands_{_slug(entry['left'])}_vs_{_slug(entry['right'])}.png"
            path = os.path.join(figures_dir, name)
            save_band_table_figure(
                table, f"Distance bands: {entry['left']} vs {entry['right']}", path
            )
            written.append(path)
        for entry in document["similarity_matrices"]:
            left_rows, _ = self.rows_for(entry["left"], entry["reference"])
            right_rows, _ = self.rows_for(entry["right"], entry["reference"])
            matrix = cross_band_matrix(left_rows, right_rows, self.config.thresholds)
            name = (
                f"matrix_{_slug(entry['left'])}_{_slug(entry['right'])}"
                f"_vs_{_slug(entry['reference'])}.png"
            )
            path = os.path.join(figures_dir, name)
            save_matrix_figure(
                matrix,
                f"Similarity to {entry['reference']}",
                path,
                left_name=entry["left"],
                right_name=entry["right"],
            )
            written.append(path)
        for entry in document["rating_crosstabs"]:
            matrix = rating_crosstab(
                self.annotations.ratings_of(entry["left"]),
                self.annotations.ratings_of(entry["right"]),
            )
            name = f"ratings_{_slug(entry['left'])}_vs_{_slug(entry['right'])}.png"
            path = os.path.join(figures_dir, name)
            save_matrix_figure(
                matrix,
                "Rating cross-tabulation",
                path,
                left_name=entry["left"],
                right_name=entry["right"],
            )
            written.append(path)
        return written


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", text).strip("_") or "x"


def run_report(config: RunConfig) -> list[str]:
    """Execute a configured run and write its output files.

    Returns the written paths. Re-running with identical inputs
    overwrites each file with identical bytes.
    """
    run = ReportRun(config)
    document = run.document()
    os.makedirs(config.output_dir, exist_ok=True)
    written = []

    report_path = os.path.join(config.output_dir, "report.json")
    with open(report_path, "w", encoding="utf-8", newline="\n") as stream:
        json.dump(document, stream, indent=2, sort_keys=True)
        stream.write("\n")
    written.append(report_path)

    ingest_path = os.path.join(config.output_dir, "ingest_report.json")
    with open(ingest_path, "w", encoding="utf-8", newline="\n") as stream:
        stream.write(run.ingest_report.to_json())
        stream.write("\n")
    written.append(ingest_path)

    rows_path = os.path.join(config.output_dir, "comparison_rows.csv")
    with open(rows_path, "w", encoding="utf-8", newline="") as stream:
        stream.write(run.rows_csv())
    written.append(rows_path)

    if config.markdown:
        markdown_path = os.path.join(config.output_dir, "tables.md")
        with open(markdown_path, "w", encoding="utf-8", newline="\n") as stream:
            stream.write(run.markdown(document))
        written.append(markdown_path)

    if config.figures:
        written.extend(run.figures(document, os.path.join(config.output_dir, "figures")))

    return written
