"""Readers that turn terminology release files into hierarchy graphs.

Two sources are supported: SNOMED CT RF2 snapshot files (tab-separated
concept and relationship tables) and a plain edge-list CSV used for
synthetic or test ontologies. Both feed :func:`hierdist.hierarchy.
build_hierarchy`, which owns structural validation; the parsers here
only enforce line-level well-formedness.

Parsing is strict by default: a malformed line aborts with its line
number, because terminology releases are machine-generated and a bad
line almost always means the wrong file was supplied. Lenient mode
skips bad lines and counts them in the ingest report instead.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Iterable, TextIO

from .errors import IngestIOError, MalformedLine
from .hierarchy import Edge, HierarchyGraph, build_hierarchy

IS_A_TYPE_ID = 116680003
INFERRED_CHARACTERISTIC_ID = 900000000000011006
STATED_CHARACTERISTIC_ID = 900000000000010007

RELATIONSHIP_SELECTORS = ("inferred", "stated", "any")

EDGE_LIST_HEADER = ("child_id", "parent_id")


@dataclass(frozen=True)
class ConceptRow:
    id: int
    active: bool


@dataclass(frozen=True)
class IngestConfig:
    """Where and how to read a terminology.

    `source_kind` is ``"rf2_snapshot"`` (needs `concept_path`,
    `relationship_path`, and a `relationship_selector`) or
    ``"edge_list"`` (needs `edge_path`; concepts are the edge
    endpoints).
    """

    source_kind: str
    concept_path: str | None = None
    relationship_path: str | None = None
    edge_path: str | None = None
    relationship_selector: str = "inferred"
    include_inactive: bool = False
    lenient: bool = False

    @classmethod
    def rf2(
        cls,
        concept_path: str,
        relationship_path: str,
        relationship_selector: str = "inferred",
        include_inactive: bool = False,
        lenient: bool = False,
    ) -> "IngestConfig":
        return cls(
            source_kind="rf2_snapshot",
            concept_path=concept_path,
            relationship_path=relationship_path,
            relationship_selector=relationship_selector,
            include_inactive=include_inactive,
            lenient=lenient,
        )

    @classmethod
    def edge_list(cls, edge_path: str, lenient: bool = False) -> "IngestConfig":
        return cls(source_kind="edge_list", edge_path=edge_path, lenient=lenient)

    def validate(self) -> None:
        if self.source_kind == "rf2_snapshot":
            if not self.concept_path or not self.relationship_path:
                raise ValueError("rf2_snapshot sources need concept and relationship paths")
            if self.relationship_selector not in RELATIONSHIP_SELECTORS:
                raise ValueError(
                    f"relationship_selector must be one of {RELATIONSHIP_SELECTORS}, "
                    f"got {self.relationship_selector!r}"
                )
        elif self.source_kind == "edge_list":
            if not self.edge_path:
                raise ValueError("edge_list sources need an edge path")
        else:
            raise ValueError(f"unknown source_kind {self.source_kind!r}")

    def as_dict(self) -> dict:
        d = {"source_kind": self.source_kind, "lenient": self.lenient}
        if self.source_kind == "rf2_snapshot":
            d.update(
                concept_path=self.concept_path,
                relationship_path=self.relationship_path,
                relationship_selector=self.relationship_selector,
                include_inactive=self.include_inactive,
            )
        else:
            d["edge_path"] = self.edge_path
        return d


@dataclass
class IngestReport:
    """Bookkeeping for one ingest run, emitted as JSON alongside the graph."""

    concepts_read: int = 0
    inactive_excluded: int = 0
    edges_read: int = 0
    edges_dropped: int = 0
    malformed_lines: int = 0

    def as_dict(self) -> dict:
        return {
            "concepts_read": self.concepts_read,
            "inactive_excluded": self.inactive_excluded,
            "edges_read": self.edges_read,
            "edges_dropped": self.edges_dropped,
            "malformed_lines": self.malformed_lines,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)


@dataclass
class IngestResult:
    graph: HierarchyGraph
    report: IngestReport


def _rf2_header(first_line: str | None, needed: Iterable[str]) -> dict[str, int]:
    if first_line is None:
        raise MalformedLine(1, "empty file, expected an RF2 header line")
    names = first_line.rstrip("\r\n").split("\t")
    if not names or names[0] != "id":
        raise MalformedLine(1, f"expected an RF2 header starting with 'id', got {names[:1]!r}")
    index = {name: i for i, name in enumerate(names)}
    for name in needed:
        if name not in index:
            raise MalformedLine(1, f"RF2 header is missing the {name!r} column")
    return index


def _parse_sctid(text: str, line_no: int, column: str) -> int:
    if not text.isdigit() or int(text) <= 0:
        raise MalformedLine(line_no, f"{column} {text!r} is not a positive integer")
    return int(text)


def parse_rf2_concepts(
    stream: TextIO, lenient: bool = False
) -> tuple[list[ConceptRow], int]:
    """Parse an RF2 concept snapshot into (rows, malformed-line count).

    A row is active iff its `active` column is exactly "1". In strict
    mode (default) a malformed line raises :class:`MalformedLine`; in
    lenient mode it is skipped and counted.
    """
    index = _rf2_header(next(stream, None), ("id", "active"))
    width = max(index["id"], index["active"]) + 1
    rows: list[ConceptRow] = []
    malformed = 0
    for line_no, line in enumerate(stream, start=2):
        if not line.strip():
            continue
        fields = line.rstrip("\r\n").split("\t")
        try:
            if len(fields) < width:
                raise MalformedLine(line_no, f"expected at least {width} columns, got {len(fields)}")
            concept_id = _parse_sctid(fields[index["id"]], line_no, "id")
        except MalformedLine:
            if not lenient:
                raise
            malformed += 1
            continue
        rows.append(ConceptRow(id=concept_id, active=fields[index["active"]] == "1"))
    return rows, malformed


def parse_rf2_relationships(
    stream: TextIO, selector: str = "inferred", lenient: bool = False
) -> tuple[list[Edge], int]:
    """Parse an RF2 relationship snapshot into is-a edges.

    Only rows that are active, whose typeId is the is-a identifier
    (116680003), and whose characteristicTypeId matches `selector`
    ("inferred", "stated", or "any") yield a (sourceId, destinationId)
    edge; everything else is ignored, not an error.
    """
    if selector not in RELATIONSHIP_SELECTORS:
        raise ValueError(f"selector must be one of {RELATIONSHIP_SELECTORS}, got {selector!r}")
    wanted = {
        "inferred": {str(INFERRED_CHARACTERISTIC_ID)},
        "stated": {str(STATED_CHARACTERISTIC_ID)},
        "any": {str(INFERRED_CHARACTERISTIC_ID), str(STATED_CHARACTERISTIC_ID)},
    }[selector]

    needed = ("id", "active", "sourceId", "destinationId", "typeId", "characteristicTypeId")
    index = _rf2_header(next(stream, None), needed)
    width = max(index[name] for name in needed) + 1
    edges: list[Edge] = []
    malformed = 0
    for line_no, line in enumerate(stream, start=2):
        if not line.strip():
            continue
        fields = line.rstrip("\r\n").split("\t")
        try:
            if len(fields) < width:
                raise MalformedLine(line_no, f"expected at least {width} columns, got {len(fields)}")
            if fields[index["active"]] != "1":
                continue
            if fields[index["typeId"]] != str(IS_A_TYPE_ID):
                continue
            if fields[index["characteristicTypeId"]] not in wanted:
                continue
            child = _parse_sctid(fields[index["sourceId"]], line_no, "sourceId")
            parent = _parse_sctid(fields[index["destinationId"]], line_no, "destinationId")
        except MalformedLine:
            if not lenient:
                raise
            malformed += 1
            continue
        edges.append((child, parent))
    return edges, malformed


def parse_edge_list(stream: TextIO, lenient: bool = False) -> tuple[list[Edge], int]:
    """Parse a `child_id,parent_id` CSV into edges, blank lines ignored.

    The parser only checks that both cells are positive integers;
    self-edges, duplicates, and cycles are left for graph construction
    to reject.
    """
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != EDGE_LIST_HEADER:
        raise MalformedLine(1, f"expected header {','.join(EDGE_LIST_HEADER)!r}, got {header!r}")
    edges: list[Edge] = []
    malformed = 0
    for row in reader:
        line_no = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        try:
            if len(row) != 2:
                raise MalformedLine(line_no, f"expected 2 columns, got {len(row)}")
            child = _parse_sctid(row[0].strip(), line_no, "child_id")
            parent = _parse_sctid(row[1].strip(), line_no, "parent_id")
        except MalformedLine:
            if not lenient:
                raise
            malformed += 1
            continue
        edges.append((child, parent))
    return edges, malformed


def ingest(config: IngestConfig) -> IngestResult:
    """Read, filter, and validate a terminology into a hierarchy graph.

    For RF2 sources, inactive concepts are excluded (unless
    `include_inactive`) and edges that reference an excluded or unknown
    concept are dropped and counted. For edge lists, the concept set is
    exactly the set of edge endpoints.

    Raises :class:`IngestIOError` for unreadable files and propagates
    parser and graph-validation errors unchanged.
    """
    config.validate()
    report = IngestReport()
    if config.source_kind == "edge_list":
        with _open(config.edge_path) as stream:
            edges, malformed = parse_edge_list(stream, lenient=config.lenient)
        report.malformed_lines += malformed
        report.edges_read = len(edges)
        concepts = {c for edge in edges for c in edge}
        report.concepts_read = len(concepts)
        graph = build_hierarchy(concepts, edges)
        return IngestResult(graph, report)

    with _open(config.concept_path) as stream:
        concept_rows, malformed = parse_rf2_concepts(stream, lenient=config.lenient)
    report.malformed_lines += malformed
    report.concepts_read = len(concept_rows)

    kept_concepts = set()
    for row in concept_rows:
        if row.active or config.include_inactive:
            kept_concepts.add(row.id)
        else:
            report.inactive_excluded += 1

    with _open(config.relationship_path) as stream:
        edges, malformed = parse_rf2_relationships(
            stream, selector=config.relationship_selector, lenient=config.lenient
        )
    report.malformed_lines += malformed
    report.edges_read = len(edges)

    kept_edges = []
    for child, parent in edges:
        if child in kept_concepts and parent in kept_concepts:
            kept_edges.append((child, parent))
        else:
            report.edges_dropped += 1

    graph = build_hierarchy(kept_concepts, kept_edges)
    return IngestResult(graph, report)


def write_edge_list(graph: HierarchyGraph, stream: TextIO) -> None:
    """Serialize a graph as a `child_id,parent_id` CSV, edges sorted.

    The format carries concepts implicitly as edge endpoints, so graphs
    with isolated concepts cannot round-trip; they are rejected here
    rather than silently narrowed.
    """
    connected = {c for edge in graph.edges for c in edge}
    isolated = graph.concepts - connected
    if isolated:
        sample = sorted(isolated)[:5]
        raise ValueError(
            f"{len(isolated)} concept(s) have no edges and cannot be "
            f"represented in edge-list form (e.g. {sample})"
        )
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(EDGE_LIST_HEADER)
    writer.writerows(graph.sorted_edges())


def edge_list_text(graph: HierarchyGraph) -> str:
    buffer = io.StringIO()
    write_edge_list(graph, buffer)
    return buffer.getvalue()


def _open(path: str | None):
    assert path is not None
    try:
        return open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise IngestIOError(path, exc) from exc
