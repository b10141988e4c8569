import io
import os
import random

import pytest

from hierdist import (
    CycleDetected,
    IngestConfig,
    IngestIOError,
    MalformedLine,
    SelfEdge,
    build_hierarchy,
    ingest,
    parse_edge_list,
    parse_rf2_concepts,
    parse_rf2_relationships,
    write_edge_list,
)
from hierdist.ingest import edge_list_text

from helpers import random_rooted_dag

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")

CONCEPT_HEADER = "id\teffectiveTime\tactive\tmoduleId\tdefinitionStatusId\n"
REL_HEADER = (
    "id\teffectiveTime\tactive\tmoduleId\tsourceId\tdestinationId"
    "\trelationshipGroup\ttypeId\tcharacteristicTypeId\tmodifierId\n"
)


def _rel_row(source, destination, active="1", type_id="116680003",
             characteristic="900000000000011006"):
    return (
        f"9\t20170131\t{active}\t900000000000207008\t{source}\t{destination}"
        f"\t0\t{type_id}\t{characteristic}\t900000000000451002\n"
    )


class TestParseRf2Concepts:
    def test_active_row(self):
        stream = io.StringIO(
            CONCEPT_HEADER
            + "404684003\t20170131\t1\t900000000000207008\t900000000000074008\n"
        )
        rows, malformed = parse_rf2_concepts(stream)
        assert malformed == 0
        assert len(rows) == 1
        assert rows[0].id == 404684003
        assert rows[0].active is True

    def test_inactive_flag(self):
        stream = io.StringIO(
            CONCEPT_HEADER + "5\t20170131\t0\tmod\tstatus\n"
        )
        rows, _ = parse_rf2_concepts(stream)
        assert rows[0].active is False

    def test_non_numeric_id_strict(self):
        stream = io.StringIO(CONCEPT_HEADER + "abc\t20170131\t1\tmod\tstatus\n")
        with pytest.raises(MalformedLine) as exc_info:
            parse_rf2_concepts(stream)
        assert exc_info.value.line_no == 2

    def test_non_numeric_id_lenient(self):
        stream = io.StringIO(
            CONCEPT_HEADER
            + "abc\t20170131\t1\tmod\tstatus\n"
            + "7\t20170131\t1\tmod\tstatus\n"
        )
        rows, malformed = parse_rf2_concepts(stream, lenient=True)
        assert malformed == 1
        assert [r.id for r in rows] == [7]

    def test_short_row_rejected(self):
        stream = io.StringIO(CONCEPT_HEADER + "5\n")
        with pytest.raises(MalformedLine):
            parse_rf2_concepts(stream)

    def test_bad_header(self):
        with pytest.raises(MalformedLine):
            parse_rf2_concepts(io.StringIO("foo\tbar\n"))


class TestParseRf2Relationships:
    def test_inferred_is_a_emitted(self):
        stream = io.StringIO(REL_HEADER + _rel_row(202852009, 239955008))
        edges, _ = parse_rf2_relationships(stream, selector="inferred")
        assert edges == [(202852009, 239955008)]

    def test_non_is_a_filtered(self):
        stream = io.StringIO(REL_HEADER + _rel_row(1, 2, type_id="363698007"))
        edges, _ = parse_rf2_relationships(stream)
        assert edges == []

    def test_inactive_filtered(self):
        stream = io.StringIO(REL_HEADER + _rel_row(1, 2, active="0"))
        edges, _ = parse_rf2_relationships(stream)
        assert edges == []

    def test_selector_stated_and_any(self):
        stated = _rel_row(3, 4, characteristic="900000000000010007")
        inferred = _rel_row(1, 2)
        text = REL_HEADER + stated + inferred
        edges, _ = parse_rf2_relationships(io.StringIO(text), selector="stated")
        assert edges == [(3, 4)]
        edges, _ = parse_rf2_relationships(io.StringIO(text), selector="any")
        assert sorted(edges) == [(1, 2), (3, 4)]

    def test_unknown_selector(self):
        with pytest.raises(ValueError):
            parse_rf2_relationships(io.StringIO(REL_HEADER), selector="bogus")


class TestParseEdgeList:
    def test_basic_edge(self):
        stream = io.StringIO("child_id,parent_id\n202852009,239955008\n")
        edges, _ = parse_edge_list(stream)
        assert edges == [(202852009, 239955008)]

    def test_empty_after_header(self):
        edges, malformed = parse_edge_list(io.StringIO("child_id,parent_id\n"))
        assert edges == []
        assert malformed == 0

    def test_blank_lines_ignored(self):
        edges, _ = parse_edge_list(io.StringIO("child_id,parent_id\n\n1,2\n\n"))
        assert edges == [(1, 2)]

    def test_self_edge_passes_parser_fails_builder(self):
        edges, _ = parse_edge_list(io.StringIO("child_id,parent_id\n1,1\n"))
        assert edges == [(1, 1)]
        with pytest.raises(SelfEdge):
            build_hierarchy({1}, edges)

    def test_bad_header(self):
        with pytest.raises(MalformedLine):
            parse_edge_list(io.StringIO("a,b\n1,2\n"))

    def test_non_numeric_cell(self):
        with pytest.raises(MalformedLine):
            parse_edge_list(io.StringIO("child_id,parent_id\n1,x\n"))


class TestIngest:
    def test_rf2_fixture_counts(self):
        config = IngestConfig.rf2(
            os.path.join(DATA_DIR, "rf2_concepts.tsv"),
            os.path.join(DATA_DIR, "rf2_relationships.tsv"),
        )
        result = ingest(config)
        assert result.graph.concept_count == 5
        assert result.graph.edge_count == 4
        assert result.report.concepts_read == 6
        assert result.report.inactive_excluded == 1
        assert result.report.edges_read == 5
        assert result.report.edges_dropped == 1

    def test_rf2_filter_soundness(self):
        config = IngestConfig.rf2(
            os.path.join(DATA_DIR, "rf2_concepts.tsv"),
            os.path.join(DATA_DIR, "rf2_relationships.tsv"),
        )
        graph = ingest(config).graph
        assert 11111111 not in graph  # inactive concept
        assert 16982005 not in graph  # only referenced by a non-is-a row
        assert 58150001 not in graph  # only referenced by an inactive row
        assert (58150001, 404684003) not in graph.edges

    def test_rf2_include_inactive(self):
        config = IngestConfig.rf2(
            os.path.join(DATA_DIR, "rf2_concepts.tsv"),
            os.path.join(DATA_DIR, "rf2_relationships.tsv"),
            include_inactive=True,
        )
        result = ingest(config)
        assert result.graph.concept_count == 6
        assert result.report.inactive_excluded == 0
        assert result.report.edges_dropped == 0

    def test_edge_list_shoulder_chain(self, tmp_path):
        path = tmp_path / "chain.csv"
        path.write_text(
            "child_id,parent_id\n202852009,239955008\n239955008,76318008\n",
            encoding="utf-8",
        )
        result = ingest(IngestConfig.edge_list(str(path)))
        assert result.graph.concept_count == 3
        assert result.graph.edge_count == 2

    def test_missing_file(self):
        with pytest.raises(IngestIOError):
            ingest(IngestConfig.edge_list("/nonexistent/file.csv"))

    def test_cyclic_input_rejected(self):
        with pytest.raises(CycleDetected):
            ingest(IngestConfig.edge_list(os.path.join(DATA_DIR, "cyclic.csv")))

    def test_bad_config(self):
        with pytest.raises(ValueError):
            IngestConfig(source_kind="rf2_snapshot").validate()
        with pytest.raises(ValueError):
            IngestConfig(source_kind="nope").validate()

    def test_determinism(self):
        config = IngestConfig.edge_list(os.path.join(DATA_DIR, "mini_snomed.csv"))
        assert ingest(config).graph == ingest(config).graph


class TestRoundTrip:
    def test_serialize_reingest_identity(self, tmp_path):
        rng = random.Random(20240101)
        for i in range(25):
            concepts, edges = random_rooted_dag(rng, max_nodes=40)
            graph = build_hierarchy(concepts, edges)
            path = tmp_path / f"graph_{i}.csv"
            with open(path, "w", encoding="utf-8", newline="") as stream:
                write_edge_list(graph, stream)
            again = ingest(IngestConfig.edge_list(str(path))).graph
            assert again == graph

    def test_isolated_concepts_rejected(self):
        graph = build_hierarchy([1, 2, 3], [(1, 2)])
        with pytest.raises(ValueError):
            edge_list_text(graph)

    def test_serialized_edges_sorted(self):
        graph = build_hierarchy([1, 2, 3], [(3, 1), (2, 1)])
        assert edge_list_text(graph) == "child_id,parent_id\n2,1\n3,1\n"
