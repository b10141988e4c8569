"""Acceptance suite: one test per release criterion.

Each test prints a single `ACCEPTANCE <n>: PASS ...` line once its
criterion holds (run with `pytest -s` to see them); a failing criterion
fails the test itself. Tolerances are exact equality for golden values
(integer or rational), zero violations for the generated-case suites,
and wall-clock ceilings where stated.
"""

import json
import os
import random
import time
from fractions import Fraction

from hierdist import (
    CodeSet,
    DenominatorPolicy,
    IngestConfig,
    build_hierarchy,
    code_set_distance,
    concept_distance,
    focus_subgraph,
    ingest,
    load_run_config,
    run_report,
    write_edge_list,
)

from helpers import (
    mini_view,
    oracle_code_set_distance,
    oracle_concept_distance,
    random_code_set,
    random_rooted_dag,
    random_view,
)

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
CONFIG_PATH = os.path.join(DATA_DIR, "report_config.json")


def _fixture_report(tmp_path, name="out"):
    config = load_run_config(CONFIG_PATH)
    config.output_dir = str(tmp_path / name)
    config.markdown = True
    config.figures = False
    run_report(config)
    with open(os.path.join(config.output_dir, "report.json"), "rb") as stream:
        return stream.read()


def test_acceptance_1_worked_example_distances():
    started = time.perf_counter()
    view = mini_view()
    assert concept_distance(view, 202852009, 76318008) == 2
    assert concept_distance(view, 443524000, 239873007) == 2
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    print(f"\nACCEPTANCE 1: PASS worked-example concept distances ({elapsed:.3f}s)")


def test_acceptance_2_code_set_metric_goldens(tmp_path):
    started = time.perf_counter()
    view = mini_view()
    shoulder = code_set_distance(
        CodeSet(frozenset({202852009, 58150001})),
        CodeSet(frozenset({76318008, 58150001})),
        view,
        DenominatorPolicy.TERM_COUNT,
    )
    assert shoulder.value == Fraction(1)

    knee_x = CodeSet(frozenset({239873007, 443524000}))
    knee_y = CodeSet(frozenset({239873007}))
    assert code_set_distance(knee_x, knee_y, view, DenominatorPolicy.SET_UNION).value == 1
    assert code_set_distance(
        knee_x, knee_y, view, DenominatorPolicy.TERM_COUNT
    ).value == Fraction(2, 3)

    document = json.loads(_fixture_report(tmp_path))
    note = document["policy_note"]
    assert "term_count" in note and "set_union" in note
    assert "|X|+|Y|" in note and "|X union Y|" in note
    assert document["config"]["policy"] in ("term_count", "set_union")

    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    print(f"\nACCEPTANCE 2: PASS code-set metric goldens and policy disclosure ({elapsed:.3f}s)")


def test_acceptance_3_oracle_equivalence():
    started = time.perf_counter()
    rng = random.Random(17010)
    dags = 0
    mismatches = 0
    for _ in range(1000):
        concepts, edges = random_rooted_dag(rng, max_nodes=50)
        view = focus_subgraph(build_hierarchy(concepts, edges), 1)
        dags += 1
        for _ in range(3):
            x, y = rng.choice(concepts), rng.choice(concepts)
            if concept_distance(view, x, y) != oracle_concept_distance(edges, x, y):
                mismatches += 1
        x_codes = random_code_set(rng, concepts, max_codes=5)
        y_codes = random_code_set(rng, concepts, max_codes=5)
        for policy in DenominatorPolicy:
            expected = oracle_code_set_distance(edges, x_codes, y_codes, policy)
            got = code_set_distance(CodeSet(x_codes), CodeSet(y_codes), view, policy).value
            if got != expected:
                mismatches += 1
    elapsed = time.perf_counter() - started
    assert dags >= 1000
    assert mismatches == 0
    assert elapsed < 60.0
    print(
        f"\nACCEPTANCE 3: PASS oracle equivalence over {dags} random DAGs, "
        f"0 mismatches ({elapsed:.1f}s)"
    )


def test_acceptance_4_metric_axioms():
    started = time.perf_counter()
    rng = random.Random(27182818)

    symmetry_cases = 0
    for _ in range(200):
        view = random_view(rng, max_nodes=30)
        members = sorted(view.members)
        for _ in range(5):
            x = CodeSet(random_code_set(rng, members))
            y = CodeSet(random_code_set(rng, members))
            for policy in DenominatorPolicy:
                assert (
                    code_set_distance(x, y, view, policy).value
                    == code_set_distance(y, x, view, policy).value
                )
            symmetry_cases += 1

    zero_law_cases = 0
    for _ in range(200):
        view = random_view(rng, max_nodes=30)
        members = sorted(view.members)
        for _ in range(5):
            x = CodeSet(random_code_set(rng, members))
            y = x if rng.random() < 0.5 else CodeSet(random_code_set(rng, members))
            result = code_set_distance(x, y, view)
            assert (result.value == 0) == (x.codes == y.codes)
            zero_law_cases += 1

    size_cases = 0
    for _ in range(200):
        view = random_view(rng, max_nodes=30)
        members = sorted(view.members)
        for _ in range(5):
            x = CodeSet(random_code_set(rng, members))
            y = CodeSet(random_code_set(rng, members))
            min_terms = [
                min(concept_distance(view, a, b) for b in y) for a in x
            ] + [min(concept_distance(view, b, a) for a in x) for b in y]
            bound = max(min_terms)
            for policy in DenominatorPolicy:
                assert code_set_distance(x, y, view, policy).value <= bound
            size_cases += 1

    uncovered_cases = 0
    while uncovered_cases < 1000:
        view = random_view(rng, max_nodes=30)
        members = sorted(view.members)
        if len(members) < 3:
            continue
        y = CodeSet(random_code_set(rng, members, max_codes=3))
        remaining = [m for m in members if m not in y]
        if len(remaining) < 2:
            continue
        new_code = rng.choice(remaining)
        base = [m for m in remaining if m != new_code]
        x_codes = frozenset(rng.sample(base, rng.randint(1, min(3, len(base)))))
        k = min(concept_distance(view, new_code, b) for b in y)
        x_side_before = sum(
            min(concept_distance(view, a, b) for b in y) for a in x_codes
        )
        x_side_after = sum(
            min(concept_distance(view, a, b) for b in y) for a in (x_codes | {new_code})
        )
        assert x_side_after - x_side_before == k
        covers = any(
            concept_distance(view, b, new_code)
            < min(concept_distance(view, b, a) for a in x_codes)
            for b in y
        )
        if not covers:
            before = code_set_distance(CodeSet(x_codes), y, view)
            after = code_set_distance(CodeSet(x_codes | {new_code}), y, view)
            assert after.numerator - before.numerator == k
        uncovered_cases += 1

    monotonicity_cases = 0
    while monotonicity_cases < 1000:
        concepts, edges = random_rooted_dag(rng, max_nodes=25)
        existing = set(edges)
        candidates = [
            (c, p) for c in concepts for p in concepts if p < c and (c, p) not in existing
        ]
        if not candidates:
            continue
        new_edge = rng.choice(candidates)
        before = focus_subgraph(build_hierarchy(concepts, edges), 1)
        after = focus_subgraph(build_hierarchy(concepts, edges + [new_edge]), 1)
        for _ in range(4):
            x, y = rng.choice(concepts), rng.choice(concepts)
            assert concept_distance(after, x, y) <= concept_distance(before, x, y)
            monotonicity_cases += 1

    elapsed = time.perf_counter() - started
    counts = (symmetry_cases, zero_law_cases, size_cases, uncovered_cases, monotonicity_cases)
    assert all(count >= 1000 for count in counts)
    print(
        "\nACCEPTANCE 4: PASS metric axioms, cases "
        f"symmetry={symmetry_cases} zero_law={zero_law_cases} size={size_cases} "
        f"uncovered={uncovered_cases} monotonicity={monotonicity_cases}, "
        f"0 violations ({elapsed:.1f}s)"
    )


def test_acceptance_5_evaluation_bookkeeping(tmp_path):
    started = time.perf_counter()
    from hierdist.evaluation import Stratum, band_table, micro_average
    from hierdist.report import ReportRun

    config = load_run_config(CONFIG_PATH)
    config.output_dir = str(tmp_path / "out")
    run = ReportRun(config)
    document = run.document()

    # Rows plus exclusions partition the universe for every coder pair.
    for left, right in config.comparisons:
        rows, exclusions = run.rows_for(left, right)
        universe = run.annotations.examples_of(left) | run.annotations.examples_of(right)
        assert len(rows) + len(exclusions) == len(universe)
        covered = {r.example_id for r in rows} | {e.example_id for e in exclusions}
        assert covered == universe
        for row in rows:
            assert (row.stratum is Stratum.SINGLE_FINDING) == (
                len(row.left_set) == 1 and len(row.right_set) == 1
            )

    # Band cumulativity in every emitted table.
    def check_band_table(table_dict):
        for row in table_dict["rows"].values():
            percents = [
                cell["percent"]
                for cell in row["cumulative"].values()
                if cell["percent"] is not None
            ]
            assert all(a <= b for a, b in zip(percents, percents[1:]))
            assert all(0 <= p <= 100 for p in percents)

    emitted_tables = [c["band_table"] for c in document["comparisons"]]
    emitted_tables += [m["band_table"] for m in document["micro_averages"].values()]
    if document["distance_vs_rating"]:
        emitted_tables.append(document["distance_vs_rating"]["table"])
    assert emitted_tables
    for table in emitted_tables:
        check_band_table(table)

    # The all row is the sum of the strata.
    for comparison in document["comparisons"]:
        rows = comparison["band_table"]["rows"]
        assert rows["all"]["n"] == rows["single_finding"]["n"] + rows["multi_finding"]["n"]

    # Micro-average equals pooled counts and differs from the mean of
    # percentages on the designed asymmetric fixture.
    from test_evaluation import make_row

    one_exact = [make_row("a1", 0)]
    three_far = [make_row("b1", 5), make_row("b2", 5), make_row("b3", 5)]
    pooled = micro_average([one_exact, three_far])
    pooled_exact = pooled.rows["all"].cumulative["exact"]
    assert pooled_exact.fraction == Fraction(1, 4)
    assert pooled_exact.percent == 25
    mean_of_percentages = (
        band_table(one_exact).rows["all"].cumulative["exact"].percent
        + band_table(three_far).rows["all"].cumulative["exact"].percent
    ) / 2
    assert mean_of_percentages == 50
    assert pooled_exact.percent != mean_of_percentages

    # Matrix cell sums equal the size of the example-id inner join.
    for entry in document["similarity_matrices"]:
        left_rows, _ = run.rows_for(entry["left"], entry["reference"])
        right_rows, _ = run.rows_for(entry["right"], entry["reference"])
        join = {r.example_id for r in left_rows} & {r.example_id for r in right_rows}
        assert entry["matrix"]["total"] == len(join)
    for entry in document["rating_crosstabs"]:
        left = run.annotations.ratings_of(entry["left"])
        right = run.annotations.ratings_of(entry["right"])
        assert entry["matrix"]["total"] == len(left.keys() & right.keys())

    elapsed = time.perf_counter() - started
    print(f"\nACCEPTANCE 5: PASS evaluation bookkeeping invariants ({elapsed:.2f}s)")


def test_acceptance_6_parser_round_trip_and_filters(tmp_path):
    started = time.perf_counter()
    rng = random.Random(60601)
    for i in range(100):
        concepts, edges = random_rooted_dag(rng, max_nodes=40)
        graph = build_hierarchy(concepts, edges)
        path = tmp_path / f"rt_{i}.csv"
        with open(path, "w", encoding="utf-8", newline="") as stream:
            write_edge_list(graph, stream)
        assert ingest(IngestConfig.edge_list(str(path))).graph == graph

    result = ingest(
        IngestConfig.rf2(
            os.path.join(DATA_DIR, "rf2_concepts.tsv"),
            os.path.join(DATA_DIR, "rf2_relationships.tsv"),
        )
    )
    # Exactly the active concepts and the active inferred is-a edges
    # between them; the inactive concept, the inactive edge, the stated
    # duplicate, and the non-is-a row leave no trace.
    assert result.graph.concepts == frozenset(
        {138875005, 404684003, 76318008, 239955008, 202852009}
    )
    assert result.graph.edges == frozenset(
        {
            (404684003, 138875005),
            (76318008, 404684003),
            (239955008, 76318008),
            (202852009, 239955008),
        }
    )
    assert result.report.inactive_excluded == 1
    assert result.report.edges_dropped == 1

    elapsed = time.perf_counter() - started
    print(
        f"\nACCEPTANCE 6: PASS round-trip on 100 graphs and exact RF2 filtering ({elapsed:.2f}s)"
    )


def test_acceptance_7_report_determinism(tmp_path):
    started = time.perf_counter()
    first = _fixture_report(tmp_path, "run")
    second = _fixture_report(tmp_path, "run")
    assert first == second
    elapsed = time.perf_counter() - started
    print(f"\nACCEPTANCE 7: PASS byte-identical consecutive reports ({elapsed:.2f}s)")


def test_acceptance_8_terminology_scale(tmp_path):
    concept_count = 100_000
    edge_target = 150_000
    rng = random.Random(20170131)

    edges = set()
    for node in range(2, concept_count + 1):
        edges.add((node, rng.randint(1, node - 1)))
    while len(edges) < edge_target:
        child = rng.randint(2, concept_count)
        edges.add((child, rng.randint(1, child - 1)))

    path = tmp_path / "large.csv"
    with open(path, "w", encoding="utf-8", newline="\n") as stream:
        stream.write("child_id,parent_id\n")
        stream.writelines(f"{c},{p}\n" for c, p in edges)

    started = time.perf_counter()
    result = ingest(IngestConfig.edge_list(str(path)))
    ingest_seconds = time.perf_counter() - started
    assert result.graph.concept_count == concept_count
    assert result.graph.edge_count == len(edges)
    assert ingest_seconds < 5.0

    view = focus_subgraph(result.graph, 1)
    pool = rng.sample(range(1, concept_count + 1), 300)
    annotated = [
        CodeSet(frozenset(rng.sample(pool, rng.randint(1, 5)))) for _ in range(500)
    ]
    queries = [
        (rng.choice(annotated), rng.choice(annotated)) for _ in range(10_000)
    ]
    for x, y in queries:  # cache warm-up
        code_set_distance(x, y, view)
    started = time.perf_counter()
    for x, y in queries:
        code_set_distance(x, y, view)
    query_seconds = time.perf_counter() - started
    assert query_seconds < 2.0

    print(
        f"\nACCEPTANCE 8: PASS ingest {concept_count} concepts/"
        f"{len(edges)} edges in {ingest_seconds:.2f}s (< 5s), "
        f"10000 warm queries in {query_seconds:.2f}s (< 2s)"
    )
