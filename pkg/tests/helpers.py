"""Shared fixtures: the mini ontology, random DAGs, and brute-force oracles.

The oracles deliberately do not reuse the library's traversal code:
ancestor sets come from a fresh DFS closure per query and up-distances
from a fresh BFS per query, so oracle agreement actually checks two
independent implementations against each other.
"""

from __future__ import annotations

import random
from collections import deque
from fractions import Fraction

from hierdist import (
    DenominatorPolicy,
    FocusView,
    HierarchyGraph,
    build_hierarchy,
    focus_subgraph,
)

# Subsumption chains under a clinical-finding focus root (404684003),
# which itself sits under a base root; one morphology code (33359002)
# is deliberately outside the focus subhierarchy.
BASE_ROOT = 138875005
FOCUS_ROOT = 404684003
MORPHOLOGY_CODE = 33359002

MINI_EDGES: list[tuple[int, int]] = [
    (FOCUS_ROOT, BASE_ROOT),
    (MORPHOLOGY_CODE, BASE_ROOT),
    (76318008, FOCUS_ROOT),      # disorder of shoulder-region tendon
    (239955008, 76318008),       # tendinitis/tenosynovitis of shoulder region
    (202852009, 239955008),      # shoulder tendinitis
    (58150001, FOCUS_ROOT),      # fracture of clavicle
    (396275006, FOCUS_ROOT),     # osteoarthritis
    (443524000, 396275006),      # secondary osteoarthritis
    (239873007, 396275006),      # osteoarthritis of knee
]

MINI_CONCEPTS = sorted({c for edge in MINI_EDGES for c in edge})


def mini_graph() -> HierarchyGraph:
    return build_hierarchy(MINI_CONCEPTS, MINI_EDGES)


def mini_view(inclusive: bool = True) -> FocusView:
    return focus_subgraph(mini_graph(), FOCUS_ROOT, inclusive=inclusive)


def random_rooted_dag(
    rng: random.Random, max_nodes: int = 50, max_extra_edges: int | None = None
) -> tuple[list[int], list[tuple[int, int]]]:
    """A random DAG where node 1 is the single top concept.

    Every node above 1 gets at least one parent with a smaller id, so
    edges (child, parent) always point from larger to smaller ids:
    acyclicity is by construction and every node reaches node 1. No node
    is isolated, so these graphs also round-trip through edge lists.
    """
    n = rng.randint(2, max_nodes)
    edges: set[tuple[int, int]] = set()
    for node in range(2, n + 1):
        for parent in rng.sample(range(1, node), k=min(rng.randint(1, 2), node - 1)):
            edges.add((node, parent))
    extra = rng.randint(0, n if max_extra_edges is None else max_extra_edges)
    for _ in range(extra):
        a, b = rng.sample(range(1, n + 1), 2)
        edges.add((max(a, b), min(a, b)))
    return list(range(1, n + 1)), sorted(edges)


def random_view(rng: random.Random, max_nodes: int = 50) -> FocusView:
    """Random DAG wrapped in an inclusive focus view over all its nodes."""
    concepts, edges = random_rooted_dag(rng, max_nodes=max_nodes)
    graph = build_hierarchy(concepts, edges)
    return focus_subgraph(graph, 1, inclusive=True)


def random_code_set(rng: random.Random, members: list[int], max_codes: int = 5) -> frozenset[int]:
    size = rng.randint(1, min(max_codes, len(members)))
    return frozenset(rng.sample(members, size))


# Oracles


def _parent_lists(edges: list[tuple[int, int]]) -> dict[int, list[int]]:
    parents: dict[int, list[int]] = {}
    for child, parent in edges:
        parents.setdefault(child, []).append(parent)
    return parents


def oracle_ancestor_set(edges: list[tuple[int, int]], x: int) -> set[int]:
    """All ancestors of x (including x), by fresh iterative DFS."""
    parents = _parent_lists(edges)
    seen = {x}
    stack = [x]
    while stack:
        node = stack.pop()
        for parent in parents.get(node, ()):
            if parent not in seen:
                seen.add(parent)
                stack.append(parent)
    return seen


def oracle_updist(edges: list[tuple[int, int]], x: int, a: int) -> int | None:
    """Minimum child->parent hops from x to a, by fresh BFS."""
    parents = _parent_lists(edges)
    dist = {x: 0}
    queue = deque([x])
    while queue:
        node = queue.popleft()
        if node == a:
            return dist[node]
        for parent in parents.get(node, ()):
            if parent not in dist:
                dist[parent] = dist[node] + 1
                queue.append(parent)
    return dist.get(a)


def oracle_concept_distance(edges: list[tuple[int, int]], x: int, y: int) -> int | None:
    """Min over all common ancestors of the summed fresh-BFS up-distances."""
    common = oracle_ancestor_set(edges, x) & oracle_ancestor_set(edges, y)
    if not common:
        return None
    return min(oracle_updist(edges, x, a) + oracle_updist(edges, y, a) for a in common)


def oracle_code_set_distance(
    edges: list[tuple[int, int]],
    x_codes: frozenset[int],
    y_codes: frozenset[int],
    policy: DenominatorPolicy,
) -> Fraction:
    """The set-distance formula evaluated from scratch on a naive matrix."""
    matrix = {
        (a, b): oracle_concept_distance(edges, a, b)
        for a in x_codes | y_codes
        for b in x_codes | y_codes
    }
    numerator = sum(min(matrix[(a, b)] for b in y_codes) for a in x_codes)
    numerator += sum(min(matrix[(b, a)] for a in x_codes) for b in y_codes)
    if policy is DenominatorPolicy.TERM_COUNT:
        denominator = len(x_codes) + len(y_codes)
    else:
        denominator = len(x_codes | y_codes)
    return Fraction(numerator, denominator)
