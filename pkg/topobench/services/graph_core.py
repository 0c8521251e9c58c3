"""
Graph construction and exact combinatorial oracles.

Triangles, k-cliques, set-to-set hop distances, node permutation and
adjacency masks. All functions are pure; graphs are never mutated.
"""

import logging
from collections import deque
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np

from core.exceptions import GraphValidationError
from models.graph import Edge, Graph


logger = logging.getLogger(__name__)

Triangle = Tuple[int, int, int]
CliqueSet = List[FrozenSet[int]]


def build_graph(
    num_nodes: int,
    edge_list: Iterable[Sequence[int]],
    node_labels: Optional[Sequence[int]] = None,
    edge_labels: Optional[Mapping[Edge, int]] = None,
) -> Graph:
    """
    Build a canonical graph from an arbitrary edge list.

    Args:
        num_nodes: Number of nodes
        edge_list: Node pairs in any orientation; duplicates are merged
        node_labels: Optional label id per node
        edge_labels: Optional label id per edge, keyed by either orientation

    Returns:
        Graph with edges stored as sorted (u, v) pairs, u < v

    Raises:
        GraphValidationError: On self-loops, out-of-range endpoints or
            missing/conflicting labels
    """
    if num_nodes < 0:
        raise GraphValidationError(f"num_nodes must be >= 0, got {num_nodes}")

    canonical: Set[Edge] = set()
    for pair in edge_list:
        u, v = int(pair[0]), int(pair[1])
        if u == v:
            raise GraphValidationError(f"self-loop at node {u}", pair=(u, v))
        if not (0 <= u < num_nodes and 0 <= v < num_nodes):
            raise GraphValidationError(
                f"edge ({u}, {v}) references a node outside [0, {num_nodes})", pair=(u, v)
            )
        canonical.add((min(u, v), max(u, v)))
    edges = tuple(sorted(canonical))

    labels_per_edge: Optional[Tuple[int, ...]] = None
    if edge_labels is not None:
        merged: Dict[Edge, int] = {}
        for (u, v), label in edge_labels.items():
            key = (min(u, v), max(u, v))
            if key in merged and merged[key] != label:
                raise GraphValidationError(f"conflicting labels for edge {key}", pair=key)
            merged[key] = int(label)
        missing = [e for e in edges if e not in merged]
        if missing:
            raise GraphValidationError(f"edge {missing[0]} has no label", pair=missing[0])
        labels_per_edge = tuple(merged[e] for e in edges)

    if node_labels is not None and len(node_labels) != num_nodes:
        raise GraphValidationError(
            f"expected {num_nodes} node labels, got {len(node_labels)}"
        )

    return Graph(
        num_nodes=num_nodes,
        edges=edges,
        node_labels=tuple(int(x) for x in node_labels) if node_labels is not None else None,
        edge_labels=labels_per_edge,
    )


def enumerate_triangles(g: Graph) -> List[Triangle]:
    """
    List every triangle exactly once, sorted lexicographically.

    Uses forward neighbor intersection: for each edge (u, v), u < v, the
    common neighbors w > v close a triangle.
    """
    higher = [set(w for w in g.neighbors(u) if w > u) for u in range(g.num_nodes)]
    triangles: List[Triangle] = []
    for u in range(g.num_nodes):
        for v in sorted(higher[u]):
            for w in sorted(higher[u] & higher[v]):
                triangles.append((u, v, w))
    return triangles


def brute_force_triangles(g: Graph) -> List[Triangle]:
    """O(n^3) all-triples oracle for enumerate_triangles."""
    return [
        (a, b, c)
        for a, b, c in combinations(range(g.num_nodes), 3)
        if g.has_edge(a, b) and g.has_edge(b, c) and g.has_edge(a, c)
    ]


def find_k_cliques(g: Graph, k: int) -> CliqueSet:
    """
    Find all k-node complete subgraphs, maximal or not, each exactly once.

    Maximal cliques of size >= k are enumerated with pivoting Bron-Kerbosch;
    their k-subsets are collected into a set.

    Args:
        g: Graph
        k: Clique size, k >= 2

    Returns:
        Cliques as frozensets, sorted by their sorted member tuples
    """
    if k < 2:
        raise GraphValidationError(f"clique size must be >= 2, got {k}")

    adjacency = [set(g.neighbors(v)) for v in range(g.num_nodes)]
    found: Set[Tuple[int, ...]] = set()

    def expand(clique: List[int], candidates: Set[int], excluded: Set[int]) -> None:
        if len(clique) + len(candidates) < k:
            return
        if not candidates and not excluded:
            for subset in combinations(sorted(clique), k):
                found.add(subset)
            return
        pivot = max(candidates | excluded, key=lambda u: len(candidates & adjacency[u]))
        for v in sorted(candidates - adjacency[pivot]):
            expand(clique + [v], candidates & adjacency[v], excluded & adjacency[v])
            candidates = candidates - {v}
            excluded = excluded | {v}

    expand([], set(range(g.num_nodes)), set())
    return [frozenset(c) for c in sorted(found)]


def bfs_distances(g: Graph, sources: Iterable[int]) -> List[Optional[int]]:
    """
    Multi-source BFS hop distances.

    Returns:
        Distance per node; None marks nodes unreachable from every source
    """
    distances: List[Optional[int]] = [None] * g.num_nodes
    queue = deque()
    for s in sources:
        if distances[s] is None:
            distances[s] = 0
            queue.append(s)
    while queue:
        u = queue.popleft()
        for v in g.neighbors(u):
            if distances[v] is None:
                distances[v] = distances[u] + 1
                queue.append(v)
    return distances


def shortest_distance_between_sets(g: Graph, a: Iterable[int], b: Iterable[int]) -> Optional[int]:
    """
    Minimum hop distance between any node of ``a`` and any node of ``b``.

    Args:
        g: Graph
        a: Non-empty node set
        b: Non-empty node set, disjoint from ``a``

    Returns:
        Hop count, or None when no node of ``b`` is reachable from ``a``

    Raises:
        GraphValidationError: If a set is empty or the sets overlap
    """
    set_a, set_b = set(a), set(b)
    if not set_a or not set_b:
        raise GraphValidationError("node sets must be non-empty")
    overlap = set_a & set_b
    if overlap:
        raise GraphValidationError(
            f"node sets overlap on {sorted(overlap)}", details={"overlap": sorted(overlap)}
        )
    distances = bfs_distances(g, sorted(set_a))
    reachable = [distances[v] for v in set_b if distances[v] is not None]
    return min(reachable) if reachable else None


def is_connected(g: Graph) -> bool:
    if g.num_nodes == 0:
        return True
    return all(d is not None for d in bfs_distances(g, [0]))


def permute_nodes(g: Graph, perm: Sequence[int]) -> Graph:
    """
    Relabel nodes: node ``v`` becomes ``perm[v]``.

    Node and edge labels travel with their nodes and edges.

    Raises:
        GraphValidationError: If ``perm`` is not a bijection on [0, num_nodes)
    """
    mapping = [int(p) for p in perm]
    if len(mapping) != g.num_nodes or sorted(mapping) != list(range(g.num_nodes)):
        raise GraphValidationError(
            f"permutation is not a bijection on [0, {g.num_nodes})",
            details={"perm": mapping},
        )

    node_labels = None
    if g.node_labels is not None:
        relabeled = [0] * g.num_nodes
        for v, label in enumerate(g.node_labels):
            relabeled[mapping[v]] = label
        node_labels = relabeled

    edge_labels = None
    if g.edge_labels is not None:
        edge_labels = {(mapping[u], mapping[v]): label for (u, v), label in zip(g.edges, g.edge_labels)}

    return build_graph(
        g.num_nodes,
        [(mapping[u], mapping[v]) for u, v in g.edges],
        node_labels=node_labels,
        edge_labels=edge_labels,
    )


def adjacency_mask(g: Graph, include_self: bool = False) -> np.ndarray:
    """
    Boolean adjacency matrix, symmetric; diagonal set when ``include_self``.
    """
    mask = np.zeros((g.num_nodes, g.num_nodes), dtype=bool)
    if g.edges:
        rows, cols = np.array(g.edges, dtype=np.int64).T
        mask[rows, cols] = True
        mask[cols, rows] = True
    if include_self:
        np.fill_diagonal(mask, True)
    return mask
