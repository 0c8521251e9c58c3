"""
Candidate generators for the Triangles and Clique Distance tasks.

Every function draws randomness only from the numpy Generator it is given,
so an item is fully determined by its seed. Pools derive one seed per item
from (master seed, index) with a stable hash, which lets items be generated
in any order or in parallel.
"""

import hashlib
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, FrozenSet, List, Sequence, Tuple, Union

import numpy as np

from core.exceptions import GraphValidationError, UnsatisfiableGenerationError
from models.graph import Graph
from models.schemas import (
    CliqueGenParams,
    DatasetItem,
    GraphFamily,
    Provenance,
    TaskName,
    TriangleGenParams,
)
from services.graph_core import (
    build_graph,
    enumerate_triangles,
    is_connected,
    shortest_distance_between_sets,
)


logger = logging.getLogger(__name__)


def derive_item_seed(master_seed: int, index: Union[int, str], stream: str = "item") -> int:
    """
    Stable 63-bit seed for item ``index`` of a pool.

    Args:
        master_seed: Run master seed
        index: Item or attempt index, or an item id
        stream: Namespace so different consumers never share seeds

    Returns:
        Seed usable with ``numpy.random.default_rng``
    """
    digest = hashlib.sha256(f"{master_seed}:{stream}:{index}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def gen_er_graph(rng: np.random.Generator, n: int, p: float) -> Graph:
    """Erdos-Renyi graph: each unordered pair kept independently with probability p."""
    if n < 1:
        raise GraphValidationError(f"ER graph needs n >= 1, got {n}")
    rows, cols = np.triu_indices(n, k=1)
    keep = rng.random(rows.shape[0]) < p
    return build_graph(n, zip(rows[keep].tolist(), cols[keep].tolist()))


def gen_knn_graph(rng: np.random.Generator, n: int, k: int) -> Graph:
    """
    k-nearest-neighbor graph over n uniform points in the unit square.

    Each node is joined to its k nearest points (Euclidean, stable tie order);
    the union is taken as an undirected graph, so every degree is at least k.
    """
    if not 1 <= k < n:
        raise GraphValidationError(f"kNN graph needs 1 <= k < n, got k={k}, n={n}")
    points = rng.random((n, 2))
    diff = points[:, None, :] - points[None, :, :]
    dist = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(dist, np.inf)
    nearest = np.argsort(dist, axis=1, kind="stable")[:, :k]
    edges = [(i, int(j)) for i in range(n) for j in nearest[i]]
    return build_graph(n, edges)


def reduce_triangles(rng: np.random.Generator, g: Graph, target: int) -> Graph:
    """
    Remove edges until exactly ``target`` triangles remain.

    A uniformly chosen triangle is protected when target is 1. While other
    triangles remain, one of them is picked uniformly and a uniformly chosen
    edge of it that does not belong to the protected triangle is removed.
    Removing edges never creates triangles, so the triangle list is updated
    by dropping those containing the removed edge.

    Raises:
        UnsatisfiableGenerationError: If target is 1 and ``g`` is triangle-free
    """
    if target not in (0, 1):
        raise GraphValidationError(f"target triangle count must be 0 or 1, got {target}")

    triangles = enumerate_triangles(g)
    if len(triangles) == target:
        return g
    if target == 1 and not triangles:
        raise UnsatisfiableGenerationError("graph has no triangle to keep", attempts=1)

    protected: Tuple[int, ...] = ()
    protected_edges = set()
    if target == 1:
        protected = triangles[int(rng.integers(len(triangles)))]
        a, b, c = protected
        protected_edges = {(a, b), (a, c), (b, c)}

    edges = set(g.edges)
    remaining = [t for t in triangles if t != protected]
    while remaining:
        a, b, c = remaining[int(rng.integers(len(remaining)))]
        candidates = [e for e in ((a, b), (a, c), (b, c)) if e not in protected_edges]
        u, v = candidates[int(rng.integers(len(candidates)))]
        edges.discard((u, v))
        remaining = [t for t in remaining if not (u in t and v in t)]

    return build_graph(g.num_nodes, sorted(edges))


def gen_triangle_item(
    rng: np.random.Generator,
    params: TriangleGenParams,
    label: int,
    seed: int = 0,
    item_id: str = "triangles-0",
) -> DatasetItem:
    """
    Generate one Triangles item holding exactly ``label`` triangles.

    The family is ER with probability ``family_mix``, kNN otherwise. A
    triangle-free draw for label 1 is regenerated up to ``max_retries`` times.

    Raises:
        UnsatisfiableGenerationError: If every attempt was triangle-free
    """
    low, high = params.node_count_range
    for attempt in range(1, params.max_retries + 1):
        n = int(rng.integers(low, high + 1))
        if rng.random() < params.family_mix:
            family = GraphFamily.ER
            p = params.er_edge_prob
            if p is None:
                p = min(1.0, params.er_mean_degree / max(n - 1, 1))
            raw = gen_er_graph(rng, n, p)
            family_params = {"p": p}
        else:
            family = GraphFamily.KNN
            k = min(int(params.knn_k[int(rng.integers(len(params.knn_k)))]), n - 1)
            raw = gen_knn_graph(rng, n, k)
            family_params = {"k": k}

        raw_triangles = len(enumerate_triangles(raw))
        if label == 1 and raw_triangles == 0:
            logger.debug(f"{item_id}: triangle-free draw for label 1, retrying ({attempt})")
            continue

        graph = reduce_triangles(rng, raw, label)
        return DatasetItem(
            id=item_id,
            graph=graph,
            label=label,
            provenance=Provenance(
                seed=seed,
                family=family,
                params={
                    "n": n,
                    **family_params,
                    "attempts": attempt,
                    "raw_triangles": raw_triangles,
                    "removed_edges": raw.num_edges - graph.num_edges,
                    "connected": is_connected(graph),
                },
            ),
        )

    raise UnsatisfiableGenerationError(
        f"{item_id}: no triangle-bearing graph after {params.max_retries} attempts",
        attempts=params.max_retries,
        details={"seed": seed},
    )


def gen_ba_graph(rng: np.random.Generator, n: int, m: int) -> Graph:
    """
    Barabasi-Albert preferential attachment graph.

    Starts from the complete graph on m + 1 nodes; every later node attaches
    m edges to distinct existing nodes chosen with probability proportional
    to degree. Edge count is C(m + 1, 2) + (n - m - 1) * m, and no clique
    larger than m + 1 can form.
    """
    if m < 1 or n < m + 1:
        raise GraphValidationError(f"BA graph needs m >= 1 and n >= m + 1, got n={n}, m={m}")

    edges = [(u, v) for u in range(m + 1) for v in range(u + 1, m + 1)]
    # each node appears once per incident edge end
    endpoints: List[int] = [x for e in edges for x in e]
    for v in range(m + 1, n):
        targets = set()
        while len(targets) < m:
            targets.add(endpoints[int(rng.integers(len(endpoints)))])
        for t in sorted(targets):
            edges.append((t, v))
            endpoints.extend((t, v))
    return build_graph(n, edges)


def attach_clique(rng: np.random.Generator, g: Graph, attach_node: int, k: int) -> Tuple[Graph, FrozenSet[int]]:
    """
    Add a new K_k joined to ``attach_node`` by one bridge edge.

    Returns:
        The extended graph and the node set of the new clique
    """
    if not 0 <= attach_node < g.num_nodes:
        raise GraphValidationError(f"attach node {attach_node} not in graph of {g.num_nodes} nodes")
    first = g.num_nodes
    clique = list(range(first, first + k))
    bridge_end = clique[int(rng.integers(k))]
    new_edges = [(u, v) for i, u in enumerate(clique) for v in clique[i + 1:]]
    new_edges.append((attach_node, bridge_end))
    extended = build_graph(first + k, list(g.edges) + new_edges)
    return extended, frozenset(clique)


def gen_clique_item(
    rng: np.random.Generator,
    params: CliqueGenParams,
    seed: int = 0,
    item_id: str = "clique-distance-0",
) -> DatasetItem:
    """
    Generate one Clique Distance item.

    A BA base graph (m = k - 2) receives two k-cliques bridged to two
    distinct uniformly chosen base nodes. The label is 0 when the clique
    distance is strictly below the threshold, 1 otherwise (including the
    unreachable case).
    """
    low, high = params.base_node_range
    k = params.clique_size
    n = int(rng.integers(low, high + 1))
    base = gen_ba_graph(rng, n, params.ba_m)
    first, second = (int(x) for x in rng.choice(n, size=2, replace=False))
    graph, clique_a = attach_clique(rng, base, first, k)
    graph, clique_b = attach_clique(rng, graph, second, k)

    distance = shortest_distance_between_sets(graph, clique_a, clique_b)
    label = 0 if distance is not None and distance < params.distance_threshold else 1
    return DatasetItem(
        id=item_id,
        graph=graph,
        label=label,
        provenance=Provenance(
            seed=seed,
            family=GraphFamily.BA,
            params={
                "base_nodes": n,
                "m": params.ba_m,
                "clique_size": k,
                "attach_nodes": [first, second],
                "cliques": [sorted(clique_a), sorted(clique_b)],
                "distance": distance,
                "threshold": params.distance_threshold,
            },
        ),
    )


def _triangle_job(job: Tuple[TriangleGenParams, int, int, int]) -> DatasetItem:
    params, master_seed, index, label = job
    seed = derive_item_seed(master_seed, index, "triangles")
    return gen_triangle_item(
        np.random.default_rng(seed), params, label, seed=seed, item_id=f"triangles-{index:06d}"
    )


def _clique_job(job: Tuple[CliqueGenParams, int, int]) -> DatasetItem:
    params, master_seed, attempt = job
    seed = derive_item_seed(master_seed, attempt, "clique-distance")
    return gen_clique_item(
        np.random.default_rng(seed), params, seed=seed, item_id=f"attempt-{attempt:06d}"
    )


def _run_jobs(func: Callable, jobs: Sequence, workers: int) -> List[DatasetItem]:
    """Run jobs in order; results come back in submission order either way."""
    if workers <= 1 or len(jobs) < 2:
        return [func(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, jobs, chunksize=max(1, len(jobs) // (workers * 4))))


def generate_pool(
    task: Union[TaskName, str],
    params: Union[TriangleGenParams, CliqueGenParams],
    master_seed: int,
    count: int,
    workers: int = 1,
) -> List[DatasetItem]:
    """
    Generate a class-balanced candidate pool.

    Triangles labels alternate by index (or follow ``target_triangles``).
    Clique Distance items are rejection-sampled per class until each class
    holds ``count // 2`` items, within ``max_attempts_factor * count`` attempts.

    Args:
        task: Benchmark task
        params: Generator parameters for the task
        master_seed: Seed every per-item seed derives from
        count: Pool size (even)
        workers: Worker processes

    Returns:
        Items in index order, independent of ``workers``

    Raises:
        UnsatisfiableGenerationError: If generation exhausts its budget
    """
    task = TaskName(task)
    logger.info(f"Generating {count} {task.value} candidates (seed={master_seed}, workers={workers})")

    if task == TaskName.TRIANGLES:
        jobs = [
            (params, master_seed, i, params.target_triangles if params.target_triangles is not None else i % 2)
            for i in range(count)
        ]
        items = _run_jobs(_triangle_job, jobs, workers)
        logger.info(f"Generated {len(items)} triangles candidates")
        return items

    per_class = count // 2
    budget = params.max_attempts_factor * count
    accepted: List[DatasetItem] = []
    class_counts = {0: 0, 1: 0}
    attempt = 0
    while min(class_counts.values()) < per_class:
        if attempt >= budget:
            logger.error(f"Clique Distance generation exhausted {budget} attempts: {class_counts}")
            raise UnsatisfiableGenerationError(
                f"could not balance classes within {budget} attempts",
                attempts=attempt,
                details={"class_counts": class_counts, "per_class": per_class},
            )
        batch = range(attempt, min(attempt + max(count, 64), budget))
        for item in _run_jobs(_clique_job, [(params, master_seed, a) for a in batch], workers):
            if class_counts[item.label] < per_class:
                class_counts[item.label] += 1
                accepted.append(item.model_copy(update={"id": f"clique-distance-{len(accepted):06d}"}))
        attempt = batch.stop

    logger.info(f"Generated {len(accepted)} clique-distance candidates in {attempt} attempts")
    return accepted
