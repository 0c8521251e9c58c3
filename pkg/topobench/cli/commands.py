"""
Command handlers for the topobench CLI.

Each handler takes a validated RunConfig, reads and writes files under the
run's output directory, appends a CommandRecord to the run manifest and
returns a JSON-serializable summary.
"""

import json
import logging
from collections import Counter
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from core.config import RunConfig, settings
from core.exceptions import OracleMismatchError, TopoBenchError, UsageError
from models.schemas import BaselineName, CommandRecord, DatasetItem, GraphFamily, Manifest
from services.dataset_io import (
    append_command_record,
    export_tensor_tsv,
    read_dataset,
    read_manifest,
    write_dataset,
    write_manifest,
)
from services.features import FeatureVocabulary, graphs_of
from services.filtering import cv_accuracy, filter_dataset, overlapping_cv, overlapping_cv_error_counts
from services.graph_core import (
    adjacency_mask,
    enumerate_triangles,
    find_k_cliques,
    permute_nodes,
    shortest_distance_between_sets,
)
from services.kernels import build_featurizer, run_baseline
from services.task_generators import derive_item_seed, generate_pool
from services.topo_tensor import (
    draw_topology_permutations,
    graph_to_tensor,
    init_mode_weights,
    initial_embeddings,
    initial_node_features,
    lookup_node_table,
    plan_embedding,
    reindex_mode_weights,
    shuffle_topology_indices,
)


logger = logging.getLogger(__name__)

CANDIDATES_FILE = "candidates.jsonl"
TRAIN_FILE = "train.jsonl"
TEST_FILE = "test.jsonl"
MANIFEST_FILE = "manifest.json"
TENSOR_DEMO_DIR = "tensor_demo"


def _class_counts(items: List[DatasetItem]) -> Dict[str, int]:
    counts = Counter(str(item.label) for item in items)
    return {"0": counts.get("0", 0), "1": counts.get("1", 0)}


def _new_manifest(cfg: RunConfig, candidate_count: int) -> Manifest:
    return Manifest(
        tool_version=settings.VERSION,
        task=cfg.task,
        master_seed=cfg.seed,
        generator_params=cfg.generator_params().model_dump(mode="json"),
        candidate_count=candidate_count,
    )


def _record(cfg: RunConfig, command: str, status: str, summary: Dict[str, Any]) -> None:
    """Append a command record when the run directory already has a manifest."""
    path = cfg.out_dir / MANIFEST_FILE
    if path.exists():
        append_command_record(path, CommandRecord(command=command, status=status, summary=summary))


def run_command(name: str, handler: Callable[..., Dict[str, Any]], cfg: RunConfig, **kwargs) -> Dict[str, Any]:
    """
    Run a handler, logging failures and recording them in the manifest before re-raising.
    """
    try:
        logger.info(f"Running {name} (task={cfg.task.value}, seed={cfg.seed}, out={cfg.out})")
        return handler(cfg, **kwargs)
    except TopoBenchError as e:
        logger.error(f"{name} failed: {e.message}")
        try:
            _record(cfg, name, "failed", {"error": type(e).__name__, "message": e.message})
        except TopoBenchError:
            logger.warning(f"Could not record the failure of {name} in the manifest")
        raise


def cmd_generate(cfg: RunConfig) -> Dict[str, Any]:
    """
    Generate a balanced candidate pool and start a fresh manifest.

    Raises:
        UnsatisfiableGenerationError: If generation exhausts its retry budget
    """
    items = generate_pool(cfg.task, cfg.generator_params(), cfg.seed, cfg.candidates, cfg.workers)
    path = cfg.out_dir / CANDIDATES_FILE
    write_dataset(path, items)

    counts = _class_counts(items)
    summary = {"candidates": len(items), "class_counts": counts, "path": str(path)}
    manifest = _new_manifest(cfg, len(items))
    manifest.class_counts["candidates"] = counts
    manifest.commands.append(CommandRecord(command="generate", status="ok", summary=summary))
    write_manifest(cfg.out_dir / MANIFEST_FILE, manifest)
    return summary


def cmd_filter(cfg: RunConfig, candidates: Optional[str] = None) -> Dict[str, Any]:
    """
    Run the undermanned filter and write balanced train/test splits.

    Pre-filter accuracy is the overlapping-CV accuracy on the candidate
    pool; post-filter accuracy repeats the procedure on the selected train
    split with the same vocabulary and hyperparameters.

    Raises:
        InfeasibleSelectionError: If a class cannot fill its split targets
    """
    path = Path(candidates) if candidates else cfg.out_dir / CANDIDATES_FILE
    items = read_dataset(path)
    manifest_path = cfg.out_dir / MANIFEST_FILE
    manifest = read_manifest(manifest_path) if manifest_path.exists() else _new_manifest(cfg, len(items))
    manifest.candidate_count = len(items)
    manifest.class_counts["candidates"] = _class_counts(items)

    vocab = FeatureVocabulary.build(graphs_of(items), cfg.filter.degree_cap)
    fold_seed = derive_item_seed(cfg.seed, 0, "folds")
    pool = overlapping_cv(items, cfg.filter, cfg.logreg, seed=fold_seed, vocab=vocab)
    before = cv_accuracy(pool.errors, cfg.filter)
    logger.info(f"Undermanned CV accuracy before filtering: {before:.4f}")

    select_rng = np.random.default_rng(derive_item_seed(cfg.seed, 0, "select"))
    result = filter_dataset(select_rng, items, pool.errors, cfg.filter, scores=pool.scores)
    after_errors = overlapping_cv_error_counts(result.train, cfg.filter, cfg.logreg, seed=fold_seed, vocab=vocab)
    after = cv_accuracy(after_errors, cfg.filter)
    logger.info(f"Undermanned CV accuracy after filtering: {after:.4f}")

    write_dataset(cfg.out_dir / TRAIN_FILE, result.train)
    write_dataset(cfg.out_dir / TEST_FILE, result.test)

    summary = {
        "cv_accuracy_before": before,
        "cv_accuracy_after": after,
        "train": len(result.train),
        "test": len(result.test),
        "hard_counts": result.hard_counts,
    }
    manifest.filter_config = cfg.filter.model_dump(mode="json")
    manifest.class_counts["train"] = _class_counts(result.train)
    manifest.class_counts["test"] = _class_counts(result.test)
    manifest.cv_accuracy_before = before
    manifest.cv_accuracy_after = after
    manifest.warnings.extend(w for w in result.warnings if w not in manifest.warnings)
    manifest.commands.append(CommandRecord(command="filter", status="ok", summary=summary))
    write_manifest(manifest_path, manifest)
    return summary


def _verify_triangles(item: DatasetItem) -> Tuple[int, bool]:
    count = len(enumerate_triangles(item.graph))
    return count, count in (0, 1) and count == item.label


def _verify_clique(item: DatasetItem) -> Tuple[Dict[str, Any], bool]:
    params = item.provenance.params
    k = int(params["clique_size"])
    base_nodes = int(params["base_nodes"])
    cliques = find_k_cliques(item.graph, k)
    in_base = sum(1 for c in cliques if max(c) < base_nodes)
    facts: Dict[str, Any] = {"cliques": len(cliques), "in_base": in_base, "distance": None}
    if len(cliques) != 2 or in_base:
        return facts, False
    distance = shortest_distance_between_sets(item.graph, cliques[0], cliques[1])
    facts["distance"] = distance
    expected = 0 if distance is not None and distance < int(params["threshold"]) else 1
    return facts, expected == item.label


def cmd_verify(cfg: RunConfig, dataset: Optional[str] = None) -> Dict[str, Any]:
    """
    Recompute every label with the exact oracles.

    Triangles items are checked by triangle count; Clique Distance items (BA
    family) by exactly two k-cliques outside the base graph and the strict
    threshold rule on their distance.

    Raises:
        OracleMismatchError: Listing the ids of inconsistent items
    """
    path = Path(dataset) if dataset else cfg.out_dir / CANDIDATES_FILE
    items = read_dataset(path)

    triangle_hist: Counter = Counter()
    distance_hist: Counter = Counter()
    clique_hist: Counter = Counter()
    bad: List[str] = []
    for item in items:
        if item.provenance.family == GraphFamily.BA:
            facts, ok = _verify_clique(item)
            clique_hist[str(facts["cliques"])] += 1
            distance = facts["distance"]
            distance_hist["unreachable" if distance is None else str(distance)] += 1
        else:
            count, ok = _verify_triangles(item)
            triangle_hist[str(count)] += 1
        if not ok:
            bad.append(item.id)

    report: Dict[str, Any] = {"items": len(items), "consistent": len(items) - len(bad), "path": str(path)}
    if triangle_hist:
        report["triangle_histogram"] = dict(sorted(triangle_hist.items()))
    if clique_hist:
        report["clique_count_histogram"] = dict(sorted(clique_hist.items()))
        report["distance_histogram"] = dict(sorted(distance_hist.items()))
    logger.info(f"Verified {len(items)} items from {path}: {len(bad)} inconsistent")

    if bad:
        raise OracleMismatchError(
            f"{len(bad)} of {len(items)} items disagree with their oracle", item_ids=bad, details=report
        )
    _record(cfg, "verify", "ok", report)
    return report


def cmd_baseline(cfg: RunConfig, train: Optional[str] = None, test: Optional[str] = None) -> Dict[str, Any]:
    """
    Featurize the splits with the selected baseline and report test metrics.

    Raises:
        UsageError: For an unknown baseline name
        DatasetFormatError: If a split is empty
    """
    try:
        name = BaselineName(cfg.baseline)
    except ValueError:
        raise UsageError(f"unknown baseline {cfg.baseline!r}", details={"choices": [b.value for b in BaselineName]})

    train_items = read_dataset(Path(train) if train else cfg.out_dir / TRAIN_FILE)
    test_items = read_dataset(Path(test) if test else cfg.out_dir / TEST_FILE)
    featurizer = build_featurizer(name, cfg.wl, cfg.graphlets, cfg.filter.degree_cap, seed=cfg.seed)
    report = run_baseline(train_items, test_items, featurizer, cfg.logreg, cfg.task)

    path = cfg.out_dir / f"baseline_{name.value}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report.model_dump(mode="json"), sort_keys=True, indent=2) + "\n", encoding="utf-8")

    summary = {"baseline": name.value, "accuracy": report.accuracy, "f1": report.f1, "path": str(path)}
    _record(cfg, "baseline", "ok", summary)
    return summary


def cmd_tensor_demo(
    cfg: RunConfig,
    dataset: Optional[str] = None,
    main_mode: int = 0,
    width: int = 8,
    node_table: str = "tensor",
    limit: Optional[int] = None,
    shuffle: bool = False,
) -> Dict[str, Any]:
    """
    Build initial node features for dataset graphs through the tensor pipeline.

    Per item: the sparse tensor as TSV, then node features
    concat(local embedding, neighbor sum) and the adjacency mask, collected
    in embeddings.jsonl. Local embeddings come from the planned tensor
    pipeline or from a per-index lookup table. Weights are seeded per item.

    With ``shuffle`` the topology indices of every tensor are relabeled by a
    seeded bijection, recorded as ``perm``, and the topology weight rows
    follow it: row perm[i] of the features equals row i of the unshuffled
    run. Lookup tables stay tied to indices and do not follow the shuffle.

    Raises:
        PlanError: If no embedding plan exists for ``main_mode``
        UsageError: For an unknown node table source
    """
    if node_table not in ("tensor", "lookup"):
        raise UsageError(f"unknown node table source {node_table!r}", details={"choices": ["tensor", "lookup"]})
    path = Path(dataset) if dataset else cfg.out_dir / CANDIDATES_FILE
    items = read_dataset(path)
    if limit is not None:
        items = items[:limit]

    demo_dir = cfg.out_dir / TENSOR_DEMO_DIR
    demo_dir.mkdir(parents=True, exist_ok=True)
    lines: List[str] = []
    widths = set()
    for item in items:
        g = item.graph
        tensor = graph_to_tensor(g)
        rng = np.random.default_rng(derive_item_seed(cfg.seed, item.id, "tensor-demo"))
        plan = plan_embedding(tensor, main_mode)
        weights = init_mode_weights(rng, tensor, plan, width)

        perms = None
        if shuffle:
            shuffle_rng = np.random.default_rng(derive_item_seed(cfg.seed, item.id, "tensor-shuffle"))
            perms = draw_topology_permutations(shuffle_rng, tensor)
            weights = reindex_mode_weights(weights, tensor, perms)
            tensor = shuffle_topology_indices(shuffle_rng, tensor, perms)
            g = permute_nodes(g, perms["node"])
        export_tensor_tsv(demo_dir / f"{item.id}.tsv", tensor)

        if node_table == "tensor":
            table = initial_embeddings(tensor, weights, plan).node_table(g.num_nodes)
        else:
            table = lookup_node_table(rng, g.num_nodes, width)
        features = initial_node_features(g, table)
        widths.add(int(features.shape[1]))
        record = {
            "id": item.id,
            "main_mode": main_mode,
            "node_table": node_table,
            "features": features.tolist(),
            "mask": adjacency_mask(g).astype(int).tolist(),
        }
        if perms is not None:
            record["perm"] = perms["node"].tolist()
        lines.append(json.dumps(record, sort_keys=True, separators=(",", ":")) + "\n")

    embeddings_path = demo_dir / "embeddings.jsonl"
    embeddings_path.write_text("".join(lines), encoding="utf-8")
    logger.info(f"Wrote node features of {len(items)} graphs to {embeddings_path}")

    summary = {
        "items": len(items),
        "feature_widths": sorted(widths),
        "path": str(embeddings_path),
        "shuffled": shuffle,
    }
    _record(cfg, "tensor-demo", "ok", summary)
    return summary


COMMANDS: Dict[str, Callable[..., Dict[str, Any]]] = {
    "generate": cmd_generate,
    "filter": cmd_filter,
    "verify": cmd_verify,
    "baseline": cmd_baseline,
    "tensor-demo": cmd_tensor_demo,
}
