"""
Kernel-feature baselines: WL subtree histograms and graphlet counts.

Explicit feature maps are classified with the in-repo logistic regression
instead of an SVM, so baselines compare feature-map power only.
"""

import logging
import threading
from collections import Counter
from itertools import combinations
from typing import Any, Callable, Dict, Hashable, List, Optional, Sequence

import numpy as np
from sklearn.metrics import accuracy_score, f1_score

from core.exceptions import DatasetFormatError, GraphValidationError, UsageError
from models.graph import Graph
from models.schemas import (
    BaselineName,
    BaselineReport,
    DatasetItem,
    GraphletConfig,
    GraphletMode,
    LogRegHyper,
    TaskName,
    WLConfig,
    WLInitialLabeling,
)
from services.features import FeatureVector, FeatureVocabulary, labels_of, template_features, vectorize
from services.graph_core import adjacency_mask, enumerate_triangles
from services.logreg import train_logreg
from services.task_generators import derive_item_seed


logger = logging.getLogger(__name__)


class WLLabelDictionary:
    """
    Dataset-wide compression dictionary for WL refinement.

    Signatures receive consecutive ids in first-seen order; assignment is
    serialized so concurrent featurization stays consistent.
    """

    def __init__(self):
        self._ids: Dict[Hashable, int] = {}
        self._lock = threading.Lock()

    def compress(self, signature: Hashable) -> int:
        with self._lock:
            label = self._ids.get(signature)
            if label is None:
                label = len(self._ids)
                self._ids[signature] = label
            return label

    def __len__(self) -> int:
        return len(self._ids)


def _initial_colors(g: Graph, labeling: WLInitialLabeling) -> List[Hashable]:
    if labeling == WLInitialLabeling.UNIFORM:
        return [0] * g.num_nodes
    if labeling == WLInitialLabeling.DEGREE:
        return list(g.degrees())
    if g.node_labels is None:
        raise GraphValidationError("node-labels initial labeling requires a node-labeled graph")
    return list(g.node_labels)


def wl_features(g: Graph, cfg: WLConfig, dictionary: Optional[WLLabelDictionary] = None) -> FeatureVector:
    """
    Histogram of compressed WL labels over iterations 0..h.

    Iteration i relabels each node by the compressed signature
    (i, own label, sorted neighbor labels). Share ``dictionary`` across a
    dataset so equal signatures map to equal feature names.
    """
    dictionary = dictionary if dictionary is not None else WLLabelDictionary()
    colors = [dictionary.compress(("init", c)) for c in _initial_colors(g, cfg.initial_labeling)]
    histogram = Counter(colors)
    for iteration in range(1, cfg.iterations + 1):
        colors = [
            dictionary.compress((iteration, colors[v], tuple(sorted(colors[u] for u in g.neighbors(v)))))
            for v in range(g.num_nodes)
        ]
        histogram.update(colors)
    return {f"wl:{label}": float(count) for label, count in histogram.items()}


_TYPES_3 = {
    (0, 0, 0): ("empty", False),
    (0, 1, 1): ("edge", False),
    (1, 1, 2): ("path", True),
    (2, 2, 2): ("triangle", True),
}

_TYPES_4 = {
    (0, 0, 0, 0): ("empty", False),
    (0, 0, 1, 1): ("edge", False),
    (0, 1, 1, 2): ("path3", False),
    (1, 1, 1, 1): ("two-edges", False),
    (0, 2, 2, 2): ("triangle", False),
    (1, 1, 1, 3): ("star", True),
    (1, 1, 2, 2): ("path4", True),
    (2, 2, 2, 2): ("cycle4", True),
    (1, 2, 2, 3): ("paw", True),
    (2, 2, 3, 3): ("diamond", True),
    (3, 3, 3, 3): ("clique4", True),
}


def graphlet_type_name(degree_sequence: Sequence[int]) -> str:
    """
    Feature name of the induced subgraph with the given degree sequence.

    Sorted degree sequences identify every 3- and 4-node graph up to
    isomorphism. Disconnected types carry a ``disconnected:`` prefix.
    """
    key = tuple(sorted(int(d) for d in degree_sequence))
    table = _TYPES_3 if len(key) == 3 else _TYPES_4
    name, connected = table[key]
    prefix = "" if connected else "disconnected:"
    return f"graphlet{len(key)}:{prefix}{name}"


def graphlet_counts_exact(g: Graph, size: int = 3) -> FeatureVector:
    """
    Exact counts of connected induced 3-node subgraphs.

    Triangles come from the triangle oracle; induced 2-paths are the
    wedges sum C(deg, 2) minus three per triangle.
    """
    if size != 3:
        raise UsageError(f"exact graphlet counting supports size 3 only, got {size}")
    triangles = len(enumerate_triangles(g))
    wedges = sum(d * (d - 1) // 2 for d in g.degrees())
    counts = {"graphlet3:triangle": float(triangles), "graphlet3:path": float(wedges - 3 * triangles)}
    return {name: value for name, value in counts.items() if value}


def graphlet_type_counts(g: Graph, size: int) -> Dict[str, int]:
    """Exhaustive type counts over all node subsets of ``size`` (test oracle)."""
    counts: Counter = Counter()
    for subset in combinations(range(g.num_nodes), size):
        degrees = [sum(g.has_edge(u, v) for v in subset if v != u) for u in subset]
        counts[graphlet_type_name(degrees)] += 1
    return dict(counts)


def graphlet_counts_sampled(rng: np.random.Generator, g: Graph, cfg: GraphletConfig) -> FeatureVector:
    """
    Type frequencies from uniformly sampled node subsets.

    Each sample is the prefix of a uniform random permutation of the nodes,
    so subsets are uniform. Frequencies are normalized by the sample count;
    disconnected types are tallied under their own names.
    """
    size = cfg.size
    if g.num_nodes < size:
        raise GraphValidationError(f"graph has {g.num_nodes} nodes, fewer than graphlet size {size}")

    subsets = np.argsort(rng.random((cfg.samples, g.num_nodes)), axis=1)[:, :size]
    adjacency = adjacency_mask(g)
    degrees = np.zeros((cfg.samples, size), dtype=np.int64)
    for i, j in combinations(range(size), 2):
        present = adjacency[subsets[:, i], subsets[:, j]]
        degrees[:, i] += present
        degrees[:, j] += present
    sequences, counts = np.unique(np.sort(degrees, axis=1), axis=0, return_counts=True)
    return {
        graphlet_type_name(sequence): float(count) / cfg.samples
        for sequence, count in zip(sequences.tolist(), counts.tolist())
    }


class Featurizer:
    """
    Named per-item feature map with a configuration echo.

    Args:
        name: Baseline name
        func: Callable mapping an item to its feature vector
        config: Configuration recorded in reports
    """

    def __init__(self, name: str, func: Callable[[DatasetItem], FeatureVector], config: Dict[str, Any]):
        self.name = name
        self.func = func
        self.config = config

    def __call__(self, item: DatasetItem) -> FeatureVector:
        return self.func(item)


def build_featurizer(
    name: BaselineName,
    wl: Optional[WLConfig] = None,
    graphlets: Optional[GraphletConfig] = None,
    degree_cap: int = 32,
    seed: int = 0,
) -> Featurizer:
    """
    Featurizer for a CLI baseline name.

    Sampled graphlets draw from a per-item generator seeded by (seed, item id),
    so features do not depend on featurization order. Next to each frequency
    the sampled featurizer emits a ``:seen`` indicator for every type hit at
    least once, so one triangle among thousands of subsets reads as 1.0.
    """
    name = BaselineName(name)
    if name == BaselineName.UNDERMANNED:
        return Featurizer(name.value, lambda item: template_features(item.graph, degree_cap), {"degree_cap": degree_cap})
    if name == BaselineName.WL:
        wl = wl or WLConfig()
        dictionary = WLLabelDictionary()
        return Featurizer(name.value, lambda item: wl_features(item.graph, wl, dictionary), wl.model_dump(mode="json"))
    if name == BaselineName.GRAPHLET_EXACT:
        return Featurizer(name.value, lambda item: graphlet_counts_exact(item.graph, 3), {"size": 3, "mode": "exact"})

    graphlets = graphlets or GraphletConfig()
    sampled = graphlets.model_copy(update={"mode": GraphletMode.SAMPLED})

    def featurize(item: DatasetItem) -> FeatureVector:
        rng = np.random.default_rng(derive_item_seed(seed, item.id, "graphlets"))
        frequencies = graphlet_counts_sampled(rng, item.graph, sampled)
        return {**frequencies, **{f"{name}:seen": 1.0 for name in frequencies}}

    return Featurizer(name.value, featurize, {**sampled.model_dump(mode="json"), "seed": seed})


def run_baseline(
    train: Sequence[DatasetItem],
    test: Sequence[DatasetItem],
    featurizer: Featurizer,
    hyper: Optional[LogRegHyper] = None,
    task: Optional[TaskName] = None,
) -> BaselineReport:
    """
    Train a linear model on featurized train items and score the test split.

    The vocabulary is frozen from train features; test-only names are ignored.

    Raises:
        DatasetFormatError: If either split is empty or the splits share ids
    """
    hyper = hyper or LogRegHyper()
    if not train or not test:
        raise DatasetFormatError(
            "baseline needs non-empty train and test splits",
            details={"train_size": len(train), "test_size": len(test)},
        )
    shared = {item.id for item in train} & {item.id for item in test}
    if shared:
        raise DatasetFormatError("train and test splits overlap", details={"ids": sorted(shared)[:10]})

    logger.info(f"Running baseline {featurizer.name} on {len(train)} train / {len(test)} test items")
    train_vectors = [featurizer(item) for item in train]
    test_vectors = [featurizer(item) for item in test]
    vocab = FeatureVocabulary.from_vectors(train_vectors)

    model = train_logreg(vectorize(train_vectors, vocab), labels_of(train), hyper)
    y_true = labels_of(test).astype(np.int64)
    y_pred = model.predict(vectorize(test_vectors, vocab))

    report = BaselineReport(
        baseline=featurizer.name,
        task=task,
        accuracy=float(accuracy_score(y_true, y_pred)),
        f1=float(f1_score(y_true, y_pred, zero_division=0)),
        train_size=len(train),
        test_size=len(test),
        config={"featurizer": featurizer.config, "logreg": hyper.model_dump(), "features": len(vocab)},
    )
    logger.info(f"Baseline {featurizer.name}: accuracy={report.accuracy:.4f} f1={report.f1:.4f}")
    return report
