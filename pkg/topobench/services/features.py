"""
Undermanned feature templates and the frozen feature vocabulary.

Templates: node degree, degrees of both edge ends (unordered), node count
and edge count. The two degree templates are emitted twice, once as a
presence indicator and once as a count. Degrees above the cap share a
single overflow bucket.
"""

from collections import Counter
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, PrivateAttr

from models.graph import Graph


FeatureVector = Dict[str, float]


def _bucket(degree: int, cap: int) -> str:
    return str(degree) if degree <= cap else f">{cap}"


def template_features(g: Graph, degree_cap: int) -> FeatureVector:
    """
    Instantiate all four templates on ``g``; zero-valued entries are omitted.

    Args:
        g: Graph
        degree_cap: Largest degree with its own bucket

    Returns:
        Named sparse feature map
    """
    degrees = g.degrees()
    features: FeatureVector = {}

    for bucket, count in Counter(_bucket(d, degree_cap) for d in degrees).items():
        features[f"degree_present:{bucket}"] = 1.0
        features[f"degree_count:{bucket}"] = float(count)

    pairs = Counter()
    for u, v in g.edges:
        low, high = sorted((degrees[u], degrees[v]))
        pairs[f"{_bucket(low, degree_cap)}-{_bucket(high, degree_cap)}"] += 1
    for pair, count in pairs.items():
        features[f"edge_degrees_present:{pair}"] = 1.0
        features[f"edge_degrees_count:{pair}"] = float(count)

    if g.num_nodes:
        features["num_nodes"] = float(g.num_nodes)
    if g.num_edges:
        features["num_edges"] = float(g.num_edges)
    return features


class FeatureVocabulary(BaseModel):
    """
    Frozen bijection between feature names and dense feature ids.

    Args:
        names: Feature names in id order
        degree_cap: Degree cap the template names were built with
    """
    names: Tuple[str, ...] = Field(..., description="Feature names in id order")
    degree_cap: int = Field(32, ge=1, description="Degree overflow cap")

    _index: Dict[str, int] = PrivateAttr(default_factory=dict)

    def model_post_init(self, __context) -> None:
        self._index = {name: i for i, name in enumerate(self.names)}
        if len(self._index) != len(self.names):
            raise ValueError("feature names must be unique")

    @classmethod
    def from_vectors(cls, vectors: Iterable[FeatureVector], degree_cap: int = 32) -> "FeatureVocabulary":
        """Vocabulary of every name seen in ``vectors``, sorted for stable ids."""
        names = set()
        for vector in vectors:
            names.update(vector)
        return cls(names=tuple(sorted(names)), degree_cap=degree_cap)

    @classmethod
    def build(cls, graphs: Iterable[Graph], degree_cap: int = 32) -> "FeatureVocabulary":
        """Build once from a candidate pool; the result is frozen."""
        return cls.from_vectors((template_features(g, degree_cap) for g in graphs), degree_cap)

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def id_of(self, name: str) -> int:
        return self._index[name]


def extract_features(g: Graph, vocab: FeatureVocabulary) -> FeatureVector:
    """Template features of ``g`` restricted to the frozen vocabulary."""
    return {name: value for name, value in template_features(g, vocab.degree_cap).items() if name in vocab}


def vectorize(vectors: Sequence[FeatureVector], vocab: FeatureVocabulary) -> np.ndarray:
    """
    Dense design matrix, one row per vector; names outside ``vocab`` are dropped.
    """
    matrix = np.zeros((len(vectors), len(vocab)), dtype=np.float64)
    for row, vector in enumerate(vectors):
        for name, value in vector.items():
            if name in vocab:
                matrix[row, vocab.id_of(name)] = value
    return matrix


def labels_of(items: Sequence) -> np.ndarray:
    return np.array([item.label for item in items], dtype=np.float64)


def graphs_of(items: Sequence) -> List[Graph]:
    return [item.graph for item in items]
