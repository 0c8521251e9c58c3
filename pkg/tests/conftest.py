"""
Pytest configuration and fixtures for the topobench tests.

This file contains shared fixtures and configuration for all tests.
"""

import os
import sys
from typing import List

import numpy as np
import pytest

# Add the source directory to the Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "topobench"))

from core.config import RunConfig
from models.graph import Graph
from models.schemas import (
    CliqueGenParams,
    DatasetItem,
    FilterConfig,
    GraphFamily,
    Provenance,
    TriangleGenParams,
)
from services.graph_core import build_graph


def make_item(graph: Graph, label: int, item_id: str, family: GraphFamily = GraphFamily.ER) -> DatasetItem:
    """Wrap a graph into a dataset item with minimal provenance."""
    return DatasetItem(id=item_id, graph=graph, label=label, provenance=Provenance(seed=0, family=family))


def cycle(n: int) -> Graph:
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


@pytest.fixture
def formaldehyde() -> Graph:
    """C=0, H=1, H=2, O=3; atom labels C=0, H=1, O=2; bonds single=0, double=1."""
    return build_graph(
        4,
        [(0, 1), (0, 2), (0, 3)],
        node_labels=[0, 1, 1, 2],
        edge_labels={(0, 1): 0, (0, 2): 0, (0, 3): 1},
    )


@pytest.fixture
def k3() -> Graph:
    return build_graph(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def k4() -> Graph:
    return build_graph(4, [(u, v) for u in range(4) for v in range(u + 1, 4)])


@pytest.fixture
def p3() -> Graph:
    """Path 0 - 1 - 2."""
    return build_graph(3, [(0, 1), (1, 2)])


@pytest.fixture
def c6() -> Graph:
    return cycle(6)


@pytest.fixture
def two_c3() -> Graph:
    """Two disjoint triangles on six nodes."""
    return build_graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def small_triangle_params() -> TriangleGenParams:
    return TriangleGenParams(node_count_range=(8, 14))


@pytest.fixture
def small_clique_params() -> CliqueGenParams:
    return CliqueGenParams(base_node_range=(5, 10))


@pytest.fixture
def small_filter_config() -> FilterConfig:
    return FilterConfig(folds=5, train_folds=3, train_size=20, test_size=10)


@pytest.fixture
def collision_items(c6, two_c3) -> List[DatasetItem]:
    """Label-discordant pairs the undermanned templates cannot tell apart."""
    items = []
    for i in range(10):
        items.append(make_item(c6, 0, f"c6-{i}"))
        items.append(make_item(two_c3, 1, f"two-c3-{i}"))
    return items


@pytest.fixture
def run_config(tmp_path) -> RunConfig:
    """Desk-sized run writing into a temporary directory."""
    return RunConfig(
        task="triangles",
        seed=7,
        candidates=120,
        out=str(tmp_path / "run"),
        triangles={"node_count_range": (8, 16)},
        clique={"base_node_range": (5, 10)},
        filter={"folds": 5, "train_folds": 3, "train_size": 40, "test_size": 20},
        logreg={"epochs": 200},
        graphlets={"samples": 2000},
    )
