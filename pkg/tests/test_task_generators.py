"""
Tests for the Triangles and Clique Distance generators.
"""

from math import comb

import numpy as np
import pytest

from core.exceptions import UnsatisfiableGenerationError
from models.schemas import CliqueGenParams, GraphFamily, TaskName, TriangleGenParams
from services.graph_core import (
    build_graph,
    enumerate_triangles,
    find_k_cliques,
    shortest_distance_between_sets,
)
from services.task_generators import (
    attach_clique,
    derive_item_seed,
    gen_ba_graph,
    gen_clique_item,
    gen_er_graph,
    gen_knn_graph,
    gen_triangle_item,
    generate_pool,
    reduce_triangles,
)


class TestSeeds:
    """Test cases for per-item seed derivation."""

    def test_stable(self):
        assert derive_item_seed(7, 3) == derive_item_seed(7, 3)

    def test_streams_and_indices_differ(self):
        seeds = {derive_item_seed(7, 3), derive_item_seed(7, 4), derive_item_seed(8, 3), derive_item_seed(7, 3, "x")}

        assert len(seeds) == 4

    def test_fits_numpy(self):
        seed = derive_item_seed(123, "triangles-000001", "graphlets")

        assert 0 <= seed < 2**63
        np.random.default_rng(seed)


class TestRandomFamilies:
    """Test cases for ER, kNN and BA graphs."""

    def test_er_extremes(self, rng):
        assert gen_er_graph(rng, 5, 0.0).num_edges == 0
        assert gen_er_graph(rng, 4, 1.0).num_edges == 6

    def test_er_edge_count_statistics(self):
        """Test that n=30, p=0.1 edge counts stay within 4 sigma of 43.5."""
        mean = 0.1 * comb(30, 2)
        sigma = np.sqrt(comb(30, 2) * 0.1 * 0.9)
        for seed in range(50):
            edges = gen_er_graph(np.random.default_rng(seed), 30, 0.1).num_edges
            assert abs(edges - mean) <= 4 * sigma

    def test_knn_single_edge(self, rng):
        assert gen_knn_graph(rng, 2, 1).edges == ((0, 1),)

    def test_knn_min_degree(self):
        """Test that every node has degree at least k."""
        for seed in range(20):
            g = gen_knn_graph(np.random.default_rng(seed), 15, 3)
            assert min(g.degrees()) >= 3

    def test_knn_deterministic(self):
        """Test that a fixed seed reproduces the same edge set."""
        first = gen_knn_graph(np.random.default_rng(15), 15, 2)
        second = gen_knn_graph(np.random.default_rng(15), 15, 2)

        assert first.edges == second.edges

    def test_ba_seed_only(self, rng):
        assert gen_ba_graph(rng, 3, 2).edges == ((0, 1), (0, 2), (1, 2))

    def test_ba_edge_count(self, rng):
        assert gen_ba_graph(rng, 5, 2).num_edges == 7
        assert gen_ba_graph(rng, 20, 3).num_edges == comb(4, 2) + 16 * 3

    def test_ba_has_no_k_clique(self):
        """Test that BA(20, m=2) never holds a 4-clique."""
        for seed in range(200):
            g = gen_ba_graph(np.random.default_rng(seed), 20, 2)
            assert find_k_cliques(g, 4) == []


class TestReduceTriangles:
    """Test cases for reduce_triangles."""

    def test_triangle_free_unchanged(self, c6, rng):
        assert reduce_triangles(rng, c6, 0) is c6

    def test_k4_to_one(self, k4, rng):
        result = reduce_triangles(rng, k4, 1)

        assert len(enumerate_triangles(result)) == 1
        assert set(result.edges) <= set(k4.edges)

    def test_to_zero_is_subgraph(self):
        """Test that reduction to zero never adds edges."""
        for seed in range(30):
            rng = np.random.default_rng(seed)
            g = gen_er_graph(rng, 12, 0.5)
            result = reduce_triangles(rng, g, 0)
            assert enumerate_triangles(result) == []
            assert set(result.edges) <= set(g.edges)
            assert result.num_nodes == g.num_nodes

    def test_to_one_on_dense_graphs(self):
        for seed in range(30):
            rng = np.random.default_rng(seed)
            result = reduce_triangles(rng, gen_er_graph(rng, 10, 0.7), 1)
            assert len(enumerate_triangles(result)) == 1

    def test_unsatisfiable(self, c6, rng):
        with pytest.raises(UnsatisfiableGenerationError):
            reduce_triangles(rng, c6, 1)


class TestTriangleItems:
    """Test cases for Triangles items."""

    @pytest.mark.parametrize("label", [0, 1])
    def test_label_matches_oracle(self, label, small_triangle_params):
        for seed in range(40):
            item = gen_triangle_item(np.random.default_rng(seed), small_triangle_params, label, seed=seed)
            assert len(enumerate_triangles(item.graph)) == label
            assert item.label == label

    def test_provenance(self, small_triangle_params):
        item = gen_triangle_item(np.random.default_rng(1), small_triangle_params, 1, seed=1, item_id="t-1")
        params = item.provenance.params

        assert item.id == "t-1"
        assert item.provenance.family in (GraphFamily.ER, GraphFamily.KNN)
        assert params["n"] == item.graph.num_nodes
        assert params["raw_triangles"] >= 1
        assert isinstance(params["connected"], bool)

    def test_er_probability_from_mean_degree(self):
        item = gen_triangle_item(np.random.default_rng(0), TriangleGenParams(family_mix=1.0), 0)
        params = item.provenance.params

        assert item.provenance.family == GraphFamily.ER
        assert params["p"] == pytest.approx(0.4 / (params["n"] - 1))

    def test_default_family_mix_by_label(self):
        """Test that sparse ER rarely carries label 1, so label-1 items are mostly kNN."""
        params = TriangleGenParams()
        knn_share = {}
        for label in (0, 1):
            items = [gen_triangle_item(np.random.default_rng(seed), params, label) for seed in range(200)]
            knn_share[label] = sum(item.provenance.family == GraphFamily.KNN for item in items) / 200

        assert 0.1 <= knn_share[0] <= 0.4
        assert knn_share[1] >= 0.85

    def test_retries_exhausted(self):
        """Test that an edgeless family cannot produce label 1."""
        params = TriangleGenParams(node_count_range=(5, 5), er_edge_prob=0.0, family_mix=1.0, max_retries=3)

        with pytest.raises(UnsatisfiableGenerationError) as exc_info:
            gen_triangle_item(np.random.default_rng(0), params, 1)

        assert exc_info.value.attempts == 3


class TestCliqueItems:
    """Test cases for clique attachment and Clique Distance items."""

    def test_attach_to_single_node(self, rng):
        base = build_graph(1, [])
        g, clique = attach_clique(rng, base, 0, 4)

        assert g.num_nodes == 5
        assert g.num_edges == 7
        assert clique == frozenset({1, 2, 3, 4})
        assert find_k_cliques(g, 4) == [clique]

    def test_adjacent_base_nodes_give_label_zero(self, rng):
        """Test bridge + edge + bridge = distance 3 below threshold 4."""
        base = build_graph(2, [(0, 1)])
        g, a = attach_clique(rng, base, 0, 4)
        g, b = attach_clique(rng, g, 1, 4)

        assert shortest_distance_between_sets(g, a, b) == 3

    def test_items_match_oracles(self, small_clique_params):
        """Test exactly two 4-cliques, none in the base, and the strict threshold rule."""
        for seed in range(150):
            item = gen_clique_item(np.random.default_rng(seed), small_clique_params, seed=seed)
            params = item.provenance.params
            cliques = find_k_cliques(item.graph, 4)
            assert len(cliques) == 2
            assert all(max(c) >= params["base_nodes"] for c in cliques)
            distance = shortest_distance_between_sets(item.graph, cliques[0], cliques[1])
            assert distance == params["distance"]
            assert item.label == (0 if distance is not None and distance < 4 else 1)

    def test_distance_four_is_label_one(self):
        """Test that a distance equal to the threshold gives label 1."""
        params = CliqueGenParams(base_node_range=(5, 20))
        items = [gen_clique_item(np.random.default_rng(seed), params, seed=seed) for seed in range(300)]
        at_threshold = [item for item in items if item.provenance.params["distance"] == 4]

        assert at_threshold
        assert all(item.label == 1 for item in at_threshold)


class TestGeneratePool:
    """Test cases for generate_pool."""

    def test_triangles_balanced_and_deterministic(self, small_triangle_params):
        first = generate_pool(TaskName.TRIANGLES, small_triangle_params, 7, 40)
        second = generate_pool("triangles", small_triangle_params, 7, 40)

        assert [item.label for item in first].count(1) == 20
        assert [item.model_dump() for item in first] == [item.model_dump() for item in second]
        assert first[3].id == "triangles-000003"

    def test_clique_balanced(self, small_clique_params):
        items = generate_pool(TaskName.CLIQUE_DISTANCE, small_clique_params, 7, 30)
        labels = [item.label for item in items]

        assert labels.count(0) == labels.count(1) == 15
        assert [item.id for item in items] == [f"clique-distance-{i:06d}" for i in range(30)]

    def test_clique_budget_exhausted(self):
        """Test that an unreachable class balance raises after the attempt budget."""
        params = CliqueGenParams(base_node_range=(5, 5), distance_threshold=1, max_attempts_factor=1)

        with pytest.raises(UnsatisfiableGenerationError) as exc_info:
            generate_pool(TaskName.CLIQUE_DISTANCE, params, 7, 10)

        assert exc_info.value.attempts == 10
