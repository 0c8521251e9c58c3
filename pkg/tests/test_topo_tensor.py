"""
Tests for sparse/mixed tensors, mode products and initial embeddings.
"""

import numpy as np
import pytest

from core.exceptions import PlanError, TensorShapeError
from services.graph_core import adjacency_mask, build_graph, permute_nodes
from services.task_generators import gen_er_graph
from services.topo_tensor import (
    EmbeddingTable,
    MixedTensor,
    ModeKind,
    SparseTensor,
    StepOp,
    dense_mode_product,
    draw_topology_permutations,
    graph_to_tensor,
    init_mode_weights,
    initial_embeddings,
    initial_node_features,
    label_embed,
    mode_product_mixed,
    plan_embedding,
    reindex_mode_weights,
    shuffle_topology_indices,
    to_dense,
)


FORMALDEHYDE_ROWS = [
    [0, 1, 0, 1, 0],
    [0, 2, 0, 1, 0],
    [0, 3, 0, 2, 1],
    [1, 0, 1, 0, 0],
    [2, 0, 1, 0, 0],
    [3, 0, 2, 0, 1],
]


def random_sparse(rng, dims, density=0.3) -> SparseTensor:
    dense = np.where(rng.random(dims) < density, rng.normal(size=dims), 0.0)
    return SparseTensor.from_dense(dense)


class TestSparseTensor:
    """Test cases for SparseTensor construction."""

    def test_rows_sorted(self):
        t = SparseTensor([[1, 0], [0, 1]], [2.0, 3.0], (2, 2))

        assert t.indices.tolist() == [[0, 1], [1, 0]]
        assert t.weights.tolist() == [3.0, 2.0]

    def test_out_of_range(self):
        with pytest.raises(TensorShapeError):
            SparseTensor([[0, 2]], [1.0], (2, 2))

    def test_duplicate_rows(self):
        with pytest.raises(TensorShapeError):
            SparseTensor([[0, 1], [0, 1]], [1.0, 1.0], (2, 2))

    def test_label_mode_single_valued(self):
        """Test that a label mode may hold one value per position of the other modes."""
        with pytest.raises(TensorShapeError):
            SparseTensor([[0, 0], [0, 1]], [1.0, 1.0], (1, 2), [ModeKind.TOPOLOGY, ModeKind.LABEL])

    def test_dependency_on_topology_mode_rejected(self):
        with pytest.raises(TensorShapeError):
            SparseTensor([[0, 1]], [1.0], (2, 2), label_dependencies={1: (0,)})

    def test_empty(self):
        t = SparseTensor(np.zeros((0, 3)), [], (2, 2, 2))

        assert t.nnz == 0
        assert to_dense(t).sum() == 0.0

    def test_dense_round_trip(self, rng):
        dense = np.where(rng.random((3, 4, 2)) < 0.4, 1.5, 0.0)

        assert np.array_equal(to_dense(SparseTensor.from_dense(dense)), dense)

    def test_dense_guard(self):
        t = SparseTensor([[0, 0, 0]], [1.0], (1000, 1000, 10))

        with pytest.raises(TensorShapeError):
            to_dense(t)

    def test_reorder_modes(self, formaldehyde):
        t = graph_to_tensor(formaldehyde).reorder_modes([1, 0, 3, 2, 4])

        assert t.label_dependencies == {2: (0,), 3: (1,), 4: (0, 1)}
        assert to_dense(t).transpose(1, 0, 3, 2, 4).tolist() == to_dense(graph_to_tensor(formaldehyde)).tolist()


class TestGraphToTensor:
    """Test cases for the graph encoding."""

    def test_formaldehyde_rows(self, formaldehyde):
        """Test the six directed bond rows with atom and bond labels."""
        t = graph_to_tensor(formaldehyde)

        assert t.indices.tolist() == FORMALDEHYDE_ROWS
        assert t.weights.tolist() == [1.0] * 6
        assert t.mode_dims == (4, 4, 3, 3, 2)
        assert t.topology_modes == (0, 1)
        assert t.label_dependencies == {2: (0,), 3: (1,), 4: (0, 1)}
        assert t.index_spaces == ("node", "node", "node-label", "node-label", "edge-label")

    def test_unlabeled(self, k3):
        t = graph_to_tensor(k3)

        assert t.order == 2
        assert t.nnz == 6
        assert np.array_equal(to_dense(t), adjacency_mask(k3).astype(float))


class TestModeProducts:
    """Test cases for dense and mixed mode products."""

    def test_dense_matches_einsum(self, rng):
        tensor, w = rng.normal(size=(3, 4, 5)), rng.normal(size=(4, 2))

        assert np.allclose(dense_mode_product(tensor, 1, w), np.einsum("ijk,jl->ilk", tensor, w))

    def test_dense_shape_mismatch(self, rng):
        with pytest.raises(TensorShapeError):
            dense_mode_product(rng.normal(size=(3, 4)), 0, rng.normal(size=(4, 2)))

    def test_row_with_two_columns(self, rng):
        """Test that entries (0,0) and (0,1) give W[0] + W[1] for row 0."""
        t = SparseTensor([[0, 0], [0, 1]], [1.0, 1.0], (1, 2))
        w = rng.normal(size=(2, 3))

        result = mode_product_mixed(MixedTensor.from_sparse(t), w)

        assert result.indices.tolist() == [[0]]
        assert np.allclose(result.values[0][0], w[0] + w[1])

    def test_path_graph(self, p3, rng):
        """Test the per-node neighbor sums of a 3-node path."""
        w = rng.normal(size=(3, 4))

        result = mode_product_mixed(MixedTensor.from_sparse(graph_to_tensor(p3)), w)

        assert result.indices.tolist() == [[0], [1], [2]]
        assert np.allclose(result.values[0], [w[1], w[0] + w[2], w[1]])

    def test_matches_dense_oracle(self):
        """Test single and chained mixed products against dense mode products on random tensors."""
        for seed in range(25):
            rng = np.random.default_rng(seed)
            t = random_sparse(rng, (3, 4, 5))
            w2, w1 = rng.normal(size=(5, 2)), rng.normal(size=(4, 3))
            dense = to_dense(t)

            once = mode_product_mixed(MixedTensor.from_sparse(t), w2)
            twice = mode_product_mixed(once, w1)

            assert np.allclose(once.to_dense(), dense_mode_product(dense, 2, w2))
            assert np.allclose(twice.to_dense(), dense_mode_product(dense_mode_product(dense, 2, w2), 1, w1))

    def test_random_product_sequences(self):
        """Test 1,000 random product sequences (order <= 4, dims <= 5) against the dense oracle within 1e-9."""
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            order = int(rng.integers(2, 5))
            dims = tuple(int(d) for d in rng.integers(1, 6, size=order))
            t = random_sparse(rng, dims, density=0.5)
            column_order = rng.permutation(order).tolist()
            mt = MixedTensor.from_sparse(t, column_order)
            dense = to_dense(t)

            for mode in column_order[::-1][: int(rng.integers(1, order + 1))]:
                w = rng.normal(size=(dims[mode], int(rng.integers(1, 4))))
                mt = mode_product_mixed(mt, w)
                dense = dense_mode_product(dense, mode, w)

            np.testing.assert_allclose(mt.to_dense(), dense, rtol=0, atol=1e-9)

    def test_column_order_matches_dense_oracle(self):
        for seed in range(10):
            rng = np.random.default_rng(100 + seed)
            t = random_sparse(rng, (3, 4, 5))
            w = rng.normal(size=(4, 6))

            result = mode_product_mixed(MixedTensor.from_sparse(t, [2, 0, 1]), w)

            assert np.allclose(result.to_dense(), dense_mode_product(to_dense(t), 1, w))

    def test_product_commutes_with_reordering(self, rng):
        """Test that the contracted result does not depend on the column order of the other modes."""
        t = random_sparse(rng, (3, 4, 5))
        w = rng.normal(size=(5, 2))

        first = mode_product_mixed(MixedTensor.from_sparse(t, [0, 1, 2]), w).to_dense()
        second = mode_product_mixed(MixedTensor.from_sparse(t, [1, 0, 2]), w).to_dense()

        assert np.allclose(first, second)

    def test_weight_mismatch_names_step(self, p3, rng):
        with pytest.raises(TensorShapeError) as exc_info:
            mode_product_mixed(MixedTensor.from_sparse(graph_to_tensor(p3)), rng.normal(size=(4, 2)), step="step 7")

        assert exc_info.value.step == "step 7"

    def test_label_embed_appends(self, formaldehyde, rng):
        t = graph_to_tensor(formaldehyde)
        w = rng.normal(size=(2, 3))

        result = label_embed(MixedTensor.from_sparse(t), w)

        assert result.rows == 6
        assert np.allclose(result.values[1], w[t.indices[:, 4]])
        assert result.dense_modes == ((), (4,))

    def test_label_embed_rejects_topology_mode(self, p3, rng):
        """Test that embedding a mode with several entries per position fails."""
        with pytest.raises(TensorShapeError) as exc_info:
            label_embed(MixedTensor.from_sparse(graph_to_tensor(p3)), rng.normal(size=(3, 2)), step="step 0")

        assert exc_info.value.step == "step 0"


class TestEmbeddingPlan:
    """Test cases for plan_embedding."""

    def test_formaldehyde_main_zero(self, formaldehyde):
        """Test step order and column order for the labeled molecule."""
        plan = plan_embedding(graph_to_tensor(formaldehyde), 0)

        assert [(s.mode, s.op) for s in plan.steps] == [
            (4, StepOp.LABEL_EMBED),
            (3, StepOp.LABEL_EMBED),
            (1, StepOp.MODE_PRODUCT),
            (2, StepOp.LABEL_EMBED),
            (0, StepOp.SHARED_EMBED),
        ]
        assert plan.column_order == (0, 2, 1, 3, 4)
        assert plan.steps[-1].weights_from == 1

    def test_formaldehyde_main_one(self, formaldehyde):
        plan = plan_embedding(graph_to_tensor(formaldehyde), 1)

        assert [s.mode for s in plan.steps] == [4, 2, 0, 3, 1]
        assert plan.other_mode == 0

    def test_unlabeled(self, k3):
        plan = plan_embedding(graph_to_tensor(k3), 0)

        assert [s.op for s in plan.steps] == [StepOp.MODE_PRODUCT, StepOp.SHARED_EMBED]

    def test_unconstrained_labels_after_main_only(self):
        t = SparseTensor(
            [[0, 1, 0, 1]],
            [1.0],
            (2, 2, 2, 2),
            [ModeKind.TOPOLOGY, ModeKind.TOPOLOGY, ModeKind.LABEL, ModeKind.LABEL],
            {2: (0,)},
        )

        assert [s.mode for s in plan_embedding(t, 0).steps] == [1, 2, 3, 0]

    def test_main_mode_must_be_topology(self, formaldehyde):
        with pytest.raises(PlanError) as exc_info:
            plan_embedding(graph_to_tensor(formaldehyde), 2)

        assert exc_info.value.mode == 2

    def test_three_topology_modes(self):
        with pytest.raises(PlanError):
            plan_embedding(SparseTensor([[0, 0, 0]], [1.0], (2, 2, 2)), 0)

    def test_unequal_dimensions(self):
        with pytest.raises(PlanError):
            plan_embedding(SparseTensor([[0, 0]], [1.0], (2, 3)), 0)


class TestInitialEmbeddings:
    """Test cases for the embedding pipeline."""

    def test_formaldehyde_carbon(self, formaldehyde):
        """Test the carbon row against a hand-built value set."""
        t = graph_to_tensor(formaldehyde)
        plan = plan_embedding(t, 0)
        weights = init_mode_weights(np.random.default_rng(0), t, plan, width=4)
        w1, w2, w3, w4 = weights[1], weights[2], weights[3], weights[4]

        table = initial_embeddings(t, weights, plan)
        expected = np.concatenate(
            [
                w1[1] + w1[2] + w1[3],
                (np.outer(w4[0], w1[1]) + np.outer(w4[0], w1[2]) + np.outer(w4[1], w1[3])).ravel(),
                (np.outer(w3[1], w1[1]) + np.outer(w3[1], w1[2]) + np.outer(w3[2], w1[3])).ravel(),
                w2[0],
                w1[0],
            ]
        )

        assert table.index.tolist() == [0, 1, 2, 3]
        assert table.width == 3 * 4 + 2 * 16
        assert np.allclose(table.as_dict()[0], expected)

    def test_unlabeled_rows(self, p3, rng):
        t = graph_to_tensor(p3)
        plan = plan_embedding(t, 0)
        weights = init_mode_weights(rng, t, plan, width=2)
        w = weights[1]

        table = initial_embeddings(t, weights, plan)

        assert np.allclose(table.vectors, np.hstack([[w[1], w[0] + w[2], w[1]], w]))

    def test_missing_weights_name_step(self, formaldehyde, rng):
        t = graph_to_tensor(formaldehyde)
        plan = plan_embedding(t, 0)
        weights = init_mode_weights(rng, t, plan)
        del weights[3]

        with pytest.raises(TensorShapeError) as exc_info:
            initial_embeddings(t, weights, plan)

        assert exc_info.value.step.startswith("step 1")

    def test_isolated_nodes_get_zero_rows(self):
        table = EmbeddingTable(np.array([0, 2]), np.ones((2, 3)))

        assert table.node_table(4).tolist() == [[1, 1, 1], [0, 0, 0], [1, 1, 1], [0, 0, 0]]

    def test_edgeless_graph(self, rng):
        t = graph_to_tensor(build_graph(3, []))
        plan = plan_embedding(t, 0)

        table = initial_embeddings(t, init_mode_weights(rng, t, plan, width=2), plan)

        assert table.vectors.shape == (0, 4)
        assert table.node_table(3).tolist() == [[0.0] * 4] * 3

    def test_shuffle_commutes_with_relabeling(self, formaldehyde):
        """Test that shuffling tensor topology indices equals encoding the permuted graph."""
        rng = np.random.default_rng(31)
        t = graph_to_tensor(formaldehyde)
        perms = draw_topology_permutations(rng, t)

        shuffled = shuffle_topology_indices(rng, t, perms)

        assert set(perms) == {"node"}
        assert shuffled == graph_to_tensor(permute_nodes(formaldehyde, perms["node"]))

    def test_equivariance(self):
        """Test that embeddings of a shuffled tensor are the shuffled embeddings."""
        for seed in range(10):
            rng = np.random.default_rng(seed)
            g = gen_er_graph(rng, 9, 0.4)
            t = graph_to_tensor(g)
            plan = plan_embedding(t, 0)
            weights = init_mode_weights(rng, t, plan, width=3)
            perms = draw_topology_permutations(rng, t)

            before = initial_embeddings(t, weights, plan).node_table(9)
            shuffled = shuffle_topology_indices(rng, t, perms)
            after = initial_embeddings(shuffled, reindex_mode_weights(weights, t, perms), plan).node_table(9)

            assert np.allclose(after[perms["node"]], before)

    def test_node_features(self, p3):
        table = np.array([[1.0, 0.0], [0.0, 1.0], [2.0, 2.0]])

        features = initial_node_features(p3, table)

        assert features.tolist() == [[1, 0, 0, 1], [0, 1, 3, 2], [2, 2, 0, 1]]

    def test_node_features_shape_checked(self, p3):
        with pytest.raises(TensorShapeError):
            initial_node_features(p3, np.zeros((2, 2)))
