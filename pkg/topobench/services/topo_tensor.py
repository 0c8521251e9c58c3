"""
Sparse and mixed tensor representations of graphs and the initial-embedding pipeline.

A graph becomes a coordinate-format tensor with two topology modes (source,
target) and one mode per label kind. Initial node embeddings are computed
by contracting the sparse modes one at a time from the last column: topology
modes by mode products, label modes by appending an embedding vector. The
main topology mode is processed last with the other topology mode's weights.
"""

import logging
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from core.exceptions import PlanError, TensorShapeError
from models.graph import Graph


logger = logging.getLogger(__name__)

ModeWeights = Dict[int, np.ndarray]

DENSE_SIZE_LIMIT = 10**6


class ModeKind(str, Enum):
    TOPOLOGY = "topology"
    LABEL = "label"


def _lexsort_rows(indices: np.ndarray) -> np.ndarray:
    if indices.shape[0] == 0 or indices.shape[1] == 0:
        return np.arange(indices.shape[0])
    return np.lexsort(indices.T[::-1])


def _rows_unique(rows: np.ndarray) -> bool:
    if rows.shape[0] <= 1:
        return True
    if rows.shape[1] == 0:
        return False
    return np.unique(rows, axis=0).shape[0] == rows.shape[0]


class SparseTensor:
    """
    Coordinate-format order-n tensor with typed modes.

    Rows are kept in lexicographic index order, so equal tensors have equal
    tables.

    Args:
        indices: Index table, one row of n mode indices per entry
        weights: One value per row
        mode_dims: Dimension of each mode
        mode_kinds: Topology or label, per mode
        label_dependencies: Per label mode, the topology modes that determine it
        index_spaces: Name of the index space of each mode; topology modes
            sharing a space are shuffled with the same bijection

    Raises:
        TensorShapeError: On out-of-range indices, duplicate rows, or a label
            mode holding more than one value per position of the other modes
    """

    def __init__(
        self,
        indices: np.ndarray,
        weights: np.ndarray,
        mode_dims: Sequence[int],
        mode_kinds: Optional[Sequence[ModeKind]] = None,
        label_dependencies: Optional[Mapping[int, Sequence[int]]] = None,
        index_spaces: Optional[Sequence[str]] = None,
    ):
        self.mode_dims = tuple(int(d) for d in mode_dims)
        order = len(self.mode_dims)
        indices = np.asarray(indices, dtype=np.int64)
        if indices.ndim != 2:
            indices = indices.reshape(-1, order) if order else np.zeros((0, 0), dtype=np.int64)
        weights = np.asarray(weights, dtype=np.float64).reshape(-1)
        self.mode_kinds = tuple(ModeKind(k) for k in (mode_kinds or [ModeKind.TOPOLOGY] * order))
        self.label_dependencies = {
            int(mode): tuple(sorted(int(d) for d in deps)) for mode, deps in (label_dependencies or {}).items()
        }
        self.index_spaces = tuple(index_spaces or [f"mode{m}" for m in range(order)])

        if weights.shape[0] != indices.shape[0]:
            raise TensorShapeError(f"{indices.shape[0]} index rows but {weights.shape[0]} weights")
        if len(self.mode_kinds) != order or len(self.index_spaces) != order:
            raise TensorShapeError("mode_kinds and index_spaces must have one entry per mode")
        if indices.size and ((indices < 0).any() or (indices >= np.asarray(self.mode_dims)).any()):
            raise TensorShapeError("index out of range for its mode dimension")
        if not _rows_unique(indices):
            raise TensorShapeError("index rows must be unique")
        for mode, deps in self.label_dependencies.items():
            if not 0 <= mode < order or self.mode_kinds[mode] != ModeKind.LABEL:
                raise TensorShapeError(f"label dependency declared for non-label mode {mode}")
            if any(not 0 <= d < order for d in deps):
                raise TensorShapeError(f"label mode {mode} depends on an unknown mode")
        for mode in self.label_modes:
            if not _rows_unique(np.delete(indices, mode, axis=1)):
                raise TensorShapeError(f"label mode {mode} holds more than one value per position")

        order_rows = _lexsort_rows(indices)
        self.indices = indices[order_rows]
        self.weights = weights[order_rows]

    @property
    def order(self) -> int:
        return len(self.mode_dims)

    @property
    def nnz(self) -> int:
        return int(self.indices.shape[0])

    @property
    def topology_modes(self) -> Tuple[int, ...]:
        return tuple(m for m, kind in enumerate(self.mode_kinds) if kind == ModeKind.TOPOLOGY)

    @property
    def label_modes(self) -> Tuple[int, ...]:
        return tuple(m for m, kind in enumerate(self.mode_kinds) if kind == ModeKind.LABEL)

    def reorder_modes(self, new_order: Sequence[int]) -> "SparseTensor":
        """Tensor whose mode i is mode ``new_order[i]`` of this tensor."""
        new_order = [int(m) for m in new_order]
        if sorted(new_order) != list(range(self.order)):
            raise TensorShapeError(f"{new_order} is not a permutation of {self.order} modes")
        position = {old: new for new, old in enumerate(new_order)}
        return SparseTensor(
            self.indices[:, new_order],
            self.weights,
            [self.mode_dims[m] for m in new_order],
            [self.mode_kinds[m] for m in new_order],
            {position[m]: [position[d] for d in deps] for m, deps in self.label_dependencies.items()},
            [self.index_spaces[m] for m in new_order],
        )

    @classmethod
    def from_dense(
        cls,
        array: np.ndarray,
        mode_kinds: Optional[Sequence[ModeKind]] = None,
        label_dependencies: Optional[Mapping[int, Sequence[int]]] = None,
        index_spaces: Optional[Sequence[str]] = None,
    ) -> "SparseTensor":
        """Coordinate tensor of the non-zero entries of ``array``."""
        array = np.asarray(array, dtype=np.float64)
        indices = np.argwhere(array != 0)
        return cls(indices, array[tuple(indices.T)], array.shape, mode_kinds, label_dependencies, index_spaces)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseTensor):
            return NotImplemented
        return (
            self.mode_dims == other.mode_dims
            and self.mode_kinds == other.mode_kinds
            and self.label_dependencies == other.label_dependencies
            and self.index_spaces == other.index_spaces
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.weights, other.weights)
        )

    def __repr__(self) -> str:
        return f"SparseTensor(dims={self.mode_dims}, nnz={self.nnz}, kinds={[k.value for k in self.mode_kinds]})"


def to_dense(t: SparseTensor, max_entries: int = DENSE_SIZE_LIMIT) -> np.ndarray:
    """
    Dense array with zeros everywhere except the listed entries.

    Raises:
        TensorShapeError: If the dense array would exceed ``max_entries``
    """
    size = int(np.prod(t.mode_dims, dtype=np.int64))
    if size > max_entries:
        raise TensorShapeError(f"dense size {size} exceeds the limit of {max_entries} entries")
    dense = np.zeros(t.mode_dims, dtype=np.float64)
    if t.nnz:
        dense[tuple(t.indices.T)] = t.weights
    return dense


def dense_mode_product(tensor: np.ndarray, mode: int, w: np.ndarray) -> np.ndarray:
    """
    Mode-k product: sum over i_k of T[..., i_k, ...] * W[i_k, j].

    Args:
        tensor: Dense tensor
        mode: 0-based mode k
        w: Matrix of shape (I_k, J_k)

    Returns:
        Tensor with mode k of dimension J_k

    Raises:
        TensorShapeError: If W's row count differs from the mode dimension
    """
    w = np.asarray(w, dtype=np.float64)
    if not 0 <= mode < tensor.ndim:
        raise TensorShapeError(f"mode {mode} out of range for an order-{tensor.ndim} tensor")
    if w.ndim != 2 or w.shape[0] != tensor.shape[mode]:
        raise TensorShapeError(f"W of shape {w.shape} does not match mode {mode} of dimension {tensor.shape[mode]}")
    return np.moveaxis(np.tensordot(tensor, w, axes=([mode], [0])), -1, mode)


class MixedTensor:
    """
    Index table over the remaining sparse modes plus a set of dense values per row.

    Each set element is stored stacked over rows, so every row has the same
    set signature.

    Args:
        indices: Rows over the remaining sparse modes
        sparse_modes: Original mode id of each index column
        sparse_dims: Dimension of each index column
        values: Set elements, each an array of shape (rows, *subshape)
        dense_modes: Original mode ids of each element's dense axes
    """

    def __init__(
        self,
        indices: np.ndarray,
        sparse_modes: Sequence[int],
        sparse_dims: Sequence[int],
        values: Sequence[np.ndarray],
        dense_modes: Sequence[Tuple[int, ...]],
    ):
        self.indices = np.asarray(indices, dtype=np.int64)
        if self.indices.ndim != 2:
            self.indices = self.indices.reshape(-1, len(sparse_modes))
        self.sparse_modes = tuple(sparse_modes)
        self.sparse_dims = tuple(sparse_dims)
        self.values = tuple(values)
        self.dense_modes = tuple(tuple(m) for m in dense_modes)
        if len(self.values) != len(self.dense_modes):
            raise TensorShapeError("each value element needs its dense mode ids")
        for element, modes in zip(self.values, self.dense_modes):
            if element.shape[0] != self.rows or element.ndim != 1 + len(modes):
                raise TensorShapeError(f"value element of shape {element.shape} does not fit {self.rows} rows")

    @property
    def rows(self) -> int:
        return int(self.indices.shape[0])

    @classmethod
    def from_sparse(cls, t: SparseTensor, column_order: Optional[Sequence[int]] = None) -> "MixedTensor":
        """
        Mixed view of a sparse tensor with scalar values.

        ``column_order`` fixes the index columns; the last column is contracted first.
        """
        column_order = list(range(t.order)) if column_order is None else [int(m) for m in column_order]
        if sorted(column_order) != list(range(t.order)):
            raise TensorShapeError(f"{column_order} is not a permutation of {t.order} modes")
        return cls(
            t.indices[:, column_order],
            column_order,
            [t.mode_dims[m] for m in column_order],
            (t.weights.copy(),),
            ((),),
        )

    def to_dense(self, max_entries: int = DENSE_SIZE_LIMIT) -> np.ndarray:
        """
        Dense array of a single-element value set, axes in ascending original mode order.

        Raises:
            TensorShapeError: If the value set has more than one element
        """
        if len(self.values) != 1:
            raise TensorShapeError(f"to_dense needs a single-element value set, got {len(self.values)}")
        element = self.values[0]
        shape = self.sparse_dims + element.shape[1:]
        if int(np.prod(shape, dtype=np.int64)) > max_entries:
            raise TensorShapeError(f"dense size of {shape} exceeds the limit of {max_entries} entries")
        dense = np.zeros(shape, dtype=np.float64)
        if self.sparse_modes:
            np.add.at(dense, tuple(self.indices.T), element)
        elif self.rows:
            dense += element.sum(axis=0)
        axis_modes = self.sparse_modes + self.dense_modes[0]
        return np.transpose(dense, np.argsort(axis_modes))


def _groups(hat: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Unique rows of ``hat`` (lexicographic) and each row's group id."""
    if hat.shape[1] == 0:
        return np.zeros((1, 0), dtype=np.int64), np.zeros(hat.shape[0], dtype=np.int64)
    if hat.shape[0] == 0:
        return hat, np.zeros(0, dtype=np.int64)
    unique, inverse = np.unique(hat, axis=0, return_inverse=True)
    return unique, inverse.reshape(-1)


def _check_weights(mt: MixedTensor, w: np.ndarray, step: Optional[str]) -> np.ndarray:
    if not mt.sparse_modes:
        raise TensorShapeError("no sparse mode left to contract", step=step)
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != mt.sparse_dims[-1]:
        raise TensorShapeError(
            f"W of shape {w.shape} does not match mode {mt.sparse_modes[-1]} of dimension {mt.sparse_dims[-1]}",
            step=step,
        )
    return w


def mode_product_mixed(mt: MixedTensor, w: np.ndarray, step: Optional[str] = None) -> MixedTensor:
    """
    Mode product over the last sparse mode of a mixed tensor.

    Rows are grouped by their remaining indices; each group's new value is
    the sum over its rows of (value element outer W[last index]). Every value
    element gains one trailing dense axis. Group sums use a fixed
    row order.

    Raises:
        TensorShapeError: If W does not match the last sparse mode
    """
    w = _check_weights(mt, w, step)
    last = mt.indices[:, -1]
    unique, inverse = _groups(mt.indices[:, :-1])
    groups = unique.shape[0]

    values: List[np.ndarray] = []
    for element in mt.values:
        sub = element.shape[1:]
        rows_w = w[last].reshape((mt.rows,) + (1,) * len(sub) + (w.shape[1],))
        summed = np.zeros((groups,) + sub + (w.shape[1],), dtype=np.float64)
        np.add.at(summed, inverse, element[..., np.newaxis] * rows_w)
        values.append(summed)

    return MixedTensor(
        unique,
        mt.sparse_modes[:-1],
        mt.sparse_dims[:-1],
        values,
        [modes + (mt.sparse_modes[-1],) for modes in mt.dense_modes],
    )


def label_embed(mt: MixedTensor, w: np.ndarray, step: Optional[str] = None) -> MixedTensor:
    """
    Embed the last sparse mode by appending W[label index] to every value set.

    Raises:
        TensorShapeError: If removing the mode merges rows (the mode is not label-like)
            or W does not match it
    """
    w = _check_weights(mt, w, step)
    hat = mt.indices[:, :-1]
    if not _rows_unique(hat):
        raise TensorShapeError(
            f"mode {mt.sparse_modes[-1]} has several entries per position and cannot be label-embedded",
            step=step,
        )
    return MixedTensor(
        hat,
        mt.sparse_modes[:-1],
        mt.sparse_dims[:-1],
        mt.values + (w[mt.indices[:, -1]],),
        mt.dense_modes + ((mt.sparse_modes[-1],),),
    )


def shared_embed(mt: MixedTensor, w: np.ndarray, step: Optional[str] = None) -> MixedTensor:
    """
    Append W[index] of the last sparse mode to every value set, keeping rows keyed by that index.

    Used for the main topology mode, which is the only column left and
    is embedded with another mode's weights.

    Raises:
        TensorShapeError: If other sparse modes remain or W does not match
    """
    w = _check_weights(mt, w, step)
    if len(mt.sparse_modes) != 1:
        raise TensorShapeError(
            f"shared embedding needs a single remaining mode, got {len(mt.sparse_modes)}", step=step
        )
    return MixedTensor(
        mt.indices,
        mt.sparse_modes,
        mt.sparse_dims,
        mt.values + (w[mt.indices[:, -1]],),
        mt.dense_modes + ((mt.sparse_modes[-1],),),
    )


def flatten_value_set(mt: MixedTensor) -> np.ndarray:
    """Per row, the concatenation of its value elements flattened row-major in set order."""
    if not mt.values:
        return np.zeros((mt.rows, 0), dtype=np.float64)
    return np.concatenate(
        [element.reshape(mt.rows, int(np.prod(element.shape[1:], dtype=np.int64))) for element in mt.values], axis=1
    )


def draw_topology_permutations(rng: np.random.Generator, t: SparseTensor) -> Dict[str, np.ndarray]:
    """
    One random bijection per topology index space, drawn in sorted space order.

    Raises:
        TensorShapeError: If modes sharing a space have different dimensions
    """
    dims: Dict[str, int] = {}
    for mode in t.topology_modes:
        space = t.index_spaces[mode]
        if dims.setdefault(space, t.mode_dims[mode]) != t.mode_dims[mode]:
            raise TensorShapeError(f"modes of index space {space!r} have different dimensions")
    return {space: rng.permutation(dims[space]) for space in sorted(dims)}


def shuffle_topology_indices(
    rng: np.random.Generator, t: SparseTensor, permutations: Optional[Mapping[str, np.ndarray]] = None
) -> SparseTensor:
    """
    Relabel topology indices by a bijection per index space (old index i becomes perm[i]).

    Label modes are untouched. Pass ``permutations`` to apply known bijections
    instead of drawing them from ``rng``.
    """
    permutations = permutations if permutations is not None else draw_topology_permutations(rng, t)
    indices = t.indices.copy()
    for mode in t.topology_modes:
        perm = np.asarray(permutations[t.index_spaces[mode]], dtype=np.int64)
        if sorted(perm.tolist()) != list(range(t.mode_dims[mode])):
            raise TensorShapeError(f"permutation for mode {mode} is not a bijection")
        indices[:, mode] = perm[t.indices[:, mode]]
    return SparseTensor(indices, t.weights, t.mode_dims, t.mode_kinds, t.label_dependencies, t.index_spaces)


def reindex_mode_weights(
    weights: ModeWeights, t: SparseTensor, permutations: Mapping[str, np.ndarray]
) -> ModeWeights:
    """Weights whose topology rows follow a shuffle: row perm[i] of the result is row i of the input."""
    reindexed: ModeWeights = {}
    for mode, w in weights.items():
        if t.mode_kinds[mode] == ModeKind.TOPOLOGY:
            moved = np.empty_like(w)
            moved[np.asarray(permutations[t.index_spaces[mode]])] = w
            reindexed[mode] = moved
        else:
            reindexed[mode] = w
    return reindexed


class StepOp(str, Enum):
    MODE_PRODUCT = "mode-product"
    LABEL_EMBED = "label-embed"
    SHARED_EMBED = "shared-embed"


class PlanStep(BaseModel):
    """One contraction of the last sparse mode."""
    mode: int = Field(..., ge=0, description="Mode contracted by this step")
    op: StepOp = Field(..., description="Operation")
    weights_from: int = Field(..., ge=0, description="Mode whose weight matrix is used")


class EmbeddingPlan(BaseModel):
    """
    Ordered processing of every mode ending with the main topology mode.

    Args:
        main_mode: Topology mode the embeddings are produced for
        other_mode: The other topology mode, whose weights the main mode shares
        column_order: Index column order; steps contract from the last column
        steps: Steps in execution order
    """
    main_mode: int = Field(..., ge=0, description="Main topology mode")
    other_mode: int = Field(..., ge=0, description="Other topology mode")
    column_order: Tuple[int, ...] = Field(..., description="Reordered mode ids")
    steps: Tuple[PlanStep, ...] = Field(..., description="Steps in execution order")

    @model_validator(mode="after")
    def validate_steps(self) -> "EmbeddingPlan":
        if tuple(step.mode for step in reversed(self.steps)) != self.column_order:
            raise ValueError("steps must contract the columns from last to first")
        final = self.steps[-1]
        if final.op != StepOp.SHARED_EMBED or final.mode != self.main_mode or final.weights_from != self.other_mode:
            raise ValueError("the main mode must be processed last with the other mode's weights")
        return self


def plan_embedding(t: SparseTensor, main_mode: int) -> EmbeddingPlan:
    """
    Order the modes of ``t`` for initial-embedding computation.

    Label modes depending on the other topology mode are embedded before its
    mode product; labels depending only on the main mode follow it, and
    labels with no declared dependency come last among labels. Within a
    group, higher mode ids are processed first. The main mode is processed
    last by a lookup sharing the other topology mode's weights.

    Raises:
        PlanError: If the tensor does not have exactly two topology modes of
            equal dimension, ``main_mode`` is not one of them, or a label
            depends on a non-topology mode
    """
    topology = t.topology_modes
    if len(topology) != 2:
        raise PlanError(f"embedding plans need exactly two topology modes, got {len(topology)}")
    if main_mode not in topology:
        raise PlanError(f"main mode {main_mode} is not a topology mode", mode=main_mode)
    other = topology[1] if topology[0] == main_mode else topology[0]
    if t.mode_dims[main_mode] != t.mode_dims[other]:
        raise PlanError(
            f"main mode {main_mode} and mode {other} must have equal dimensions to share weights", mode=main_mode
        )

    before_other: List[int] = []
    before_main: List[int] = []
    unconstrained: List[int] = []
    for mode in sorted(t.label_modes, reverse=True):
        deps = t.label_dependencies.get(mode, ())
        if any(d not in topology for d in deps):
            raise PlanError(f"label mode {mode} depends on non-topology modes {deps}", mode=mode)
        if other in deps:
            before_other.append(mode)
        elif deps:
            before_main.append(mode)
        else:
            unconstrained.append(mode)

    steps = [PlanStep(mode=m, op=StepOp.LABEL_EMBED, weights_from=m) for m in before_other]
    steps.append(PlanStep(mode=other, op=StepOp.MODE_PRODUCT, weights_from=other))
    steps.extend(PlanStep(mode=m, op=StepOp.LABEL_EMBED, weights_from=m) for m in before_main + unconstrained)
    steps.append(PlanStep(mode=main_mode, op=StepOp.SHARED_EMBED, weights_from=other))

    plan = EmbeddingPlan(
        main_mode=main_mode,
        other_mode=other,
        column_order=tuple(step.mode for step in reversed(steps)),
        steps=tuple(steps),
    )
    logger.debug(f"Embedding plan for main mode {main_mode}: {[(s.mode, s.op.value) for s in plan.steps]}")
    return plan


def init_mode_weights(
    rng: np.random.Generator, t: SparseTensor, plan: EmbeddingPlan, width: int = 8
) -> ModeWeights:
    """Seeded uniform(-0.1, 0.1) matrices of shape (mode dimension, width) for every weighted mode."""
    if width < 1:
        raise TensorShapeError(f"embedding width must be >= 1, got {width}")
    return {
        step.mode: rng.uniform(-0.1, 0.1, size=(t.mode_dims[step.mode], width))
        for step in plan.steps
        if step.op != StepOp.SHARED_EMBED
    }


class EmbeddingTable:
    """
    Initial embeddings keyed by main-mode index.

    Args:
        index: Main-mode index of each row, ascending
        vectors: One flattened embedding per row
    """

    def __init__(self, index: np.ndarray, vectors: np.ndarray):
        self.index = np.asarray(index, dtype=np.int64)
        self.vectors = np.asarray(vectors, dtype=np.float64)

    @property
    def width(self) -> int:
        return int(self.vectors.shape[1])

    def as_dict(self) -> Dict[int, np.ndarray]:
        return {int(i): row for i, row in zip(self.index, self.vectors)}

    def node_table(self, num_nodes: int) -> np.ndarray:
        """Dense per-node table; nodes absent from the tensor (isolated) get zero rows."""
        table = np.zeros((num_nodes, self.width), dtype=np.float64)
        table[self.index] = self.vectors
        return table


def initial_embeddings(t: SparseTensor, weights: ModeWeights, plan: EmbeddingPlan) -> EmbeddingTable:
    """
    Execute ``plan`` on ``t`` and flatten each main-mode row's value set.

    Raises:
        TensorShapeError: On a missing or mis-shaped weight matrix, naming the step
    """
    mt = MixedTensor.from_sparse(t, plan.column_order)
    main_index = np.zeros(0, dtype=np.int64)
    for position, step in enumerate(plan.steps):
        name = f"step {position}: {step.op.value} on mode {step.mode}"
        if step.weights_from not in weights:
            raise TensorShapeError(f"no weights for mode {step.weights_from}", step=name)
        w = weights[step.weights_from]
        if step.op == StepOp.MODE_PRODUCT:
            mt = mode_product_mixed(mt, w, step=name)
        elif step.op == StepOp.LABEL_EMBED:
            mt = label_embed(mt, w, step=name)
        else:
            mt = shared_embed(mt, w, step=name)
            main_index = mt.indices[:, -1].copy()
    return EmbeddingTable(main_index, flatten_value_set(mt))


def initial_node_features(g: Graph, node_table: np.ndarray) -> np.ndarray:
    """
    Concatenate each node's own vector with the sum of its neighbors' vectors.

    Raises:
        TensorShapeError: If the table does not have one row per node
    """
    node_table = np.asarray(node_table, dtype=np.float64)
    if node_table.ndim != 2 or node_table.shape[0] != g.num_nodes:
        raise TensorShapeError(f"node table of shape {node_table.shape} does not cover {g.num_nodes} nodes")
    neighbor_sum = np.zeros_like(node_table)
    for u, v in g.edges:
        neighbor_sum[u] += node_table[v]
        neighbor_sum[v] += node_table[u]
    return np.concatenate([node_table, neighbor_sum], axis=1)


def lookup_node_table(rng: np.random.Generator, num_nodes: int, width: int = 8) -> np.ndarray:
    """Per-index lookup embeddings, seeded uniform(-0.1, 0.1)."""
    return rng.uniform(-0.1, 0.1, size=(num_nodes, width))


def graph_to_tensor(
    g: Graph, node_label_count: Optional[int] = None, edge_label_count: Optional[int] = None
) -> SparseTensor:
    """
    Sparse tensor of a graph with one row per directed edge.

    Modes: source, target, then source label and target label when the
    graph has node labels, then the edge label when it has edge labels.
    All weights are 1.

    Args:
        g: Graph
        node_label_count: Node label dimension; defaults to max label + 1
        edge_label_count: Edge label dimension; defaults to max label + 1
    """
    columns: List[List[int]] = [[], []]
    for u, v in g.edges:
        columns[0].extend((u, v))
        columns[1].extend((v, u))
    dims = [g.num_nodes, g.num_nodes]
    kinds = [ModeKind.TOPOLOGY, ModeKind.TOPOLOGY]
    spaces = ["node", "node"]
    deps: Dict[int, Tuple[int, ...]] = {}

    if g.node_labels is not None:
        labels = g.node_labels
        count = node_label_count if node_label_count is not None else max(labels, default=-1) + 1
        columns.append([labels[u] for u in columns[0]])
        columns.append([labels[v] for v in columns[1]])
        dims += [count, count]
        kinds += [ModeKind.LABEL, ModeKind.LABEL]
        spaces += ["node-label", "node-label"]
        deps.update({2: (0,), 3: (1,)})
    if g.edge_labels is not None:
        count = edge_label_count if edge_label_count is not None else max(g.edge_labels, default=-1) + 1
        columns.append([label for label in g.edge_labels for _ in range(2)])
        dims.append(count)
        kinds.append(ModeKind.LABEL)
        spaces.append("edge-label")
        deps[len(dims) - 1] = (0, 1)

    indices = np.array(columns, dtype=np.int64).T.reshape(-1, len(dims))
    return SparseTensor(indices, np.ones(indices.shape[0]), dims, kinds, deps, spaces)
