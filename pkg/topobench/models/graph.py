"""
Graph model shared by every topobench service.

Graphs are immutable after construction. Edges are stored canonically
(u < v, sorted, unique) together with sorted neighbor lists.
"""

from typing import Any, Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator


Edge = Tuple[int, int]


class Graph(BaseModel):
    """
    Undirected simple graph with optional node and edge labels.

    Args:
        num_nodes: Number of nodes, ids are 0..num_nodes-1
        edges: Canonical edge tuple, each (u, v) with u < v, sorted
        node_labels: Optional label id per node
        edge_labels: Optional label id per edge, aligned with ``edges``
    """
    model_config = ConfigDict(frozen=True)

    num_nodes: int = Field(..., ge=0, description="Number of nodes")
    edges: Tuple[Edge, ...] = Field(default=(), description="Canonical sorted edges (u < v)")
    node_labels: Optional[Tuple[int, ...]] = Field(None, description="Label id per node")
    edge_labels: Optional[Tuple[int, ...]] = Field(None, description="Label id per edge, aligned with edges")

    _adjacency: Tuple[Tuple[int, ...], ...] = PrivateAttr(default=())
    _edge_position: Dict[Edge, int] = PrivateAttr(default_factory=dict)

    @model_validator(mode="after")
    def validate_structure(self) -> "Graph":
        """Validate canonical edge order, endpoint range and label coverage."""
        previous: Optional[Edge] = None
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not u < v:
                raise ValueError(f"edge ({u}, {v}) is not canonical (u < v)")
            if v >= self.num_nodes or u < 0:
                raise ValueError(f"edge ({u}, {v}) out of range for {self.num_nodes} nodes")
            if previous is not None and (u, v) <= previous:
                raise ValueError(f"edges not sorted or duplicated at ({u}, {v})")
            previous = (u, v)
        if self.node_labels is not None and len(self.node_labels) != self.num_nodes:
            raise ValueError("node_labels must have exactly one label per node")
        if self.edge_labels is not None and len(self.edge_labels) != len(self.edges):
            raise ValueError("edge_labels must have exactly one label per edge")
        return self

    def model_post_init(self, __context: Any) -> None:
        neighbors = [[] for _ in range(self.num_nodes)]
        for u, v in self.edges:
            neighbors[u].append(v)
            neighbors[v].append(u)
        self._adjacency = tuple(tuple(sorted(row)) for row in neighbors)
        self._edge_position = {edge: i for i, edge in enumerate(self.edges)}

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def neighbors(self, node: int) -> Tuple[int, ...]:
        """Sorted neighbor ids of ``node``."""
        return self._adjacency[node]

    def degrees(self) -> Tuple[int, ...]:
        return tuple(len(row) for row in self._adjacency)

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self._edge_position

    def edge_label(self, u: int, v: int) -> Optional[int]:
        """Label id of edge (u, v) or None for unlabeled graphs."""
        if self.edge_labels is None:
            return None
        position = self._edge_position.get((min(u, v), max(u, v)))
        if position is None:
            raise KeyError(f"no edge ({u}, {v})")
        return self.edge_labels[position]
