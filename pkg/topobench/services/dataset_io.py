"""
Dataset, tensor and manifest serialization.

Datasets are line-delimited JSON, one item per line:
{"edges": [[u, v], ...], "id": ..., "label": 0|1, "meta": {...}, "n": ...}
with optional "node_labels" and "edge_labels". Keys are sorted and
separators fixed, so equal inputs give byte-identical files.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import numpy as np
from pydantic import ValidationError

from core.exceptions import DatasetFormatError, GraphValidationError
from models.graph import Graph
from models.schemas import CommandRecord, DatasetItem, Manifest, Provenance
from services.topo_tensor import ModeKind, SparseTensor


logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _dumps(record: Dict[str, Any]) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def item_to_record(item: DatasetItem) -> Dict[str, Any]:
    g = item.graph
    record: Dict[str, Any] = {
        "id": item.id,
        "n": g.num_nodes,
        "edges": [list(edge) for edge in g.edges],
        "label": item.label,
        "meta": item.provenance.model_dump(mode="json"),
    }
    if g.node_labels is not None:
        record["node_labels"] = list(g.node_labels)
    if g.edge_labels is not None:
        record["edge_labels"] = list(g.edge_labels)
    return record


def record_to_item(record: Dict[str, Any]) -> DatasetItem:
    """
    Parse one dataset record.

    Raises:
        KeyError, TypeError, ValueError: On missing or malformed fields
    """
    edges = tuple(sorted((int(u), int(v)) for u, v in record["edges"]))
    node_labels = record.get("node_labels")
    edge_labels = record.get("edge_labels")
    graph = Graph(
        num_nodes=int(record["n"]),
        edges=edges,
        node_labels=tuple(node_labels) if node_labels is not None else None,
        edge_labels=tuple(edge_labels) if edge_labels is not None else None,
    )
    return DatasetItem(
        id=str(record["id"]),
        graph=graph,
        label=record["label"],
        provenance=Provenance.model_validate(record["meta"]),
    )


def write_dataset(path: PathLike, items: Sequence[DatasetItem]) -> None:
    """
    Write items in order as line-delimited JSON.

    Raises:
        DatasetFormatError: If two items share an id
    """
    seen = set()
    lines: List[str] = []
    for position, item in enumerate(items, start=1):
        if item.id in seen:
            raise DatasetFormatError(f"duplicate item id {item.id!r}", line_number=position)
        seen.add(item.id)
        lines.append(_dumps(item_to_record(item)) + "\n")

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(lines), encoding="utf-8")
    logger.info(f"Wrote {len(lines)} items to {path}")


def read_dataset(path: PathLike) -> List[DatasetItem]:
    """
    Read a dataset written by write_dataset.

    Raises:
        DatasetFormatError: On unreadable files, malformed lines or duplicate ids,
            with the 1-based line number
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        logger.error(f"Cannot read dataset {path}: {e}")
        raise DatasetFormatError(f"cannot read dataset {path}: {e}", details={"path": str(path)})

    items: List[DatasetItem] = []
    seen = set()
    for line_number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            item = record_to_item(json.loads(line))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError, ValidationError, GraphValidationError) as e:
            raise DatasetFormatError(
                f"malformed record in {path.name}: {e}", line_number=line_number, details={"path": str(path)}
            )
        if item.id in seen:
            raise DatasetFormatError(f"duplicate item id {item.id!r} in {path.name}", line_number=line_number)
        seen.add(item.id)
        items.append(item)
    logger.info(f"Read {len(items)} items from {path}")
    return items


def _format_weight(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(float(value))


def _header_token(t: SparseTensor, mode: int) -> str:
    token = f"{t.mode_kinds[mode].value}:{t.mode_dims[mode]}/{t.index_spaces[mode]}"
    deps = t.label_dependencies.get(mode)
    if deps:
        token += "@" + ",".join(str(d) for d in deps)
    return token


def export_tensor_tsv(path: PathLike, t: SparseTensor) -> None:
    """
    Write a sparse tensor as TSV: a header naming each mode, then one row
    per entry with the mode indices followed by the weight.

    Header tokens read kind:dimension/index-space, with @modes listing the
    dependencies of a label mode. Rows follow the tensor's lexicographic order.
    """
    lines = ["# " + "\t".join([_header_token(t, m) for m in range(t.order)] + ["weight"])]
    for row, weight in zip(t.indices.tolist(), t.weights.tolist()):
        lines.append("\t".join([str(i) for i in row] + [_format_weight(weight)]))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_header_token(token: str, mode: int):
    kind_dim, _, rest = token.partition("/")
    kind, _, dim = kind_dim.partition(":")
    space, _, deps = rest.partition("@")
    dependencies = tuple(int(d) for d in deps.split(",")) if deps else None
    return ModeKind(kind), int(dim), space or f"mode{mode}", dependencies


def import_tensor_tsv(path: PathLike) -> SparseTensor:
    """
    Read a tensor written by export_tensor_tsv.

    Raises:
        DatasetFormatError: On a missing header or malformed rows
    """
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("# "):
        raise DatasetFormatError(f"{path.name} has no tensor header", line_number=1)
    tokens = lines[0][2:].split("\t")
    if tokens[-1] != "weight":
        raise DatasetFormatError(f"{path.name} header must end with the weight column", line_number=1)

    try:
        modes = [_parse_header_token(token, m) for m, token in enumerate(tokens[:-1])]
    except ValueError as e:
        raise DatasetFormatError(f"bad tensor header in {path.name}: {e}", line_number=1)
    order = len(modes)

    rows: List[List[int]] = []
    weights: List[float] = []
    for line_number, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != order + 1:
            raise DatasetFormatError(
                f"expected {order + 1} columns, got {len(fields)}", line_number=line_number
            )
        try:
            rows.append([int(f) for f in fields[:-1]])
            weights.append(float(fields[-1]))
        except ValueError as e:
            raise DatasetFormatError(f"bad tensor row: {e}", line_number=line_number)

    return SparseTensor(
        np.array(rows, dtype=np.int64).reshape(-1, order),
        np.array(weights, dtype=np.float64),
        [dim for _, dim, _, _ in modes],
        [kind for kind, _, _, _ in modes],
        {m: deps for m, (_, _, _, deps) in enumerate(modes) if deps},
        [space for _, _, space, _ in modes],
    )


def write_manifest(path: PathLike, manifest: Manifest) -> None:
    """Write the manifest as indented JSON with sorted keys."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(manifest.model_dump(mode="json"), sort_keys=True, indent=2)
    path.write_text(text + "\n", encoding="utf-8")


def read_manifest(path: PathLike) -> Manifest:
    """
    Raises:
        DatasetFormatError: If the manifest is missing or invalid
    """
    path = Path(path)
    try:
        return Manifest.model_validate(json.loads(path.read_text(encoding="utf-8")))
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        logger.error(f"Cannot load manifest {path}: {e}")
        raise DatasetFormatError(f"cannot load manifest {path}: {e}", details={"path": str(path)})


def append_command_record(path: PathLike, record: CommandRecord) -> Manifest:
    """Append a command record to an existing manifest and rewrite it."""
    manifest = read_manifest(path)
    manifest.commands.append(record)
    write_manifest(path, manifest)
    return manifest
