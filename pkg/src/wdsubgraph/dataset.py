"""Edge/attribute partition, index assignment, the six output files and statistics."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, _kernels
from .entity_model import EntityId, IdError, PropertyId
from .extraction import FactStore, LabelTable, NodeSet

FACT_HEADER = "headEntity\ttailEntity\trelation"
ENTITY_HEADER = "entityID\twikidataID\tlabel"
RELATION_HEADER = "relationID\twikidataID\tlabel"
DATASET_FILES = ("edges.txt", "attributes.txt", "entities.txt", "nodes.txt", "relations.txt", "readme.txt")
README_KEYS = (
    "topic",
    "topic_qid",
    "nodes",
    "edges",
    "isolated_nodes",
    "distinct_attributes",
    "attribute_facts",
    "distinct_relations",
    "distinct_attribute_relations",
    "tool_version",
)
_ROW_CHUNK = 200_000
_LABEL_CLEAN = str.maketrans({"\t": " ", "\n": " ", "\r": " "})


class MissingLabel(RuntimeError):
    pass


class InvariantError(RuntimeError):
    pass


class OutputExistsError(FileExistsError):
    pass


class DatasetFormatError(ValueError):
    def __init__(self, path, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = path
        self.lineno = lineno


def _empty_facts() -> np.ndarray:
    return np.empty((0, 3), dtype=np.int64)


@dataclass
class IndexedDataset:
    """Indexed graph. Fact rows are ``(head_idx, tail_idx, rel_idx)``, the on-disk column order."""

    node_ids: np.ndarray
    entity_ids: np.ndarray
    relation_ids: np.ndarray
    edges: np.ndarray = field(default_factory=_empty_facts)
    attributes: np.ndarray = field(default_factory=_empty_facts)
    entity_labels: list[str] = field(default_factory=list)
    relation_labels: list[str] = field(default_factory=list)
    topic: EntityId | None = None
    topic_name: str | None = None

    @property
    def n_nodes(self) -> int:
        return int(self.node_ids.size)

    @property
    def node_index(self) -> dict[EntityId, int]:
        return {EntityId(q): i for i, q in enumerate(self.node_ids.tolist())}

    @property
    def entity_index(self) -> dict[EntityId, int]:
        return {EntityId(q): i for i, q in enumerate(self.entity_ids.tolist())}

    @property
    def relation_index(self) -> dict[PropertyId, int]:
        return {PropertyId(p): i for i, p in enumerate(self.relation_ids.tolist())}

    def id_facts(self, which: str = "edges") -> set[tuple[int, int, int]]:
        """Re-expand index rows into (head, relation, tail) id triples."""
        rows = self.edges if which == "edges" else self.attributes
        if rows.shape[0] == 0:
            return set()
        h = self.entity_ids[rows[:, 0]]
        t = self.entity_ids[rows[:, 1]]
        r = self.relation_ids[rows[:, 2]]
        return set(zip(h.tolist(), r.tolist(), t.tolist()))


def _sort_facts(rows: np.ndarray) -> np.ndarray:
    # ascending by (head, relation, tail)
    order = np.lexsort((rows[:, 1], rows[:, 2], rows[:, 0]))
    return np.ascontiguousarray(rows[order])


def build_dataset(
    nodes: NodeSet,
    facts: FactStore,
    labels: LabelTable,
    topic=None,
    topic_name: str | None = None,
    backend: str | None = None,
) -> IndexedDataset:
    """Split facts into edges (tail is a node) and attributes, and index everything.

    Nodes get indices ``0..n-1`` by ascending QID, attribute-only entities
    follow, again by ascending QID; relations are indexed by ascending PID.
    """
    node_ids = nodes.ids
    rows = facts.rows
    if rows.shape[0] and not _kernels.member_mask(rows[:, 0], node_ids, backend).all():
        raise InvariantError("fact head outside the node set")
    is_edge = _kernels.member_mask(rows[:, 2], node_ids, backend)
    edge_rows = rows[is_edge]
    attr_rows = rows[~is_edge]
    attr_only = np.unique(attr_rows[:, 2])
    entity_ids = np.concatenate([node_ids, attr_only])
    relation_ids = np.unique(rows[:, 1])

    try:
        ent_labels = [labels.entity_label(q) for q in entity_ids.tolist()]
        rel_labels = [labels.relation_label(p) for p in relation_ids.tolist()]
    except KeyError as exc:
        raise MissingLabel(f"no label entry for id {exc.args[0]}") from None

    n = node_ids.size
    edges = np.column_stack([
        np.searchsorted(node_ids, edge_rows[:, 0]),
        np.searchsorted(node_ids, edge_rows[:, 2]),
        np.searchsorted(relation_ids, edge_rows[:, 1]),
    ]).astype(np.int64).reshape(-1, 3)
    attributes = np.column_stack([
        np.searchsorted(node_ids, attr_rows[:, 0]),
        n + np.searchsorted(attr_only, attr_rows[:, 2]),
        np.searchsorted(relation_ids, attr_rows[:, 1]),
    ]).astype(np.int64).reshape(-1, 3)
    return IndexedDataset(
        node_ids=node_ids,
        entity_ids=entity_ids,
        relation_ids=relation_ids,
        edges=_sort_facts(edges),
        attributes=_sort_facts(attributes),
        entity_labels=ent_labels,
        relation_labels=rel_labels,
        topic=EntityId(topic) if topic is not None else None,
        topic_name=topic_name,
    )


@dataclass(frozen=True)
class StatsReport:
    nodes: int = 0
    edges: int = 0
    isolated_nodes: int = 0
    distinct_attributes: int = 0
    attribute_facts: int = 0
    distinct_relations: int = 0
    distinct_attribute_relations: int = 0

    def as_dict(self) -> dict[str, int]:
        return asdict(self)


def compute_stats(ds: IndexedDataset) -> StatsReport:
    e, a = ds.edges, ds.attributes
    touched = np.unique(np.concatenate([e[:, 0], e[:, 1]])).size
    return StatsReport(
        nodes=ds.n_nodes,
        edges=int(e.shape[0]),
        isolated_nodes=ds.n_nodes - touched,
        distinct_attributes=int(np.unique(a[:, 1]).size),
        attribute_facts=int(a.shape[0]),
        distinct_relations=int(np.unique(e[:, 2]).size),
        distinct_attribute_relations=int(np.unique(a[:, 2]).size),
    )


def edge_type_distribution(ds: IndexedDataset, top_k: int | None = None) -> list[tuple[str, int]]:
    """Edge counts per relation label, most frequent first; ties go to the smaller PID."""
    counts = np.bincount(ds.edges[:, 2], minlength=ds.relation_ids.size)
    order = np.lexsort((np.arange(counts.size), -counts))
    out = [(ds.relation_labels[i], int(counts[i])) for i in order.tolist() if counts[i] > 0]
    return out if top_k is None else out[:top_k]


# --- writers -----------------------------------------------------------------

def _clean(label: str) -> str:
    return label.translate(_LABEL_CLEAN)


def _write_fact_file(path: Path, rows: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(FACT_HEADER + "\n")
        for start in range(0, rows.shape[0], _ROW_CHUNK):
            block = rows[start:start + _ROW_CHUNK].tolist()
            fh.write("".join(f"{h}\t{t}\t{r}\n" for h, t, r in block))


def _write_dict_file(path: Path, header: str, prefix: str, ids, labels) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for i, (qid, label) in enumerate(zip(ids, labels)):
            fh.write(f"{i}\t{prefix}{qid}\t{_clean(label)}\n")


def readme_values(ds: IndexedDataset, stats: StatsReport | None = None) -> dict[str, str]:
    stats = stats or compute_stats(ds)
    qid = str(ds.topic) if ds.topic is not None else ""
    values = {"topic": ds.topic_name or qid, "topic_qid": qid}
    values.update({k: str(v) for k, v in stats.as_dict().items()})
    values["tool_version"] = __version__
    return values


def write_dataset(ds: IndexedDataset, out_dir: str | os.PathLike, force: bool = False) -> StatsReport:
    """Write the six dataset files; refuses a non-empty directory unless ``force``."""
    out = Path(out_dir)
    if out.exists() and not out.is_dir():
        raise OutputExistsError(f"{out} exists and is not a directory")
    if out.is_dir() and any(out.iterdir()) and not force:
        raise OutputExistsError(f"{out} is not empty (use force to overwrite)")
    out.mkdir(parents=True, exist_ok=True)
    stats = compute_stats(ds)
    n = ds.n_nodes
    _write_fact_file(out / "edges.txt", ds.edges)
    _write_fact_file(out / "attributes.txt", ds.attributes)
    ent_ids = ds.entity_ids.tolist()
    _write_dict_file(out / "entities.txt", ENTITY_HEADER, "Q", ent_ids, ds.entity_labels)
    _write_dict_file(out / "nodes.txt", ENTITY_HEADER, "Q", ent_ids[:n], ds.entity_labels[:n])
    _write_dict_file(out / "relations.txt", RELATION_HEADER, "P", ds.relation_ids.tolist(), ds.relation_labels)
    with open(out / "readme.txt", "w", encoding="utf-8", newline="\n") as fh:
        for key, value in readme_values(ds, stats).items():
            fh.write(f"{key}: {value}\n")
    return stats


# --- readers -----------------------------------------------------------------

def _read_rows(path: Path, header: str):
    try:
        fh = open(path, encoding="utf-8", newline="")
    except FileNotFoundError:
        raise DatasetFormatError(path, 0, "file missing") from None
    with fh:
        first = fh.readline()
        if first != header + "\n":
            raise DatasetFormatError(path, 1, f"expected header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            if not line.endswith("\n"):
                raise DatasetFormatError(path, lineno, "missing trailing newline")
            yield lineno, line[:-1].split("\t")


def _read_fact_file(path: Path, n_entities: int) -> np.ndarray:
    values: list[int] = []
    for lineno, cols in _read_rows(path, FACT_HEADER):
        if len(cols) != 3:
            raise DatasetFormatError(path, lineno, f"expected 3 columns, got {len(cols)}")
        try:
            row = [int(c) for c in cols]
        except ValueError:
            raise DatasetFormatError(path, lineno, "non-integer field") from None
        if min(row) < 0 or row[0] >= n_entities or row[1] >= n_entities:
            raise DatasetFormatError(path, lineno, "index out of range")
        values.extend(row)
    return np.array(values, dtype=np.int64).reshape(-1, 3)


def _read_dict_file(path: Path, header: str, id_type):
    ids: list[int] = []
    labels: list[str] = []
    for lineno, cols in _read_rows(path, header):
        if len(cols) != 3:
            raise DatasetFormatError(path, lineno, f"expected 3 columns, got {len(cols)}")
        if cols[0] != str(len(ids)):
            raise DatasetFormatError(path, lineno, f"expected index {len(ids)}, got {cols[0]!r}")
        try:
            ids.append(int(id_type.parse(cols[1])))
        except IdError as exc:
            raise DatasetFormatError(path, lineno, str(exc)) from None
        labels.append(cols[2])
    return np.array(ids, dtype=np.int64), labels


def read_readme(path: str | os.PathLike) -> dict[str, str]:
    path = Path(path)
    values: dict[str, str] = {}
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise DatasetFormatError(path, 0, "file missing") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        key, sep, value = line.partition(": ")
        if not sep:
            raise DatasetFormatError(path, lineno, f"expected 'key: value', got {line!r}")
        values[key] = value
    return values


def read_dataset(ds_dir: str | os.PathLike) -> IndexedDataset:
    """Load a written dataset directory back into an :class:`IndexedDataset`."""
    d = Path(ds_dir)
    entity_ids, ent_labels = _read_dict_file(d / "entities.txt", ENTITY_HEADER, EntityId)
    node_ids, node_labels = _read_dict_file(d / "nodes.txt", ENTITY_HEADER, EntityId)
    n = node_ids.size
    if not np.array_equal(node_ids, entity_ids[:n]) or node_labels != ent_labels[:n]:
        raise DatasetFormatError(d / "nodes.txt", 0, "nodes.txt is not a prefix of entities.txt")
    relation_ids, rel_labels = _read_dict_file(d / "relations.txt", RELATION_HEADER, PropertyId)
    edges = _read_fact_file(d / "edges.txt", entity_ids.size)
    attributes = _read_fact_file(d / "attributes.txt", entity_ids.size)
    for name, rows in (("edges.txt", edges), ("attributes.txt", attributes)):
        if rows.shape[0] and rows[:, 2].max() >= relation_ids.size:
            raise DatasetFormatError(d / name, 0, "relation index out of range")
    readme = read_readme(d / "readme.txt")
    topic = readme.get("topic_qid") or None
    return IndexedDataset(
        node_ids=node_ids,
        entity_ids=entity_ids,
        relation_ids=relation_ids,
        edges=edges,
        attributes=attributes,
        entity_labels=ent_labels,
        relation_labels=rel_labels,
        topic=EntityId.parse(topic) if topic else None,
        topic_name=readme.get("topic"),
    )
