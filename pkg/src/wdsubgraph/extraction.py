"""Node selection, fact harvesting and label resolution over the dump."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Union

import numpy as np

from . import _kernels
from ._pool import map_batches
from .entity_model import EntityId, Fact, PropertyId
from .hierarchy import ClassClosure
from .passes import LABEL_MODES, BatchTally, label_task, select_task

# compact the accumulated fact rows once this many are pending
_COMPACT_ROWS = 4_000_000

Lines = Union[Iterable[bytes], Callable[[], Iterable[bytes]]]


class NodeSet:
    """Selected entities as a sorted id array."""

    def __init__(self, ids=()):
        self.ids = np.unique(np.asarray(list(ids) if not isinstance(ids, np.ndarray) else ids, dtype=np.int64))

    def __len__(self) -> int:
        return self.ids.size

    def __iter__(self):
        return (EntityId(i) for i in self.ids.tolist())

    def __contains__(self, item) -> bool:
        i = np.searchsorted(self.ids, int(item))
        return bool(i < self.ids.size and self.ids[i] == int(item))

    def __eq__(self, other) -> bool:
        return isinstance(other, NodeSet) and np.array_equal(self.ids, other.ids)

    def __repr__(self) -> str:
        return f"NodeSet({len(self)} nodes)"


class FactStore:
    """Duplicate-free facts as a sorted ``(n, 3)`` array of (head, relation, tail)."""

    def __init__(self, rows=None):
        if rows is None:
            rows = np.empty((0, 3), dtype=np.int64)
        elif not isinstance(rows, np.ndarray):
            rows = np.array([tuple(map(int, r)) for r in rows], dtype=np.int64).reshape(-1, 3)
        self.rows = _kernels.unique_rows(rows.reshape(-1, 3))

    def __len__(self) -> int:
        return self.rows.shape[0]

    def __iter__(self):
        for h, r, t in self.rows.tolist():
            yield Fact(EntityId(h), PropertyId(r), EntityId(t))

    def __eq__(self, other) -> bool:
        return isinstance(other, FactStore) and np.array_equal(self.rows, other.rows)

    def __repr__(self) -> str:
        return f"FactStore({len(self)} facts)"

    def as_set(self) -> set[tuple[int, int, int]]:
        return set(map(tuple, self.rows.tolist()))

    def referenced_entities(self) -> np.ndarray:
        return np.unique(np.concatenate([self.rows[:, 0], self.rows[:, 2]]))

    def referenced_relations(self) -> np.ndarray:
        return np.unique(self.rows[:, 1])


@dataclass
class LabelTable:
    """Id -> label maps. ``None`` marks a record that was seen but had no usable label."""

    entity_labels: dict[int, str | None] = field(default_factory=dict)
    relation_labels: dict[int, str | None] = field(default_factory=dict)
    fallbacks: int = 0
    ran_pass: bool = False

    def entity_label(self, qid) -> str:
        label = self.entity_labels[int(qid)]
        return label if label is not None else f"Q{int(qid)}"

    def relation_label(self, pid) -> str:
        label = self.relation_labels[int(pid)]
        return label if label is not None else f"P{int(pid)}"

    def update(self, entities: dict, relations: dict) -> None:
        _merge_labels(self.entity_labels, entities)
        _merge_labels(self.relation_labels, relations)


def _merge_labels(into: dict, new: dict) -> None:
    # order-independent: a real label beats None, ties resolve to the smaller string
    for key, label in new.items():
        old = into.get(key, None)
        if key not in into or old is None:
            into[key] = label
        elif label is not None and label != old:
            into[key] = min(old, label)


@dataclass
class RunReport:
    lines_read: int = 0
    entities_parsed: int = 0
    skips: Counter = field(default_factory=Counter)
    nodes: int = 0
    facts: int = 0
    label_fallbacks: int = 0
    self_loops: int = 0
    label_pass: bool = False

    def absorb(self, tally: BatchTally) -> None:
        self.lines_read = tally.lines
        self.entities_parsed = tally.records
        self.skips = Counter(tally.skips)

    def lines(self) -> list[str]:
        out = [f"lines_read: {self.lines_read}", f"entities_parsed: {self.entities_parsed}"]
        out += [f"skipped.{reason}: {n}" for reason, n in sorted(self.skips.items())]
        out += [
            f"nodes: {self.nodes}",
            f"facts: {self.facts}",
            f"self_loop_facts: {self.self_loops}",
            f"label_pass: {'yes' if self.label_pass else 'no'}",
            f"label_fallbacks: {self.label_fallbacks}",
        ]
        return out


def _lines(source: Lines) -> Iterable[bytes]:
    return source() if callable(source) else source


def scan_dump(
    lines: Lines,
    closure: ClassClosure,
    workers: int = 1,
    labels_mode: str = "en",
    tally: BatchTally | None = None,
) -> tuple[NodeSet, FactStore, LabelTable]:
    """Select instances of the closure and collect their truthy entity-valued claims.

    The returned label table is partial: it holds labels of nodes and of every
    property record encountered.
    """
    if not len(closure):
        raise ValueError("closure must be nonempty")
    if labels_mode not in LABEL_MODES:
        raise ValueError(f"labels mode must be one of {LABEL_MODES}")
    context = (frozenset(int(c) for c in closure.members), labels_mode)
    tally = tally if tally is not None else BatchTally()
    nodes: list[int] = []
    chunks: list[np.ndarray] = []
    pending = 0
    labels = LabelTable()
    for delta in map_batches(select_task, context, _lines(lines), workers):
        nodes.extend(delta.nodes)
        if delta.facts.shape[0]:
            chunks.append(delta.facts)
            pending += delta.facts.shape[0]
        labels.update(delta.entity_labels, delta.relation_labels)
        tally.merge(delta.tally)
        if pending >= _COMPACT_ROWS:
            chunks = [_kernels.unique_rows(np.concatenate(chunks))]
            pending = chunks[0].shape[0]
    facts = FactStore(np.concatenate(chunks) if chunks else None)
    return NodeSet(nodes), facts, labels


def needed_ids(nodes: NodeSet, facts: FactStore) -> tuple[np.ndarray, np.ndarray]:
    """(entity ids, relation ids) a complete label table must cover."""
    ents = np.union1d(nodes.ids, facts.referenced_entities()) if len(facts) else nodes.ids.copy()
    return ents, facts.referenced_relations()


def resolve_labels(
    lines: Lines,
    needed,
    partial: LabelTable,
    workers: int = 1,
    labels_mode: str = "en",
    tally: BatchTally | None = None,
) -> LabelTable:
    """Complete ``partial`` so it covers exactly ``needed``.

    ``needed`` is either an ``(entity_ids, relation_ids)`` pair of integer
    arrays or an iterable of :class:`EntityId` / :class:`PropertyId`. A dump
    pass runs only when some needed id has not been seen yet; ids still
    unseen afterwards fall back to their canonical id string.
    """
    ents, rels = _split_needed(needed)
    missing_e = frozenset(ents.tolist()) - partial.entity_labels.keys()
    missing_r = frozenset(rels.tolist()) - partial.relation_labels.keys()
    if not missing_e and not missing_r:
        table = LabelTable(dict(partial.entity_labels), dict(partial.relation_labels), partial.fallbacks)
        return _restrict(table, ents, rels, ran_pass=False)
    table = LabelTable(dict(partial.entity_labels), dict(partial.relation_labels))
    for ent, rel, part in map_batches(label_task, (missing_e, missing_r, labels_mode), _lines(lines), workers):
        table.update(ent, rel)
        if tally is not None:
            tally.merge(part)
    return _restrict(table, ents, rels, ran_pass=True)


def _restrict(table: LabelTable, ents: np.ndarray, rels: np.ndarray, ran_pass: bool) -> LabelTable:
    out = LabelTable(ran_pass=ran_pass)
    for key in ents.tolist():
        label = table.entity_labels.get(key)
        if label is None:
            out.fallbacks += 1
            label = f"Q{key}"
        out.entity_labels[key] = label
    for key in rels.tolist():
        label = table.relation_labels.get(key)
        if label is None:
            out.fallbacks += 1
            label = f"P{key}"
        out.relation_labels[key] = label
    return out


def _split_needed(needed) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(needed, tuple) and len(needed) == 2 and all(isinstance(x, np.ndarray) for x in needed):
        return np.unique(needed[0].astype(np.int64)), np.unique(needed[1].astype(np.int64))
    ents, rels = [], []
    for item in needed:
        (rels if isinstance(item, PropertyId) else ents).append(int(item))
    return np.unique(np.array(ents, dtype=np.int64)), np.unique(np.array(rels, dtype=np.int64))
