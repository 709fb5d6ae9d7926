"""Topic class closure over ``subclass of`` (P279) edges."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import _kernels
from ._pool import map_batches
from .entity_model import EntityId, IdError
from .passes import BatchTally, subclass_task


class FormatError(ValueError):
    def __init__(self, path, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = path
        self.lineno = lineno


class TopicMismatch(ValueError):
    pass


class SubclassEdgeSet:
    """Duplicate-free ``(child, parent)`` pairs, kept as a sorted ``(n, 2)`` array."""

    def __init__(self, pairs: Iterable[tuple[int, int]] | np.ndarray = ()):
        arr = np.asarray(list(pairs) if not isinstance(pairs, np.ndarray) else pairs, dtype=np.int64)
        self.pairs = _kernels.unique_rows(arr.reshape(-1, 2))

    def __len__(self) -> int:
        return self.pairs.shape[0]

    def __iter__(self):
        for child, parent in self.pairs.tolist():
            yield EntityId(child), EntityId(parent)

    def __contains__(self, pair) -> bool:
        return (int(pair[0]), int(pair[1])) in self.as_set()

    def __eq__(self, other) -> bool:
        return isinstance(other, SubclassEdgeSet) and np.array_equal(self.pairs, other.pairs)

    def __repr__(self) -> str:
        return f"SubclassEdgeSet({len(self)} edges)"

    def as_set(self) -> set[tuple[int, int]]:
        return {(c, p) for c, p in self.pairs.tolist()}

    def union(self, other: "SubclassEdgeSet") -> "SubclassEdgeSet":
        return SubclassEdgeSet(np.concatenate([self.pairs, other.pairs]))


@dataclass(frozen=True)
class ClassClosure:
    topic: EntityId
    members: frozenset

    def __post_init__(self):
        if self.topic not in self.members:
            raise ValueError("closure must contain its topic")

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, item) -> bool:
        return item in self.members

    def sorted_ids(self) -> np.ndarray:
        return np.array(sorted(self.members), dtype=np.int64)


def collect_subclass_edges(lines: Iterable[bytes], workers: int = 1, tally: BatchTally | None = None) -> SubclassEdgeSet:
    """Every truthy ``child P279 parent`` pair found in the dump."""
    found: set[tuple[int, int]] = set()
    for pairs, part in map_batches(subclass_task, None, lines, workers):
        found |= pairs
        if tally is not None:
            tally.merge(part)
    return SubclassEdgeSet(sorted(found))


def compute_closure(topic, edges: SubclassEdgeSet, backend: str | None = None) -> ClassClosure:
    """The topic plus every class that reaches it through child -> parent edges.

    Cycles are harmless: traversal marks each class once.
    """
    topic = EntityId(topic)
    pairs = edges.pairs
    ids = np.unique(np.concatenate([pairs.ravel(), np.array([int(topic)], dtype=np.int64)]))
    child = np.searchsorted(ids, pairs[:, 0])
    parent = np.searchsorted(ids, pairs[:, 1])
    order = np.argsort(parent, kind="stable")
    indptr = np.zeros(ids.size + 1, dtype=np.int64)
    np.cumsum(np.bincount(parent, minlength=ids.size), out=indptr[1:])
    mask = _kernels.reachable(indptr, child[order], int(np.searchsorted(ids, int(topic))), backend=backend)
    return ClassClosure(topic, frozenset(EntityId(i) for i in ids[mask].tolist()))


def save_closure_file(closure: ClassClosure, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"topic\t{closure.topic}\n")
        for member in sorted(closure.members):
            fh.write(f"{member}\n")


def load_closure_file(path: str | os.PathLike, topic=None) -> ClassClosure:
    """Read a closure cache; ``topic`` (if given) must match the file header."""
    members: set[EntityId] = set()
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        parts = header.split("\t")
        if len(parts) != 2 or parts[0] != "topic":
            raise FormatError(path, 1, f"expected 'topic<TAB>QID' header, got {header!r}")
        try:
            file_topic = EntityId.parse(parts[1])
        except IdError as exc:
            raise FormatError(path, 1, str(exc)) from None
        lineno = 1
        for lineno, line in enumerate(fh, start=2):
            text = line.rstrip("\n")
            try:
                members.add(EntityId.parse(text))
            except IdError:
                raise FormatError(path, lineno, f"not a QID: {text!r}") from None
    if topic is not None and EntityId(topic) != file_topic:
        raise TopicMismatch(f"{path} holds the closure of {file_topic}, not {EntityId(topic)}")
    if file_topic not in members:
        raise FormatError(path, lineno, f"topic {file_topic} missing from member list")
    return ClassClosure(file_topic, frozenset(members))
