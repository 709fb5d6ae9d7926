"""Per-batch worker tasks for the three dump passes.

Each task is pure over its batch and returns a small delta that the caller
merges by set/map union and counter addition.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .entity_model import STREAM_END, EntityRecord, Rank, Skip, parse_entity_line

P31 = 31
P279 = 279

LABEL_MODES = ("en", "en-fallback-any")


def choose_label(labels: dict[str, str], mode: str = "en") -> str | None:
    """English label, or under ``en-fallback-any`` the label of the smallest language code."""
    label = labels.get("en")
    if label is not None or mode == "en" or not labels:
        return label
    return labels[min(labels)]


@dataclass
class BatchTally:
    lines: int = 0
    records: int = 0
    skips: Counter = field(default_factory=Counter)

    def merge(self, other: "BatchTally") -> None:
        self.lines += other.lines
        self.records += other.records
        self.skips.update(other.skips)


def _records(batch: list[bytes], tally: BatchTally):
    for line in batch:
        tally.lines += 1
        res = parse_entity_line(line)
        if isinstance(res, EntityRecord):
            tally.records += 1
            yield res
        elif isinstance(res, Skip):
            tally.skips[res.reason.value] += 1
        elif res is STREAM_END:
            tally.skips["stream_end"] += 1


def subclass_task(_ctx, batch: list[bytes]):
    """(child, parent) pairs from truthy P279 claims of item records."""
    tally = BatchTally()
    pairs = set()
    for rec in _records(batch, tally):
        if rec.is_property:
            continue
        for c in rec.claims:
            if c.property == P279 and c.rank is not Rank.DEPRECATED:
                pairs.add((int(rec.id), int(c.target)))
    return pairs, tally


@dataclass
class SelectDelta:
    nodes: list[int] = field(default_factory=list)
    facts: np.ndarray = field(default_factory=lambda: np.empty((0, 3), dtype=np.int64))
    entity_labels: dict[int, str | None] = field(default_factory=dict)
    relation_labels: dict[int, str | None] = field(default_factory=dict)
    tally: BatchTally = field(default_factory=BatchTally)


def select_task(ctx, batch: list[bytes]) -> SelectDelta:
    """Keep records with a truthy P31 into the closure; harvest their truthy facts.

    Property records seen along the way contribute their labels too.
    """
    closure, mode = ctx
    out = SelectDelta()
    rows: list[tuple[int, int, int]] = []
    for rec in _records(batch, out.tally):
        if rec.is_property:
            out.relation_labels[int(rec.id)] = choose_label(rec.labels, mode)
            continue
        truthy = [c for c in rec.claims if c.rank is not Rank.DEPRECATED]
        if not any(c.property == P31 and c.target in closure for c in truthy):
            continue
        head = int(rec.id)
        out.nodes.append(head)
        out.entity_labels[head] = choose_label(rec.labels, mode)
        rows.extend((head, int(c.property), int(c.target)) for c in truthy)
    if rows:
        out.facts = np.array(rows, dtype=np.int64)
    return out


def label_task(ctx, batch: list[bytes]):
    """Labels for records whose id is in the needed entity/relation sets."""
    needed_entities, needed_relations, mode = ctx
    tally = BatchTally()
    ent: dict[int, str | None] = {}
    rel: dict[int, str | None] = {}
    for rec in _records(batch, tally):
        key = int(rec.id)
        if rec.is_property:
            if key in needed_relations:
                rel[key] = choose_label(rec.labels, mode)
        elif key in needed_entities:
            ent[key] = choose_label(rec.labels, mode)
    return ent, rel, tally
