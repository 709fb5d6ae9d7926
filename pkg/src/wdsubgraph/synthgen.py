"""Synthetic mini-dumps with planted ground truth, and a brute-force reference extractor.

:func:`oracle_extract` shares no code with the scanning pipeline: it has its
own line handling, claim walking and fixed-point closure.
"""

from __future__ import annotations

import bz2
import gzip
import io
import json
import os
import random
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .entity_model import Claim, EntityId, EntityRecord, PropertyId, Rank, dump_json, entity_document

SHAPES = ("chain", "tree", "dag-with-cycles")
INSTANCE_OF = 31
SUBCLASS_OF = 279


@dataclass(frozen=True)
class SynthSpec:
    seed: int = 0
    n_classes: int = 5
    hierarchy_shape: str = "tree"
    n_instances: int = 50
    n_offtopic: int = 50
    facts_per_entity: tuple[int, int] = (0, 6)
    english_label_rate: float = 0.7
    n_properties: int = 12
    n_offtopic_classes: int = 3
    noise: bool = True

    def __post_init__(self):
        if self.hierarchy_shape not in SHAPES:
            raise ValueError(f"hierarchy_shape must be one of {SHAPES}")
        lo, hi = self.facts_per_entity
        if min(self.n_classes - 1, self.n_instances, self.n_offtopic, lo, self.n_offtopic_classes) < 0 or hi < lo:
            raise ValueError("counts must be non-negative (and n_classes >= 1)")
        if not 0.0 <= self.english_label_rate <= 1.0:
            raise ValueError("english_label_rate must lie in [0, 1]")
        if self.n_properties < 1:
            raise ValueError("need at least one relation property")


@dataclass
class GroundTruth:
    """Expected extraction result. Fact triples are ``(head, relation, tail)`` ints."""

    topic: int
    closure: set[int] = field(default_factory=set)
    subclass_edges: set[tuple[int, int]] = field(default_factory=set)
    nodes: set[int] = field(default_factory=set)
    edges: set[tuple[int, int, int]] = field(default_factory=set)
    attributes: set[tuple[int, int, int]] = field(default_factory=set)
    entity_labels: dict[int, str] = field(default_factory=dict)
    relation_labels: dict[int, str] = field(default_factory=dict)
    label_fallbacks: int = 0
    skips: dict[str, int] = field(default_factory=dict)
    n_lines: int = 0
    n_entity_lines: int = 0
    records: list[EntityRecord] | None = None

    @property
    def stats(self) -> dict[str, int]:
        return oracle_stats(self.nodes, self.edges, self.attributes)

    def edge_distribution(self) -> list[tuple[str, int]]:
        counts = Counter(r for _, r, _ in self.edges)
        order = sorted(counts, key=lambda r: (-counts[r], r))
        return [(self.relation_labels[r], counts[r]) for r in order]

    def same_result(self, other: "GroundTruth") -> bool:
        return (
            self.closure == other.closure
            and self.nodes == other.nodes
            and self.edges == other.edges
            and self.attributes == other.attributes
            and self.entity_labels == other.entity_labels
            and self.relation_labels == other.relation_labels
            and self.label_fallbacks == other.label_fallbacks
        )

    def to_json(self) -> dict:
        return {
            "topic": f"Q{self.topic}",
            "closure": [f"Q{c}" for c in sorted(self.closure)],
            "subclass_edges": [[f"Q{c}", f"Q{p}"] for c, p in sorted(self.subclass_edges)],
            "nodes": [f"Q{n}" for n in sorted(self.nodes)],
            "edges": [[f"Q{h}", f"P{r}", f"Q{t}"] for h, r, t in sorted(self.edges)],
            "attributes": [[f"Q{h}", f"P{r}", f"Q{t}"] for h, r, t in sorted(self.attributes)],
            "entity_labels": {f"Q{k}": v for k, v in sorted(self.entity_labels.items())},
            "relation_labels": {f"P{k}": v for k, v in sorted(self.relation_labels.items())},
            "label_fallbacks": self.label_fallbacks,
            "skips": dict(sorted(self.skips.items())),
            "n_lines": self.n_lines,
            "n_entity_lines": self.n_entity_lines,
            "stats": self.stats,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "GroundTruth":
        q = lambda s: int(s[1:])  # noqa: E731
        return cls(
            topic=q(doc["topic"]),
            closure={q(c) for c in doc["closure"]},
            subclass_edges={(q(c), q(p)) for c, p in doc["subclass_edges"]},
            nodes={q(n) for n in doc["nodes"]},
            edges={(q(h), q(r), q(t)) for h, r, t in doc["edges"]},
            attributes={(q(h), q(r), q(t)) for h, r, t in doc["attributes"]},
            entity_labels={q(k): v for k, v in doc["entity_labels"].items()},
            relation_labels={q(k): v for k, v in doc["relation_labels"].items()},
            label_fallbacks=doc["label_fallbacks"],
            skips=dict(doc["skips"]),
            n_lines=doc["n_lines"],
            n_entity_lines=doc["n_entity_lines"],
        )


def oracle_stats(nodes, edges, attributes) -> dict[str, int]:
    """The seven dataset counts, straight from the definitions."""
    touched = {h for h, _, _ in edges} | {t for _, _, t in edges}
    return {
        "nodes": len(nodes),
        "edges": len(edges),
        "isolated_nodes": len(set(nodes) - touched),
        "distinct_attributes": len({t for _, _, t in attributes}),
        "attribute_facts": len(attributes),
        "distinct_relations": len({r for _, r, _ in edges}),
        "distinct_attribute_relations": len({r for _, r, _ in attributes}),
    }


# --- generator -----------------------------------------------------------------

_PROPERTY_NAMES = {INSTANCE_OF: "instance of", SUBCLASS_OF: "subclass of"}
_OTHER_LANGS = ("fr", "de", "es")
_ODD_NAMES = ("Zoë", "Łódź", "東京", "tab\tinside", "line\nbreak")


class _Generator:
    def __init__(self, spec: SynthSpec, keep_records: bool):
        self.spec = spec
        self.rng = random.Random(spec.seed)
        self.np_rng = np.random.default_rng(spec.seed)
        self.keep_records = keep_records

    def allocate(self):
        s = self.spec
        n_classes = s.n_classes + s.n_offtopic_classes
        n_items = n_classes + s.n_instances + s.n_offtopic
        n_dangling = 3 if s.noise else 0
        total = n_items + n_dangling + 1
        ids = self.np_rng.choice(np.arange(1, 8 * total + 16), size=total, replace=False).tolist()
        pos = 0

        def take(k):
            nonlocal pos
            out = ids[pos:pos + k]
            pos += k
            return out

        self.topic_classes = take(s.n_classes)
        self.off_classes = take(s.n_offtopic_classes)
        self.instances = take(s.n_instances)
        self.offtopic = take(s.n_offtopic)
        self.dangling = take(n_dangling)
        self.redirect_id = take(1)[0]
        pids = self.rng.sample(range(32, 4 * s.n_properties + 400), s.n_properties)
        pids = [p if p != SUBCLASS_OF else 3 for p in pids]
        self.properties = pids
        self.weights = [1.0 / (j + 1) for j in range(len(pids))]
        # one relation property without any record in the dump
        self.recordless_property = pids[-1] if s.noise and len(pids) > 1 else None

    def rank(self):
        u = self.rng.random()
        if u < 0.1:
            return Rank.DEPRECATED
        if u < 0.2:
            return Rank.PREFERRED
        return Rank.NORMAL

    def labels(self, name: str) -> dict[str, str]:
        if self.rng.random() < self.spec.english_label_rate:
            return {"en": name}
        if self.rng.random() < 0.5:
            return {self.rng.choice(_OTHER_LANGS): name}
        return {}

    def hierarchy(self) -> dict[int, list[tuple[int, Rank]]]:
        s = self.spec
        rng = self.rng
        tc = self.topic_classes
        parents: dict[int, list[tuple[int, Rank]]] = {c: [] for c in tc + self.off_classes}
        for i in range(1, len(tc)):
            j = i - 1 if s.hierarchy_shape == "chain" else rng.randrange(i)
            parents[tc[i]].append((tc[j], Rank.NORMAL))
        if s.hierarchy_shape == "dag-with-cycles" and len(tc) > 1:
            for i in range(len(tc)):
                if rng.random() < 0.4:
                    j = rng.randrange(len(tc))
                    if j != i:
                        parents[tc[i]].append((tc[j], Rank.NORMAL))
            # guaranteed cycle through the topic
            parents[tc[0]].append((tc[-1], Rank.NORMAL))
        oc = self.off_classes
        for i in range(1, len(oc)):
            parents[oc[i]].append((oc[0], Rank.NORMAL))
        if oc and s.noise:
            # only a deprecated statement links this class into the topic tree
            parents[oc[-1]].append((tc[0], Rank.DEPRECATED))
            if tc:
                parents[tc[0]].append((oc[0], Rank.NORMAL))
        return parents

    def instance_claims(self, me: int) -> list[Claim]:
        s = self.spec
        rng = self.rng
        claims = [Claim(PropertyId(INSTANCE_OF), EntityId(rng.choice(self.topic_classes)),
                        Rank.PREFERRED if rng.random() < 0.2 else Rank.NORMAL)]
        if self.off_classes and rng.random() < 0.3:
            claims.append(Claim(PropertyId(INSTANCE_OF), EntityId(rng.choice(self.off_classes)), self.rank()))
        for _ in range(rng.randint(*s.facts_per_entity)):
            prop = rng.choices(self.properties, self.weights)[0]
            u = rng.random()
            if u < 0.05:
                target = me
            elif u < 0.5 and self.instances:
                target = rng.choice(self.instances)
            elif u < 0.8 and self.offtopic:
                target = rng.choice(self.offtopic)
            elif u < 0.9 and self.dangling:
                target = rng.choice(self.dangling)
            else:
                target = rng.choice(self.topic_classes + self.off_classes)
            claims.append(Claim(PropertyId(prop), EntityId(target), self.rank()))
        return claims

    def offtopic_claims(self) -> list[Claim]:
        rng = self.rng
        claims = []
        u = rng.random()
        if self.spec.noise and u < 0.02 and self.topic_classes:
            # decoy: only a deprecated instance-of statement into the topic tree
            claims.append(Claim(PropertyId(INSTANCE_OF), EntityId(rng.choice(self.topic_classes)), Rank.DEPRECATED))
        elif self.off_classes and u < 0.6:
            claims.append(Claim(PropertyId(INSTANCE_OF), EntityId(rng.choice(self.off_classes)), Rank.NORMAL))
        pool = self.instances or self.offtopic
        for _ in range(rng.randint(0, 2)):
            prop = rng.choices(self.properties, self.weights)[0]
            claims.append(Claim(PropertyId(prop), EntityId(rng.choice(pool)), Rank.NORMAL))
        return claims


def _canonical(claims: list[Claim]) -> tuple[Claim, ...]:
    return tuple(sorted(set(claims), key=lambda c: (int(c.property), int(c.target), c.rank.value)))


def _noisy_document(record: EntityRecord, rng: random.Random) -> dict:
    """Add content the parser must ignore: literal values, no-value snaks, repeated statements."""
    doc = entity_document(record)
    claims = doc["claims"]
    if rng.random() < 0.3:
        claims.setdefault("P569", []).append({
            "mainsnak": {"snaktype": "value", "property": "P569",
                         "datavalue": {"value": {"time": "+1952-03-11T00:00:00Z"}, "type": "time"}},
            "type": "statement", "rank": "normal"})
    if rng.random() < 0.2:
        claims.setdefault("P1476", []).append({
            "mainsnak": {"snaktype": "value", "property": "P1476",
                         "datavalue": {"value": "1952-03-11", "type": "string"}},
            "type": "statement", "rank": "normal"})
    if rng.random() < 0.1:
        claims.setdefault("P40", []).append({
            "mainsnak": {"snaktype": "novalue", "property": "P40"}, "type": "statement", "rank": "normal"})
    if claims and rng.random() < 0.2:
        key = sorted(claims)[0]
        claims[key].append(claims[key][0])
    doc["sitelinks"] = {}
    return doc


def write_dump(spec: SynthSpec, out, codec: str = "none", keep_records: bool = False) -> GroundTruth:
    """Write a framed synthetic dump to a path or binary file object."""
    if isinstance(out, (str, os.PathLike)):
        path = Path(out)
        if codec == "bzip2":
            fh = bz2.open(path, "wb", compresslevel=1)
        elif codec == "gzip":
            fh = gzip.open(path, "wb", compresslevel=1)
        else:
            fh = open(path, "wb")
        with fh:
            return _write(spec, fh, keep_records)
    return _write(spec, out, keep_records)


def generate_dump(spec: SynthSpec) -> tuple[bytes, GroundTruth]:
    buf = io.BytesIO()
    truth = _write(spec, buf, keep_records=True)
    return buf.getvalue(), truth


def _write(spec: SynthSpec, fh, keep_records: bool) -> GroundTruth:
    g = _Generator(spec, keep_records)
    g.allocate()
    rng = g.rng
    s = spec
    topic = g.topic_classes[0]
    truth = GroundTruth(topic=topic, closure=set(g.topic_classes), nodes=set(g.instances))
    truth.records = [] if keep_records else None

    parents = g.hierarchy()
    for child, ps in parents.items():
        truth.subclass_edges.update((child, p) for p, rank in ps if rank is not Rank.DEPRECATED)

    names: dict[int, str] = {}
    odd = list(_ODD_NAMES) if s.noise else []

    def name_for(kind: str, q: int) -> str:
        if odd and kind == "instance" and rng.random() < 0.05:
            return f"{odd.pop()} {q}"
        return f"{kind} {q}"

    # instance records are planned up front so the referenced set is known
    inst_records: dict[int, EntityRecord] = {}
    for q in g.instances:
        claims = _canonical(g.instance_claims(q))
        labels = g.labels(name_for("instance", q))
        inst_records[q] = EntityRecord(EntityId(q), labels, claims)
        names[q] = labels.get("en")
        for c in claims:
            if c.rank is Rank.DEPRECATED:
                continue
            fact = (q, int(c.property), int(c.target))
            (truth.edges if int(c.target) in truth.nodes else truth.attributes).add(fact)

    referenced_e = set(truth.nodes) | {t for _, _, t in truth.attributes}
    referenced_r = {r for _, r, _ in truth.edges} | {r for _, r, _ in truth.attributes}

    # dump order: a seeded permutation over every line source
    sources: list[tuple[str, int]] = (
        [("class", q) for q in g.topic_classes + g.off_classes]
        + [("instance", q) for q in g.instances]
        + [("property", p) for p in g.properties if p != g.recordless_property]
        + [("property", INSTANCE_OF), ("property", SUBCLASS_OF)]
    )
    if s.noise:
        sources += [("redirect", g.redirect_id), ("lexeme", 0), ("malformed", 0)]
    n_off = len(g.offtopic)
    order_small = list(range(len(sources)))
    rng.shuffle(order_small)
    # off-topic items are spread between the planned lines without materializing them
    slots = np.sort(g.np_rng.integers(0, len(sources) + 1, size=n_off)) if n_off else np.empty(0, dtype=np.int64)

    fh.write(b"[\n")
    first = True
    n_entity_lines = 0

    def emit(body: bytes):
        nonlocal first, n_entity_lines
        if not first:
            fh.write(b",\n")
        fh.write(body)
        first = False
        n_entity_lines += 1

    def emit_record(rec: EntityRecord):
        if keep_records:
            truth.records.append(rec)
        doc = _noisy_document(rec, rng) if s.noise else entity_document(rec)
        emit(dump_json(doc))

    off_iter = iter(g.offtopic)
    slot_pos = 0
    for k in range(len(order_small) + 1):
        while slot_pos < n_off and slots[slot_pos] == k:
            q = next(off_iter)
            slot_pos += 1
            labels = g.labels(f"item {q}")
            if q in referenced_e:
                names[q] = labels.get("en")
            emit_record(EntityRecord(EntityId(q), labels, _canonical(g.offtopic_claims())))
        if k == len(order_small):
            break
        kind, q = sources[order_small[k]]
        if kind == "class":
            labels = g.labels(f"class {q}")
            names[q] = labels.get("en")
            claims = [Claim(PropertyId(SUBCLASS_OF), EntityId(p), r) for p, r in parents[q]]
            emit_record(EntityRecord(EntityId(q), labels, _canonical(claims)))
        elif kind == "instance":
            emit_record(inst_records[q])
        elif kind == "property":
            labels = g.labels(_PROPERTY_NAMES.get(q, f"relation {q}"))
            names[-q] = labels.get("en")
            emit_record(EntityRecord(PropertyId(q), labels, ()))
        elif kind == "redirect":
            emit(json.dumps({"type": "item", "id": f"Q{q}", "redirects": {"from": f"Q{q}", "to": f"Q{topic}"}}).encode())
        elif kind == "lexeme":
            emit(b'{"type":"lexeme","id":"L7","lemmas":{"en":{"language":"en","value":"run"}}}')
        elif kind == "malformed":
            emit(b'{"type":"item","id":"Q')
    fh.write(b"\n]\n")

    for q in sorted(referenced_e):
        label = names.get(q)
        truth.entity_labels[q] = label if label is not None else f"Q{q}"
        truth.label_fallbacks += label is None
    for p in sorted(referenced_r):
        label = names.get(-p)
        truth.relation_labels[p] = label if label is not None else f"P{p}"
        truth.label_fallbacks += label is None

    truth.n_entity_lines = n_entity_lines
    truth.n_lines = n_entity_lines + 2
    truth.skips = {"framing": 1, "stream_end": 1}
    if s.noise:
        truth.skips.update({"redirect": 1, "unsupported_type": 1, "malformed": 1})
    return truth


# --- oracle ----------------------------------------------------------------------

def _oracle_documents(dump: bytes):
    for raw in dump.decode("utf-8").split("\n"):
        text = raw.strip().rstrip(",").strip()
        if text in ("", "[", "]"):
            continue
        try:
            doc = json.loads(text)
        except ValueError:
            continue
        if not isinstance(doc, dict) or "redirects" in doc or doc.get("type") not in ("item", "property"):
            continue
        ident = doc.get("id")
        if not isinstance(ident, str) or len(ident) < 2 or not ident[1:].isdigit() or ident[1] == "0":
            continue
        if (doc["type"] == "item") != (ident[0] == "Q") or ident[0] not in "QP":
            continue
        yield doc


def _oracle_claims(doc: dict):
    """Truthy (property number, target number) pairs with an item as value."""
    out = []
    for key, statements in (doc.get("claims") or {}).items():
        for st in statements if isinstance(statements, list) else []:
            if not isinstance(st, dict) or st.get("rank", "normal") == "deprecated":
                continue
            if st.get("rank", "normal") not in ("normal", "preferred"):
                continue
            snak = st.get("mainsnak") or {}
            if snak.get("snaktype", "value") != "value":
                continue
            dv = snak.get("datavalue") or {}
            if dv.get("type") != "wikibase-entityid":
                continue
            val = dv.get("value") or {}
            target = val.get("id")
            if target is None and val.get("entity-type") == "item":
                target = f"Q{val.get('numeric-id')}"
            if not isinstance(target, str) or not target.startswith("Q") or not target[1:].isdigit():
                continue
            prop = snak.get("property", key)
            out.append((int(prop[1:]), int(target[1:])))
    return out


def oracle_extract(dump: bytes, topic, labels_mode: str = "en") -> GroundTruth:
    """Reference extraction: load every record, then apply the selection rules literally."""
    topic = int(EntityId(topic))
    items: dict[int, dict] = {}
    props: dict[int, dict] = {}
    for doc in _oracle_documents(dump):
        (items if doc["type"] == "item" else props)[int(doc["id"][1:])] = doc

    claims = {q: _oracle_claims(doc) for q, doc in items.items()}
    sub_edges = {(q, t) for q, cs in claims.items() for p, t in cs if p == SUBCLASS_OF}

    closure = {topic}
    while True:
        grown = closure | {c for c, p in sub_edges if p in closure}
        if grown == closure:
            break
        closure = grown

    nodes = {q for q, cs in claims.items() if any(p == INSTANCE_OF and t in closure for p, t in cs)}
    facts = {(q, p, t) for q in nodes for p, t in claims[q]}
    edges = {f for f in facts if f[2] in nodes}
    attributes = facts - edges

    def pick(doc):
        if doc is None:
            return None
        labels = {k: v.get("value") for k, v in (doc.get("labels") or {}).items() if isinstance(v, dict)}
        if "en" in labels:
            return labels["en"]
        if labels_mode == "en-fallback-any" and labels:
            return labels[sorted(labels)[0]]
        return None

    truth = GroundTruth(topic=topic, closure=closure, subclass_edges=sub_edges, nodes=nodes,
                        edges=edges, attributes=attributes)
    for q in sorted(nodes | {h for h, _, _ in facts} | {t for _, _, t in facts}):
        label = pick(items.get(q))
        truth.entity_labels[q] = label if label is not None else f"Q{q}"
        truth.label_fallbacks += label is None
    for p in sorted({r for _, r, _ in facts}):
        label = pick(props.get(p))
        truth.relation_labels[p] = label if label is not None else f"P{p}"
        truth.label_fallbacks += label is None
    return truth


def random_spec(seed: int) -> SynthSpec:
    """A varied small spec; seeds cycle through the three hierarchy shapes."""
    rng = random.Random(10_000 + seed)
    size = rng.randint(10, 2000)
    n_instances = rng.randint(0, max(1, size // 3))
    return SynthSpec(
        seed=seed,
        n_classes=rng.randint(1, 30),
        hierarchy_shape=SHAPES[seed % 3],
        n_instances=n_instances,
        n_offtopic=max(0, size - n_instances),
        facts_per_entity=(0, rng.randint(0, 8)),
        english_label_rate=rng.choice([0.0, 0.3, 0.7, 1.0]),
        n_properties=rng.randint(1, 20),
        n_offtopic_classes=rng.randint(0, 4),
        noise=seed % 5 != 4,
    )
