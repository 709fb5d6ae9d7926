"""Wikidata identifiers, records and the single-line dump parser.

The dump is a JSON array written one entity document per line::

    [
    {"type":"item","id":"Q1",...},
    {"type":"item","id":"Q2",...}
    ]

:func:`parse_entity_line` maps every physical line to exactly one of
:class:`EntityRecord`, :class:`Skip` or :data:`STREAM_END`; it never raises.
"""

from __future__ import annotations

import enum
import json
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple, Union

try:
    import orjson

    _loads = orjson.loads

    def _dumps(obj) -> bytes:
        return orjson.dumps(obj)

except ImportError:  # pragma: no cover - exercised only without orjson
    _loads = json.loads

    def _dumps(obj) -> bytes:
        return json.dumps(obj, ensure_ascii=False, separators=(",", ":")).encode("utf-8")


_ID_RE = re.compile(r"([QP])([1-9][0-9]*)\Z")


class IdError(ValueError):
    pass


class _WikidataId(int):
    __slots__ = ()
    prefix = ""

    def __new__(cls, value):
        if isinstance(value, str):
            return cls.parse(value)
        n = int(value)
        if n <= 0:
            raise IdError(f"{cls.__name__} must be positive, got {n}")
        return super().__new__(cls, n)

    @classmethod
    def parse(cls, text: str):
        m = _ID_RE.match(text)
        if m is None or m.group(1) != cls.prefix:
            raise IdError(f"not a canonical {cls.__name__}: {text!r}")
        return super().__new__(cls, int(m.group(2)))

    def __str__(self) -> str:
        return f"{self.prefix}{int(self)}"

    __repr__ = __str__

    def __reduce__(self):
        return (type(self), (int(self),))


class EntityId(_WikidataId):
    """Item identifier ``Q<n>``; ordered by its numeric part."""

    __slots__ = ()
    prefix = "Q"


class PropertyId(_WikidataId):
    """Property identifier ``P<n>``; ordered by its numeric part."""

    __slots__ = ()
    prefix = "P"


def parse_id(text: str) -> EntityId | PropertyId:
    if text[:1] == "P":
        return PropertyId.parse(text)
    return EntityId.parse(text)


class Rank(str, enum.Enum):
    PREFERRED = "preferred"
    NORMAL = "normal"
    DEPRECATED = "deprecated"


class Claim(NamedTuple):
    property: PropertyId
    target: EntityId
    rank: Rank = Rank.NORMAL

    @property
    def truthy(self) -> bool:
        return self.rank is not Rank.DEPRECATED


class Fact(NamedTuple):
    """Directed ``(head, relation, tail)`` triple."""

    head: EntityId
    relation: PropertyId
    tail: EntityId


@dataclass(frozen=True)
class EntityRecord:
    id: EntityId | PropertyId
    labels: dict[str, str] = field(default_factory=dict)
    claims: tuple[Claim, ...] = ()

    @property
    def is_property(self) -> bool:
        return isinstance(self.id, PropertyId)

    def truthy_claims(self, prop: int | None = None):
        for c in self.claims:
            if c.rank is not Rank.DEPRECATED and (prop is None or c.property == prop):
                yield c


class SkipReason(str, enum.Enum):
    FRAMING = "framing"
    EMPTY = "empty"
    MALFORMED = "malformed"
    REDIRECT = "redirect"
    UNSUPPORTED_TYPE = "unsupported_type"
    BAD_ID = "bad_id"


@dataclass(frozen=True)
class Skip:
    reason: SkipReason


class _StreamEnd:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "STREAM_END"

    def __reduce__(self):
        return (_StreamEnd, ())


STREAM_END = _StreamEnd()

ParseResult = Union[EntityRecord, Skip, _StreamEnd]

_SKIPS = {r: Skip(r) for r in SkipReason}
_RANKS = {r.value: r for r in Rank}
_ENTITY_TYPES = {"item": EntityId, "property": PropertyId}


def parse_entity_line(line: bytes) -> ParseResult:
    """Parse one physical dump line.

    Only statements whose main snak holds an item reference are kept;
    deprecated statements are kept with their rank so callers can drop them.
    """
    body = line.strip()
    if body.endswith(b","):
        body = body[:-1].rstrip()
    if not body:
        return _SKIPS[SkipReason.EMPTY]
    if body == b"[":
        return _SKIPS[SkipReason.FRAMING]
    if body == b"]":
        return STREAM_END
    try:
        doc = _loads(body)
    except (ValueError, RecursionError):
        return _SKIPS[SkipReason.MALFORMED]
    if not isinstance(doc, dict):
        return _SKIPS[SkipReason.MALFORMED]
    if "redirects" in doc or "redirect" in doc:
        return _SKIPS[SkipReason.REDIRECT]
    kind = doc.get("type")
    id_type = _ENTITY_TYPES.get(kind) if isinstance(kind, str) else None
    if id_type is None:
        return _SKIPS[SkipReason.UNSUPPORTED_TYPE]
    raw_id = doc.get("id")
    try:
        ent_id = id_type.parse(raw_id)
    except (IdError, TypeError):
        return _SKIPS[SkipReason.BAD_ID]
    return EntityRecord(ent_id, _parse_labels(doc.get("labels")), _parse_claims(doc.get("claims")))


def _parse_labels(raw) -> dict[str, str]:
    labels: dict[str, str] = {}
    if not isinstance(raw, dict):
        return labels
    for lang, entry in raw.items():
        if isinstance(entry, dict):
            value = entry.get("value")
            if isinstance(value, str):
                labels[lang] = value
    return labels


def _parse_claims(raw) -> tuple[Claim, ...]:
    if not isinstance(raw, dict):
        return ()
    seen: set[Claim] = set()
    claims: list[Claim] = []
    for key, statements in raw.items():
        if not isinstance(statements, list):
            continue
        for st in statements:
            claim = _parse_statement(key, st)
            if claim is not None and claim not in seen:
                seen.add(claim)
                claims.append(claim)
    return tuple(claims)


def _parse_statement(key: str, st) -> Claim | None:
    if not isinstance(st, dict):
        return None
    snak = st.get("mainsnak")
    if not isinstance(snak, dict) or snak.get("snaktype", "value") != "value":
        return None
    dv = snak.get("datavalue")
    if not isinstance(dv, dict) or dv.get("type") != "wikibase-entityid":
        return None
    value = dv.get("value")
    if not isinstance(value, dict):
        return None
    try:
        if "id" in value:
            target = EntityId.parse(value["id"])
        elif value.get("entity-type") == "item":
            target = EntityId(value["numeric-id"])
        else:
            return None
        prop = PropertyId.parse(snak.get("property", key))
    except (IdError, TypeError, ValueError, KeyError):
        return None
    rank = _RANKS.get(st.get("rank", "normal"))
    if rank is None:
        return None
    return Claim(prop, target, rank)


def entity_document(record: EntityRecord) -> dict:
    """Build the dump-schema JSON document for ``record``."""
    kind = "property" if record.is_property else "item"
    labels = {lang: {"language": lang, "value": v} for lang, v in record.labels.items()}
    claims: dict[str, list] = {}
    for i, c in enumerate(record.claims):
        claims.setdefault(str(c.property), []).append({
            "mainsnak": {
                "snaktype": "value",
                "property": str(c.property),
                "datavalue": {
                    "value": {"entity-type": "item", "numeric-id": int(c.target), "id": str(c.target)},
                    "type": "wikibase-entityid",
                },
                "datatype": "wikibase-item",
            },
            "type": "statement",
            "id": f"{record.id}${i}",
            "rank": c.rank.value,
        })
    return {"type": kind, "id": str(record.id), "labels": labels, "claims": claims}


def dump_json(doc: EntityRecord | dict) -> bytes:
    """Serialize a record or document as one dump line body (no trailing comma)."""
    if isinstance(doc, EntityRecord):
        doc = entity_document(doc)
    return _dumps(doc)


class SkipCounter(Counter):
    """Per-reason tally of skipped lines."""

    def observe(self, result: ParseResult) -> None:
        if isinstance(result, Skip):
            self[result.reason.value] += 1
