"""Hand-built dump documents for the scenario tests."""

from __future__ import annotations

import json


def statement(prop: str, target: str, rank: str = "normal") -> dict:
    return {
        "mainsnak": {
            "snaktype": "value",
            "property": prop,
            "datavalue": {
                "value": {"entity-type": "item", "numeric-id": int(target[1:]), "id": target},
                "type": "wikibase-entityid",
            },
            "datatype": "wikibase-item",
        },
        "type": "statement",
        "rank": rank,
    }


def entity(ident: str, labels: dict | str | None = None, claims=(), kind: str | None = None) -> dict:
    if isinstance(labels, str):
        labels = {"en": labels}
    grouped: dict[str, list] = {}
    for c in claims:
        prop, target, *rank = c
        grouped.setdefault(prop, []).append(statement(prop, target, *rank))
    return {
        "type": kind or ("property" if ident.startswith("P") else "item"),
        "id": ident,
        "labels": {lang: {"language": lang, "value": v} for lang, v in (labels or {}).items()},
        "claims": grouped,
    }


def dump_bytes(docs) -> bytes:
    lines = [d if isinstance(d, str) else json.dumps(d, ensure_ascii=False) for d in docs]
    return ("[\n" + ",\n".join(lines) + "\n]\n").encode("utf-8")


PROPERTIES = [
    entity("P31", "instance of"),
    entity("P279", "subclass of"),
    entity("P47", "shares border with"),
    entity("P38", "currency"),
    entity("P155", "follows"),
    entity("P156", "followed by"),
    entity("P161", "cast member"),
    entity("P57", "director"),
    entity("P136", "genre"),
    entity("P26", "spouse"),
]

# country (Q6256) <- historical country; the USSR instantiates only the subclass
COUNTRIES = [
    entity("Q6256", "country"),
    entity("Q3024240", "historical country", [("P279", "Q6256")]),
    entity("Q15180", "Soviet Union", [("P31", "Q3024240")]),
    entity("Q142", "France", [("P31", "Q6256"), ("P47", "Q39"), ("P38", "Q4916")]),
    entity("Q39", "Switzerland", [("P31", "Q6256"), ("P47", "Q142")]),
    entity("Q4916", "euro", [("P31", "Q8142")]),
    entity("Q8142", "currency"),
] + PROPERTIES

FAST_FIVE, FAST_FURIOUS, TOY_STORY = "Q1000001", "Q1000002", "Q1000003"
PAUL_WALKER = "Q1000010"

FILMS = [
    entity("Q11424", "film"),
    entity(FAST_FIVE, "Fast Five", [
        ("P31", "Q11424"),
        ("P155", FAST_FURIOUS),
        ("P161", PAUL_WALKER),
        ("P161", "Q1000012", "deprecated"),
        ("P57", "Q1000011"),
        ("P136", "Q1000020"),
    ]),
    entity("Q202866", "animated film", [("P279", "Q11424")]),
    entity(PAUL_WALKER, "Paul Walker", [("P31", "Q5"), ("P161", FAST_FIVE)]),
    entity(TOY_STORY, "Toy Story\t(1995)", [("P31", "Q202866"), ("P161", "Q1000013")]),
    entity("Q1000004", "Lost reel", [("P31", "Q11424", "deprecated")]),
    entity(FAST_FURIOUS, {"en": "Fast & Furious", "fr": "Fast and Furious 4"}, [
        ("P31", "Q11424", "preferred"),
        ("P156", FAST_FIVE),
    ]),
    '{"type":"item","id":"Q1000099","redirects":{"from":"Q1000099","to":"Q1000001"}}',
    entity("Q1000011", "Justin Lin", [("P31", "Q5")]),
    entity("Q1000013", {"fr": "Tom Hanks (fr)"}, [("P31", "Q5")]),
    entity("Q1000020", "action film", [("P279", "Q11424")]),
    entity("Q5", "human"),
    '{"type":"lexeme","id":"L1","lemmas":{"en":{"language":"en","value":"film"}}}',
] + PROPERTIES
