import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixtures import entity
from wdsubgraph.entity_model import (
    STREAM_END,
    Claim,
    EntityId,
    EntityRecord,
    Fact,
    IdError,
    PropertyId,
    Rank,
    Skip,
    SkipCounter,
    SkipReason,
    dump_json,
    parse_entity_line,
)
from wdsubgraph.synthgen import SynthSpec, generate_dump


def line(doc, comma=True) -> bytes:
    return json.dumps(doc).encode() + (b"," if comma else b"")


class TestIds:
    def test_canonical_text(self):
        assert str(EntityId(42)) == "Q42"
        assert str(PropertyId.parse("P31")) == "P31"
        assert EntityId("Q5") == 5

    @pytest.mark.parametrize("text", ["Q05", "Q", "P5", "q5", "Q-1", "Q0", " Q5", "Q5x"])
    def test_rejects_non_canonical(self, text):
        with pytest.raises(IdError):
            EntityId.parse(text)

    def test_order_is_numeric(self):
        ids = [EntityId.parse(s) for s in ("Q10", "Q9", "Q100")]
        assert [str(i) for i in sorted(ids)] == ["Q9", "Q10", "Q100"]

    def test_fact_order(self):
        a = Fact(EntityId(2), PropertyId(1), EntityId(1))
        b = Fact(EntityId(10), PropertyId(1), EntityId(1))
        assert sorted([b, a]) == [a, b]

    @given(st.integers(min_value=1, max_value=10**12))
    def test_text_round_trip(self, n):
        assert EntityId.parse(str(EntityId(n))) == n
        assert PropertyId.parse(str(PropertyId(n))) == n


class TestParse:
    def test_framing(self):
        assert parse_entity_line(b"[") == Skip(SkipReason.FRAMING)
        assert parse_entity_line(b"]") is STREAM_END
        assert parse_entity_line(b"]\n") is STREAM_END

    def test_minimal_entity(self):
        doc = entity("Q42", "x", [("P31", "Q5")])
        rec = parse_entity_line(line(doc))
        assert rec == EntityRecord(EntityId(42), {"en": "x"}, (Claim(PropertyId(31), EntityId(5), Rank.NORMAL),))

    def test_last_line_without_comma(self):
        doc = entity("Q42", "x", [("P31", "Q5")])
        assert parse_entity_line(line(doc, comma=False)) == parse_entity_line(line(doc))

    def test_time_value_dropped(self):
        doc = entity("Q42", "x", [("P31", "Q5")])
        doc["claims"]["P569"] = [{
            "mainsnak": {"snaktype": "value", "property": "P569",
                         "datavalue": {"value": "1952-03-11", "type": "string"}},
            "type": "statement", "rank": "normal"}]
        doc["claims"]["P570"] = [{
            "mainsnak": {"snaktype": "value", "property": "P570",
                         "datavalue": {"value": {"time": "+1952-03-11T00:00:00Z"}, "type": "time"}},
            "type": "statement", "rank": "normal"}]
        rec = parse_entity_line(line(doc))
        assert [c.property for c in rec.claims] == [31]

    def test_deprecated_kept_and_flagged(self):
        rec = parse_entity_line(line(entity("Q1", None, [("P31", "Q5", "deprecated"), ("P31", "Q6")])))
        assert [c.rank for c in rec.claims] == [Rank.DEPRECATED, Rank.NORMAL]
        assert [c.target for c in rec.truthy_claims()] == [6]

    def test_duplicates_removed(self):
        rec = parse_entity_line(line(entity("Q1", None, [("P31", "Q5"), ("P31", "Q5"), ("P31", "Q5", "preferred")])))
        assert len(rec.claims) == 2

    def test_somevalue_and_property_targets_dropped(self):
        doc = entity("Q1", None, [("P31", "Q5")])
        doc["claims"]["P40"] = [{"mainsnak": {"snaktype": "somevalue", "property": "P40"}, "rank": "normal"}]
        doc["claims"]["P1659"] = [{"mainsnak": {"snaktype": "value", "property": "P1659", "datavalue": {
            "value": {"entity-type": "property", "numeric-id": 31, "id": "P31"}, "type": "wikibase-entityid"}},
            "rank": "normal"}]
        assert len(parse_entity_line(line(doc)).claims) == 1

    def test_numeric_id_only_target(self):
        doc = entity("Q1", None, [("P31", "Q5")])
        del doc["claims"]["P31"][0]["mainsnak"]["datavalue"]["value"]["id"]
        assert parse_entity_line(line(doc)).claims[0].target == 5

    def test_property_record(self):
        rec = parse_entity_line(line(entity("P31", "instance of")))
        assert rec.is_property and rec.id == PropertyId(31) and isinstance(rec.id, PropertyId)

    @pytest.mark.parametrize("raw,reason", [
        (b"", SkipReason.EMPTY),
        (b"   ,", SkipReason.EMPTY),
        (b'{"type":"item","id":"Q', SkipReason.MALFORMED),
        (b"[1, 2],", SkipReason.MALFORMED),
        (b"\xff\xfe{},", SkipReason.MALFORMED),
        (b'{"type":"item","id":"Q1","redirects":{"from":"Q1","to":"Q2"}},', SkipReason.REDIRECT),
        (b'{"type":"lexeme","id":"L1"},', SkipReason.UNSUPPORTED_TYPE),
        (b'{"type":["item"],"id":"Q1"},', SkipReason.UNSUPPORTED_TYPE),
        (b'{"type":"item","id":"P1"},', SkipReason.BAD_ID),
        (b'{"type":"item","id":7},', SkipReason.BAD_ID),
    ])
    def test_skips(self, raw, reason):
        assert parse_entity_line(raw) == Skip(reason)

    def test_skip_counter(self):
        counter = SkipCounter()
        for raw in (b"[", b"", b"{", b"]"):
            counter.observe(parse_entity_line(raw))
        assert counter == {"framing": 1, "empty": 1, "malformed": 1}

    @settings(max_examples=300)
    @given(st.binary(max_size=200))
    def test_total_on_arbitrary_bytes(self, raw):
        res = parse_entity_line(raw)
        assert isinstance(res, (EntityRecord, Skip)) or res is STREAM_END
        assert parse_entity_line(raw) == res

    @settings(max_examples=200)
    @given(st.recursive(
        st.none() | st.booleans() | st.integers() | st.text(max_size=5),
        lambda children: st.lists(children, max_size=3) | st.dictionaries(
            st.sampled_from(["type", "id", "labels", "claims", "mainsnak", "value", "rank", "P31", "en"]),
            children, max_size=4),
        max_leaves=15))
    def test_total_on_arbitrary_json(self, doc):
        res = parse_entity_line(json.dumps(doc).encode())
        assert isinstance(res, (EntityRecord, Skip))


@pytest.mark.parametrize("seed", range(5))
def test_synthgen_round_trip(seed):
    data, truth = generate_dump(SynthSpec(seed=seed, n_instances=80, n_offtopic=80))
    parsed = [r for r in map(parse_entity_line, data.split(b"\n")) if isinstance(r, EntityRecord)]
    assert parsed == truth.records


def test_dump_json_round_trip():
    rec = EntityRecord(EntityId(7), {"en": "a", "de": "b"},
                       (Claim(PropertyId(31), EntityId(5)), Claim(PropertyId(31), EntityId(6), Rank.DEPRECATED)))
    assert parse_entity_line(dump_json(rec) + b",") == rec
