import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wdsubgraph.dataset import (
    DatasetFormatError,
    IndexedDataset,
    MissingLabel,
    OutputExistsError,
    build_dataset,
    compute_stats,
    edge_type_distribution,
    read_dataset,
    read_readme,
    write_dataset,
)
from wdsubgraph.entity_model import EntityId
from wdsubgraph.extraction import FactStore, LabelTable, NodeSet
from wdsubgraph.synthgen import SynthSpec, generate_dump, oracle_stats


def make(nodes, facts, ent_labels=None, rel_labels=None, **kw):
    ents = {q for f in facts for q in (f[0], f[2])} | set(nodes)
    rels = {f[1] for f in facts}
    labels = LabelTable(
        ent_labels if ent_labels is not None else {q: f"e{q}" for q in ents},
        rel_labels if rel_labels is not None else {p: f"r{p}" for p in rels},
    )
    return build_dataset(NodeSet(nodes), FactStore(facts), labels, **kw)


def test_spouses_are_one_edge_each():
    # George Washington / Martha Washington, both humans, married to each other
    ds = make([23, 191789], [(23, 26, 191789), (191789, 26, 23)])
    assert ds.id_facts("edges") == {(23, 26, 191789), (191789, 26, 23)}
    assert ds.attributes.shape == (0, 3)
    assert ds.edges.tolist() == [[0, 1, 0], [1, 0, 0]]


def test_currency_is_an_attribute():
    ds = make([142], [(142, 38, 4916)])
    assert ds.edges.shape == (0, 3)
    assert ds.id_facts("attributes") == {(142, 38, 4916)}
    assert ds.entity_ids.tolist() == [142, 4916]


def test_nodes_without_facts():
    ds = make([3, 1, 2], [])
    stats = compute_stats(ds)
    assert stats.nodes == 3 and stats.isolated_nodes == 3 and stats.edges == 0
    assert ds.relation_ids.size == 0


def test_empty_dataset_stats_are_zero():
    stats = compute_stats(make([], []))
    assert all(v == 0 for v in stats.as_dict().values())


def test_index_order():
    # nodes first by QID, then attribute-only entities by QID
    ds = make([50, 7], [(50, 9, 3), (7, 2, 50), (7, 9, 1000)])
    assert ds.entity_ids.tolist() == [7, 50, 3, 1000]
    assert ds.relation_ids.tolist() == [2, 9]
    assert ds.edges.tolist() == [[0, 1, 0]]
    assert ds.attributes.tolist() == [[0, 3, 1], [1, 2, 1]]


def test_fact_rows_sorted_by_head_relation_tail():
    ds = make([1, 2, 3], [(1, 9, 3), (1, 5, 3), (1, 9, 2), (2, 5, 1)])
    rows = [tuple(r) for r in ds.edges.tolist()]
    assert rows == sorted(rows, key=lambda r: (r[0], r[2], r[1]))


def test_head_outside_nodes_is_invariant_error():
    from wdsubgraph.dataset import InvariantError
    with pytest.raises(InvariantError):
        make([1], [(2, 5, 1)])


def test_missing_label_raises():
    with pytest.raises(MissingLabel):
        make([1, 2], [(1, 5, 2)], ent_labels={1: "a"}, rel_labels={5: "r"})


def test_isolated_count():
    ds = make([1, 2, 3], [(1, 5, 2), (3, 5, 99)])
    assert compute_stats(ds).isolated_nodes == 1


def test_edge_type_distribution_tie_break():
    ds = make([1, 2, 3], [(1, 9, 2), (2, 9, 3), (1, 4, 3), (3, 7, 1), (1, 8, 77)],
              rel_labels={4: "d", 7: "c", 8: "b", 9: "a"})
    assert edge_type_distribution(ds) == [("a", 2), ("d", 1), ("c", 1)]
    assert edge_type_distribution(ds, top_k=1) == [("a", 2)]


def test_write_format(tmp_path):
    ds = make([1, 2], [(1, 26, 2)], ent_labels={1: "x\ty", 2: "line\nbreak"}, topic=EntityId(5), topic_name="humans")
    write_dataset(ds, tmp_path)
    assert sorted(p.name for p in tmp_path.iterdir()) == sorted(
        ["edges.txt", "attributes.txt", "entities.txt", "nodes.txt", "relations.txt", "readme.txt"])
    assert (tmp_path / "edges.txt").read_text() == "headEntity\ttailEntity\trelation\n0\t1\t0\n"
    assert (tmp_path / "attributes.txt").read_text() == "headEntity\ttailEntity\trelation\n"
    assert (tmp_path / "entities.txt").read_text() == "entityID\twikidataID\tlabel\n0\tQ1\tx y\n1\tQ2\tline break\n"
    assert (tmp_path / "relations.txt").read_text() == "relationID\twikidataID\tlabel\n0\tP26\tr26\n"
    readme = read_readme(tmp_path / "readme.txt")
    assert readme["topic"] == "humans" and readme["topic_qid"] == "Q5" and readme["edges"] == "1"


def test_nodes_file_is_prefix(tmp_path):
    ds = make([5, 6], [(5, 1, 6), (5, 1, 100), (6, 2, 3)])
    write_dataset(ds, tmp_path)
    ents = (tmp_path / "entities.txt").read_text().splitlines()
    nodes = (tmp_path / "nodes.txt").read_text().splitlines()
    assert ents[:len(nodes)] == nodes and len(nodes) == 3


def test_refuses_non_empty_dir(tmp_path):
    ds = make([1], [])
    (tmp_path / "keep.txt").write_text("x")
    with pytest.raises(OutputExistsError):
        write_dataset(ds, tmp_path)
    assert sorted(p.name for p in tmp_path.iterdir()) == ["keep.txt"]
    write_dataset(ds, tmp_path, force=True)
    assert (tmp_path / "nodes.txt").exists()


def test_write_twice_identical(tmp_path):
    data, truth = generate_dump(SynthSpec(seed=3, n_instances=80, n_offtopic=120))
    ds = make(sorted(truth.nodes), sorted(truth.edges | truth.attributes),
              truth.entity_labels, truth.relation_labels, topic=truth.topic)
    write_dataset(ds, tmp_path / "a")
    write_dataset(ds, tmp_path / "b")
    for p in (tmp_path / "a").iterdir():
        assert p.read_bytes() == (tmp_path / "b" / p.name).read_bytes()


def test_synthetic_stats_and_distribution():
    _, truth = generate_dump(SynthSpec(seed=11, n_instances=400, n_offtopic=300, n_properties=8))
    ds = make(sorted(truth.nodes), sorted(truth.edges | truth.attributes),
              truth.entity_labels, truth.relation_labels)
    assert compute_stats(ds).as_dict() == truth.stats
    assert edge_type_distribution(ds) == truth.edge_distribution()
    assert sum(c for _, c in edge_type_distribution(ds)) == len(truth.edges)


def test_round_trip(tmp_path):
    ds = make([5, 6], [(5, 1, 6), (5, 1, 100), (6, 2, 3)], topic=EntityId(9), topic_name="t")
    write_dataset(ds, tmp_path)
    back = read_dataset(tmp_path)
    for name in ("node_ids", "entity_ids", "relation_ids", "edges", "attributes"):
        assert np.array_equal(getattr(back, name), getattr(ds, name))
    assert back.entity_labels == ds.entity_labels and back.relation_labels == ds.relation_labels
    assert back.topic == 9 and back.topic_name == "t"


@pytest.mark.parametrize("name,content,lineno", [
    ("edges.txt", "headEntity\ttailEntity\trelation\n0\t1\n", 2),
    ("edges.txt", "headEntity\ttailEntity\trelation\n0\tx\t0\n", 2),
    ("edges.txt", "headEntity\ttailEntity\trelation\n0\t99\t0\n", 2),
    ("entities.txt", "bad header\n", 1),
    ("relations.txt", "relationID\twikidataID\tlabel\n1\tP1\tr1\n", 2),
])
def test_reader_rejects_malformed(tmp_path, name, content, lineno):
    write_dataset(make([5, 6], [(5, 1, 6)]), tmp_path)
    (tmp_path / name).write_text(content)
    with pytest.raises(DatasetFormatError) as info:
        read_dataset(tmp_path)
    assert info.value.lineno == lineno


facts_strategy = st.lists(
    st.tuples(st.integers(1, 30), st.integers(1, 6), st.integers(1, 40)), max_size=60)


@settings(max_examples=80, deadline=None)
@given(nodes=st.sets(st.integers(1, 30), max_size=20), facts=facts_strategy)
def test_partition_and_integrity(nodes, facts):
    facts = [f for f in facts if f[0] in nodes]
    ds = make(sorted(nodes), facts)
    node_set = set(nodes)
    edges, attrs = ds.id_facts("edges"), ds.id_facts("attributes")
    assert edges | attrs == set(facts) and not edges & attrs
    assert all(t in node_set for _, _, t in edges)
    assert all(t not in node_set for _, _, t in attrs)
    n = len(nodes)
    assert ds.edges.size == 0 or ds.edges[:, :2].max() < n
    assert ds.attributes.size == 0 or ds.attributes[:, 1].min() >= n
    assert ds.entity_ids.tolist()[:n] == sorted(nodes)
    assert ds.entity_ids.tolist()[n:] == sorted({t for _, _, t in attrs})
    assert compute_stats(ds).as_dict() == oracle_stats(node_set, edges, attrs)
