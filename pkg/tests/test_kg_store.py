import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from attrlink.disambiguation import LinkDecision
from attrlink.errors import DuplicateIdError, FormatError, UnknownEntityError
from attrlink.kg_store import (
    Catalog,
    ProductRecord,
    Triple,
    emit_triples,
    load_catalog,
    load_products,
    read_triples,
    save_catalog,
    write_triples,
)
from attrlink.ner import Mention

PROD = ProductRecord(":prod1", "PVC boots with a round toe")
CATALOG = Catalog.from_records([(":pvc", "PVC", "Material"), (":round", "round", "Toe Shape")])


def link(outcome, surface="x"):
    return LinkDecision(Mention(surface, "material", (0, 1), (0, len(surface))), outcome, 1.0, "exact")


def test_tsv_line(tmp_path):
    path = tmp_path / "cat.tsv"
    path.write_text("# a comment\n:pvc\tPVC\tMaterial\n", encoding="utf-8")
    cat = load_catalog(path)
    e = cat[":pvc"]
    assert (e.id, e.label, e.attr_type, e.norm_tokens) == (":pvc", "PVC", "Material", ("pvc",))
    assert cat.by_type == {"Material": [e]}


def test_empty_file(tmp_path):
    path = tmp_path / "cat.tsv"
    path.write_text("", encoding="utf-8")
    assert len(load_catalog(path)) == 0


def test_duplicate_ids(tmp_path):
    path = tmp_path / "cat.tsv"
    path.write_text(":pvc\tPVC\tMaterial\n:pvc\tpvc\tMaterial\n", encoding="utf-8")
    with pytest.raises(DuplicateIdError):
        load_catalog(path)


def test_bad_rows(tmp_path):
    tsv = tmp_path / "bad.tsv"
    tsv.write_text(":pvc\tPVC\n", encoding="utf-8")
    with pytest.raises(FormatError):
        load_catalog(tsv)
    js = tmp_path / "bad.jsonl"
    js.write_text('{"id": ":pvc", "label": "PVC"}\n', encoding="utf-8")
    with pytest.raises(FormatError):
        load_catalog(js)
    js.write_text("{not json\n", encoding="utf-8")
    with pytest.raises(FormatError):
        load_catalog(js)


def test_unknown_entity():
    with pytest.raises(UnknownEntityError):
        CATALOG[":nope"]


_field = st.text(alphabet=st.characters(blacklist_categories=("Cs", "Cc")), min_size=1, max_size=12)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(_field, _field, _field), max_size=8, unique_by=lambda r: r[0]))
def test_round_trip_both_formats(tmp_path_factory, rows):
    tmp = tmp_path_factory.mktemp("rt")
    rows = [r for r in rows if not r[0].startswith("#") and r[0].strip()]
    cat = Catalog.from_records(rows)
    for name in ("c.tsv", "c.jsonl"):
        save_catalog(cat, tmp / name)
        back = load_catalog(tmp / name)
        assert [(e.id, e.label, e.attr_type) for e in back.entities] == rows


def test_tsv_rejects_tabs_in_labels(tmp_path):
    cat = Catalog.from_records([(":x", "a\tb", "T")])
    with pytest.raises(FormatError):
        save_catalog(cat, tmp_path / "c.tsv")
    save_catalog(cat, tmp_path / "c.jsonl")
    assert load_catalog(tmp_path / "c.jsonl")[":x"].label == "a\tb"


def test_products(tmp_path):
    path = tmp_path / "p.jsonl"
    path.write_text('{"id": ":p1", "description": ""}\n{"id": ":p2", "description": "PVC"}\n', encoding="utf-8")
    assert load_products(path) == [ProductRecord(":p1", ""), ProductRecord(":p2", "PVC")]
    path.write_text('{"id": ":p1", "description": ""}\n{"id": ":p1", "description": "x"}\n', encoding="utf-8")
    with pytest.raises(DuplicateIdError):
        load_products(path)


def test_emit_triples():
    assert emit_triples(PROD, [link(":pvc", "PVC")], CATALOG) == [Triple(":prod1", ":hasAttribute", ":pvc")]
    assert emit_triples(PROD, [link(None), link(None)], CATALOG) == []
    assert emit_triples(PROD, [link(":round"), link(":round")], CATALOG) == [
        Triple(":prod1", ":hasAttribute", ":round")
    ]
    with pytest.raises(UnknownEntityError):
        emit_triples(PROD, [link(":nope")], CATALOG)


def test_emit_keeps_order_and_predicate():
    out = emit_triples(PROD, [link(":round"), link(None), link(":pvc")], CATALOG, predicate=":attr")
    assert [t.object for t in out] == [":round", ":pvc"]
    assert {t.predicate for t in out} == {":attr"}


def test_write_triples(tmp_path):
    path = tmp_path / "t.nt"
    write_triples([Triple(":p1", ":hasAttribute", ":pvc")], path)
    assert path.read_text(encoding="utf-8") == "<:p1> <:hasAttribute> <:pvc> .\n"
    write_triples([], path)
    assert path.read_text(encoding="utf-8") == ""
    ts = [Triple(":p1", ":hasAttribute", o) for o in (":c", ":a", ":white gold")]
    write_triples(ts, path)
    assert path.read_text(encoding="utf-8").count("\n") == 3
    assert read_triples(path) == ts


def test_triple_fields_non_empty():
    with pytest.raises(ValueError):
        Triple(":p1", "", ":pvc")
