from pathlib import Path

import numpy as np
import pytest

from attrlink.candidate_gen import CandidateSet, build_index, retrieve
from attrlink.disambiguation import (
    EntityLinker,
    TypeMapper,
    disambiguate,
    evaluate_pairs,
    mention_from_text,
    read_pairs,
    split_by_product,
    train_linker,
)
from attrlink.errors import FormatError, MissingModelError, UnknownTypeError
from attrlink.kg_store import AttributeEntity, Catalog, load_catalog

LONG = Catalog.from_records([(":long", "long", "Length"), (":long (sleeve)", "long", "Sleeve Length")])


@pytest.fixture(scope="module")
def dress():
    here = Path(__file__).parent / "fixtures"
    return load_catalog(here / "dress_catalog.tsv"), read_pairs(here / "dress_pairs.jsonl")


@pytest.fixture(scope="module")
def rf_linker(dress):
    catalog, pairs = dress
    return train_linker("rf", pairs, catalog, params={"n_trees": 20})


def cands(catalog, surface, mtype):
    return retrieve(mention_from_text(surface, mtype), build_index(catalog))


def test_type_mapper_picks_sleeve_length():
    c = cands(LONG, "long", "sleeve_type")
    assert {e.id for e in c.entities} == {":long", ":long (sleeve)"}
    d = disambiguate(c, "exact", TypeMapper.default())
    assert (d.outcome, d.score) == (":long (sleeve)", 1.0)


def test_whites_exact(whites_catalog):
    assert disambiguate(cands(whites_catalog, "white", "color"), "exact").outcome == ":white"


def test_empty_candidates_nil():
    empty = CandidateSet(mention_from_text("x", "color"), [])
    for model in ("exact", "sub"):
        assert disambiguate(empty, model).is_nil


def test_rules_respect_mapper(whites_catalog):
    mapper = TypeMapper.from_dict({"color": ["Material"]})
    d = disambiguate(cands(whites_catalog, "white gold", "color"), "sub", mapper)
    assert d.outcome == ":white gold"
    assert disambiguate(cands(whites_catalog, "white", "color"), "exact", mapper).is_nil
    assert disambiguate(cands(whites_catalog, "white", "hem"), "sub").is_nil


def test_sub_links_broader_entity(whites_catalog):
    assert disambiguate(cands(whites_catalog, "bright white", "color"), "sub").outcome == ":white"
    assert disambiguate(cands(whites_catalog, "bright white", "color"), "exact").is_nil


def test_ml_needs_linker(whites_catalog, rf_linker):
    c = cands(whites_catalog, "white", "color")
    with pytest.raises(MissingModelError):
        disambiguate(c, "rf")
    with pytest.raises(MissingModelError):
        disambiguate(c, "logreg", linker=rf_linker)


def test_ml_links_top_above_threshold(dress, rf_linker):
    catalog, _ = dress
    c = cands(catalog, "fitted waist", "shape")
    assert disambiguate(c, "rf", linker=rf_linker).is_nil
    c = cands(catalog, "navy", "color")
    d = disambiguate(c, "rf", linker=rf_linker)
    assert d.outcome == ":navy" and d.score > rf_linker.threshold


def test_ml_ties_go_to_smaller_id(rf_linker):
    twins = Catalog.from_records([(":b-pink", "pink", "Color"), (":a-pink", "pink", "Color")])
    c = cands(twins, "pink", "color")
    scores = rf_linker.score(c.mention, c.entities)
    assert scores[0] == scores[1]
    rf_linker.classifier.threshold, saved = -1.0, rf_linker.classifier.threshold
    try:
        assert disambiguate(c, "rf", linker=rf_linker).outcome == ":a-pink"
    finally:
        rf_linker.classifier.threshold = saved


def test_threshold_drives_nil(dress, rf_linker):
    catalog, _ = dress
    c = cands(catalog, "navy", "color")
    top = disambiguate(c, "rf", linker=rf_linker).score
    rf_linker.classifier.threshold, saved = top, rf_linker.classifier.threshold
    try:
        assert disambiguate(c, "rf", linker=rf_linker).is_nil
    finally:
        rf_linker.classifier.threshold = saved


@pytest.mark.parametrize("kind", ["logreg", "svc", "rf"])
def test_train_save_load(tmp_path, dress, kind):
    catalog, pairs = dress
    linker = train_linker(kind, pairs, catalog, params={"n_trees": 10} if kind == "rf" else None,
                          entities_path="cat.tsv")
    linker.save(tmp_path / "m.json")
    back = EntityLinker.load(tmp_path / "m.json")
    assert back.kind == kind and back.threshold == linker.threshold
    assert back.entities_path == "cat.tsv"
    m = mention_from_text("bright pink", "color")
    ents = catalog.entities[:6]
    assert np.array_equal(back.score(m, ents), linker.score(m, ents))
    prf = evaluate_pairs(linker, pairs, catalog)
    assert 0.0 <= prf.precision <= 1.0


def test_bad_model_file(tmp_path):
    path = tmp_path / "m.json"
    path.write_text('{"format": "something-else"}', encoding="utf-8")
    with pytest.raises(FormatError):
        EntityLinker.load(path)


def test_rule_evaluation(dress):
    catalog, pairs = dress
    exact = evaluate_pairs("exact", pairs, catalog)
    sub = evaluate_pairs("sub", pairs, catalog)
    assert exact.precision == 1.0
    assert sub.recall >= exact.recall
    with pytest.raises(MissingModelError):
        evaluate_pairs("rf", pairs, catalog)


def test_split_by_product_keeps_groups_apart(dress):
    _, pairs = dress
    train, test = split_by_product(pairs, 0.1, seed=0)
    assert len(train) + len(test) == len(pairs)
    assert not {p.product_id for p in train} & {p.product_id for p in test}
    assert test
    assert split_by_product(pairs, 0.1, seed=0) == (train, test)


def test_read_pairs_rejects_bad_labels(tmp_path):
    path = tmp_path / "p.jsonl"
    path.write_text('{"product_id": "p", "mention": "x", "mention_type": "color", "entity_id": ":x", "label": 2}\n')
    with pytest.raises(FormatError):
        read_pairs(path)
    path.write_text('{"product_id": "p"}\n')
    with pytest.raises(FormatError):
        read_pairs(path)


def test_rule_links_only_allowed_types(dress):
    catalog, pairs = dress
    mapper = TypeMapper.default()
    index = build_index(catalog)
    for p in pairs:
        for model in ("exact", "sub"):
            c = retrieve(p.as_mention(), index)
            d = disambiguate(c, model, mapper)
            if not d.is_nil:
                assert mapper.allows(p.mention_type, catalog[d.outcome].attr_type)


def test_entity_type_outside_inventory_is_rejected(rf_linker):
    stray = AttributeEntity.make(":x", "pink", "Toe Shape")
    with pytest.raises(UnknownTypeError):
        rf_linker.score(mention_from_text("pink", "color"), [stray])
