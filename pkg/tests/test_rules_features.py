import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from attrlink.disambiguation import (
    CharTrigramEmbedder,
    PairFeaturizer,
    TypeMapper,
    WordVectorEmbedder,
    cosine,
    exact_match,
    featurize,
    jaro,
    jaro_winkler,
    mention_from_text,
    sub_match,
)
from attrlink.errors import DimensionMismatchError, UnknownTypeError
from attrlink.kg_store import AttributeEntity

# (mention, entity label, exact, sub)
MATCH_ROWS = [
    ("bright pink", "bright pink", True, True),
    ("bright pink", "pink", False, True),
    ("pink", "bright pink", False, False),
    ("bright pink", "light pink", False, False),
]


def ent(label, attr_type="Color", id=None):
    return AttributeEntity.make(id or f":{label}", label, attr_type)


@pytest.mark.parametrize("mention,label,exact,sub", MATCH_ROWS)
def test_match_rows(mention, label, exact, sub):
    m = mention_from_text(mention, "color")
    assert exact_match(m, ent(label)) is exact
    assert sub_match(m, ent(label)) is sub


def test_empty_mention_never_matches():
    m = mention_from_text("", "color")
    assert not exact_match(m, ent("pink"))
    assert not sub_match(m, ent("pink"))


def test_sub_match_is_contiguous():
    m = mention_from_text("bright hot pink", "color")
    assert not sub_match(m, ent("bright pink"))
    assert sub_match(m, ent("hot pink"))


_words = st.lists(st.sampled_from(["pink", "bright", "light", "hot", "round", "toe"]), max_size=4)


@settings(max_examples=300, deadline=None)
@given(_words, _words)
def test_exact_implies_sub(m_words, e_words):
    m = mention_from_text(" ".join(m_words), "color")
    e = ent(" ".join(e_words) or "x")
    if exact_match(m, e):
        assert sub_match(m, e)


def test_type_mapper_default():
    mapper = TypeMapper.default()
    assert mapper.allows("sleeve_type", "Sleeve Length")
    assert mapper.allows("sleeve_type", "Sleeve Type")
    assert not mapper.allows("sleeve_type", "Length")
    assert mapper.allows("fastening", "Closure Type")
    assert mapper.allowed_types("toe_shape") == frozenset()
    assert TypeMapper.from_dict(mapper.to_dict()).to_dict() == mapper.to_dict()


def jaro_oracle(a, b):
    """Direct transcription of the Jaro definition."""
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    window = max(max(len(a), len(b)) // 2 - 1, 0)
    used = [False] * len(b)
    a_matched = []
    for i, ca in enumerate(a):
        for j in range(max(0, i - window), min(len(b), i + window + 1)):
            if not used[j] and b[j] == ca:
                used[j] = True
                a_matched.append(ca)
                break
    b_matched = [b[j] for j in range(len(b)) if used[j]]
    m = len(a_matched)
    if m == 0:
        return 0.0
    t = sum(x != y for x, y in zip(a_matched, b_matched)) / 2
    return (m / len(a) + m / len(b) + (m - t) / m) / 3


def jw_oracle(a, b):
    j = jaro_oracle(a, b)
    prefix = 0
    for x, y in zip(a[:4], b[:4]):
        if x != y:
            break
        prefix += 1
    return j + prefix * 0.1 * (1 - j)


def test_jaro_winkler_reference_values():
    assert jaro_winkler("pink", "pink") == 1.0
    assert jaro_winkler("abc", "xyz") == 0.0
    assert jaro_winkler("martha", "marhta") == pytest.approx(0.9611, abs=5e-5)
    assert jaro("martha", "marhta") == pytest.approx(17 / 18)
    assert jaro_winkler("dwayne", "duane") == pytest.approx(0.84, abs=5e-3)
    assert jaro_winkler("dixon", "dicksonx") == pytest.approx(0.8133, abs=5e-4)
    assert jaro_winkler("", "") == 1.0
    assert jaro_winkler("", "a") == 0.0


_s = st.text("abcde", max_size=8)


@settings(max_examples=400, deadline=None)
@given(_s, _s)
def test_jaro_winkler_properties(a, b):
    v = jaro_winkler(a, b)
    assert v == pytest.approx(jw_oracle(a, b), abs=1e-12)
    assert v == pytest.approx(jaro_winkler(b, a), abs=1e-12)
    assert 0.0 <= v <= 1.0
    assert (v == 1.0) == (a == b)


def test_cosine():
    v = np.array([1.0, 2.0, 3.0])
    assert cosine(v, v) == pytest.approx(1.0)
    assert cosine(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0
    assert cosine(np.zeros(3), v) == 0.0
    with pytest.raises(DimensionMismatchError):
        cosine(np.ones(2), np.ones(3))


def test_trigram_embedder():
    emb = CharTrigramEmbedder(dim=64)
    v = emb.token_vector("round")
    assert v.shape == (64,) and np.linalg.norm(v) == pytest.approx(1.0)
    assert np.array_equal(emb.embed(["round"]), CharTrigramEmbedder(dim=64).embed(["round"]))
    assert emb.embed([]).shape == (64,)


def test_word_vector_embedder(tmp_path):
    path = tmp_path / "vec.txt"
    path.write_text("pink 1 0\nred 0.9 0.1\nhem 0 1\n", encoding="utf-8")
    emb = WordVectorEmbedder.load(path)
    assert cosine(emb.embed(["pink"]), emb.embed(["red"])) > cosine(emb.embed(["pink"]), emb.embed(["hem"]))
    assert np.array_equal(emb.embed(["unknown"]), np.zeros(2))


MT = ["color", "material", "shape"]
ET = ["Color", "Material", "Shape"]


def test_featurize_examples():
    emb = CharTrigramEmbedder()
    f = featurize(mention_from_text("pvc", "material"), ent("PVC", "Material"), emb, mention_types=MT, entity_types=ET)
    assert (f.jw, f.exact, f.sub) == (1.0, 1, 1)
    assert f.mention_type == (0, 1, 0) and f.entity_type == (0, 1, 0)

    f = featurize(mention_from_text("bright pink", "color"), ent("pink"), emb, mention_types=MT, entity_types=ET)
    assert (f.exact, f.sub) == (0, 1)

    rt = mention_from_text("round toe", "shape")
    near = featurize(rt, ent("round", "Shape"), emb, mention_types=MT, entity_types=ET).cos
    far = featurize(rt, ent("zipped", "Shape"), emb, mention_types=MT, entity_types=ET).cos
    assert near > far


def test_featurize_unknown_type():
    with pytest.raises(UnknownTypeError):
        featurize(mention_from_text("x", "hem"), ent("x"), CharTrigramEmbedder(), mention_types=MT, entity_types=ET)


@settings(max_examples=100, deadline=None)
@given(_words, _words, st.sampled_from(MT), st.sampled_from(ET))
def test_feature_vector_invariants(m_words, e_words, mt, et):
    f = featurize(mention_from_text(" ".join(m_words), mt), ent(" ".join(e_words) or "x", et),
                  CharTrigramEmbedder(), mention_types=MT, entity_types=ET)
    assert sum(f.mention_type) == 1 and sum(f.entity_type) == 1
    assert 0.0 <= f.jw <= 1.0 and -1.0 - 1e-12 <= f.cos <= 1.0 + 1e-12
    if f.exact:
        assert f.sub


def test_pair_featurizer_layout():
    fz = PairFeaturizer(MT, ET).fit()
    assert fz.layout_ == ["jw", "cos", "exact", "sub", "mention_type=color", "mention_type=material",
                          "mention_type=shape", "entity_type=Color", "entity_type=Material", "entity_type=Shape"]
    X = fz.transform([(mention_from_text("pink", "color"), ent("pink"))])
    assert X.shape == (1, 10)
    assert fz.transform([]).shape == (0, 10)
