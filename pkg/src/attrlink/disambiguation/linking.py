"""Link decisions, trained linker bundles and the labeled-pair file."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from sklearn.model_selection import GroupShuffleSplit

from ..candidate_gen import CandidateSet
from ..errors import DegenerateDatasetError, FormatError, MissingModelError
from ..kg_store import Catalog
from ..ner import DEFAULT_MENTION_TYPES, Mention
from ..text_norm import DEFAULT_CONFIG, NormConfig, normalize_token, tokenize
from .calibration import binary_prf, calibrate_threshold, prf_at_threshold, strict_threshold
from .classifiers import MODELS
from .features import PairFeaturizer
from .rules import TypeMapper, exact_match, sub_match
from .similarity import embedder_from_config

RULE_MODELS = ("exact", "sub")
ML_MODELS = tuple(MODELS)
LINKER_FORMAT = "attrlink.el-model"
LINKER_VERSION = 1


@dataclass(frozen=True)
class LinkDecision:
    mention: Mention
    outcome: str | None  # entity id, or None for NIL
    score: float
    model: str

    @property
    def is_nil(self):
        return self.outcome is None


class EntityLinker:
    """A featurizer plus a fitted classifier with its linking threshold."""

    def __init__(self, featurizer: PairFeaturizer, classifier, entities_path=None):
        self.featurizer = featurizer
        self.classifier = classifier
        self.entities_path = entities_path

    @property
    def kind(self):
        return self.classifier.kind

    @property
    def threshold(self):
        return self.classifier.threshold

    def score(self, mention, entities) -> np.ndarray:
        if not entities:
            return np.zeros(0)
        X = self.featurizer.transform([(mention, e) for e in entities])
        return self.classifier.decision_scores(X)

    def save(self, path):
        f = self.featurizer
        payload = {
            "format": LINKER_FORMAT,
            "version": LINKER_VERSION,
            "model": self.kind,
            "params": self.classifier.get_params(),
            "threshold": self.classifier.threshold,
            "state": self.classifier.get_state(),
            "feature_layout": f.layout_,
            "mention_types": f.mention_types_,
            "entity_types": f.entity_types_,
            "embedding": f.embedder_.to_config(),
            "norm_config": asdict(f.norm_config),
            "entities_path": str(self.entities_path) if self.entities_path else None,
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False, indent=1)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "EntityLinker":
        with open(path, encoding="utf-8") as fh:
            try:
                payload = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}: {exc}") from None
        if payload.get("format") != LINKER_FORMAT or payload.get("version") != LINKER_VERSION:
            raise FormatError(f"{path}: not a version-{LINKER_VERSION} linker model")
        if payload["model"] not in MODELS:
            raise FormatError(f"{path}: unknown model kind {payload['model']!r}")
        cfg = NormConfig.from_dict(payload["norm_config"])
        embedder = embedder_from_config(payload["embedding"], lambda t: normalize_token(t, cfg))
        featurizer = PairFeaturizer(payload["mention_types"], payload["entity_types"], embedder, cfg).fit()
        if featurizer.layout_ != payload["feature_layout"]:
            raise FormatError(f"{path}: stored feature layout does not match the rebuilt one")
        params = dict(payload["params"], threshold=payload["threshold"])
        clf = MODELS[payload["model"]](**params).set_state(payload["state"])
        return cls(featurizer, clf, payload.get("entities_path"))


def disambiguate(cands: CandidateSet, model: str, mapper: TypeMapper | None = None,
                 linker: EntityLinker | None = None, cfg: NormConfig = DEFAULT_CONFIG) -> LinkDecision:
    """Pick at most one entity for the mention behind ``cands``.

    Rule models keep candidates allowed by ``mapper`` that pass the rule
    and link the best-ranked survivor. ML models ignore the mapper, score
    every candidate and link the top one if its score beats the threshold.
    """
    mention = cands.mention
    if model in RULE_MODELS:
        mapper = mapper if mapper is not None else TypeMapper.default()
        rule = exact_match if model == "exact" else sub_match
        for entity, _ in cands.candidates:
            if mapper.allows(mention.mtype, entity.attr_type) and rule(mention, entity, cfg):
                return LinkDecision(mention, entity.id, 1.0, model)
        return LinkDecision(mention, None, 0.0, model)

    if model not in ML_MODELS:
        raise ValueError(f"unknown disambiguation model {model!r}")
    if linker is None or linker.kind != model:
        raise MissingModelError(f"model {model!r} needs a trained linker")
    if not cands.candidates:
        return LinkDecision(mention, None, 0.0, model)
    entities = cands.entities
    scores = linker.score(mention, entities)
    best = min(range(len(entities)), key=lambda i: (-scores[i], entities[i].id))
    top = float(scores[best])
    outcome = entities[best].id if top > linker.threshold else None
    return LinkDecision(mention, outcome, top, model)


# -- labeled pairs ------------------------------------------------------------

@dataclass(frozen=True)
class ElLabeledPair:
    product_id: str
    mention: str
    mention_type: str
    entity_id: str
    label: int

    def as_mention(self) -> Mention:
        return mention_from_text(self.mention, self.mention_type)


def mention_from_text(text: str, mtype: str) -> Mention:
    toks = tokenize(text)
    return Mention(text, mtype, (0, max(len(toks), 1)), (0, len(text)))


def read_pairs(path) -> list[ElLabeledPair]:
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                pair = ElLabeledPair(
                    str(obj["product_id"]), obj["mention"], obj["mention_type"], obj["entity_id"], int(obj["label"])
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise FormatError(f"{path}:{lineno}: bad labeled pair ({exc})") from None
            if pair.label not in (0, 1):
                raise FormatError(f"{path}:{lineno}: label must be 0 or 1")
            pairs.append(pair)
    return pairs


def write_pairs(pairs: Sequence[ElLabeledPair], path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for p in pairs:
            fh.write(json.dumps(asdict(p), ensure_ascii=False) + "\n")


def split_by_product(pairs: Sequence[ElLabeledPair], test_fraction=0.1, seed=0):
    """Hold out whole products so no product contributes to both sides."""
    groups = [p.product_id for p in pairs]
    splitter = GroupShuffleSplit(n_splits=1, test_size=test_fraction, random_state=seed)
    train_idx, test_idx = next(splitter.split(np.zeros(len(pairs)), groups=groups))
    return [pairs[i] for i in sorted(train_idx)], [pairs[i] for i in sorted(test_idx)]


def pair_matrix(pairs: Sequence[ElLabeledPair], catalog: Catalog, featurizer: PairFeaturizer):
    X = featurizer.transform([(p.as_mention(), catalog[p.entity_id]) for p in pairs])
    y = np.array([p.label for p in pairs], dtype=int)
    return X, y


def train_linker(kind: str, pairs: Sequence[ElLabeledPair], catalog: Catalog, *,
                 mention_types=DEFAULT_MENTION_TYPES, embedder=None, cfg: NormConfig = DEFAULT_CONFIG,
                 min_precision=0.9, folds=5, seed=0, params=None, entities_path=None) -> EntityLinker:
    """Fit a classifier on labeled pairs and calibrate its threshold by CV."""
    if kind not in MODELS:
        raise ValueError(f"unknown model kind {kind!r}; choose from {sorted(MODELS)}")
    featurizer = PairFeaturizer(list(mention_types), catalog.attr_types, embedder, cfg).fit()
    X, y = pair_matrix(pairs, catalog, featurizer)
    if len(set(y.tolist())) < 2:
        raise DegenerateDatasetError("labeled pairs must contain both classes")
    clf = MODELS[kind](seed=seed, **(params or {}))
    cutoff = calibrate_threshold(clf, X, y, k=folds, min_precision=min_precision, seed=seed)
    clf.set_params(threshold=strict_threshold(cutoff))
    clf.fit(X, y)
    return EntityLinker(featurizer, clf, entities_path)


def rule_predictions(kind: str, pairs: Sequence[ElLabeledPair], catalog: Catalog,
                     mapper: TypeMapper, cfg: NormConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Pair-level 0/1 predictions of a rule model (mapper filter plus rule)."""
    rule = exact_match if kind == "exact" else sub_match
    out = []
    for p in pairs:
        e = catalog[p.entity_id]
        out.append(int(mapper.allows(p.mention_type, e.attr_type) and rule(p.mention, e, cfg)))
    return np.array(out, dtype=int)


def evaluate_pairs(model, pairs: Sequence[ElLabeledPair], catalog: Catalog,
                   mapper: TypeMapper | None = None, cfg: NormConfig = DEFAULT_CONFIG):
    """Binary precision/recall/F1 on labeled pairs for a rule name or a trained linker."""
    y = np.array([p.label for p in pairs], dtype=int)
    if isinstance(model, str):
        if model not in RULE_MODELS:
            raise MissingModelError(f"model {model!r} needs a trained linker")
        pred = rule_predictions(model, pairs, catalog, mapper or TypeMapper.default(), cfg)
        return binary_prf(y, pred)
    X, _ = pair_matrix(pairs, catalog, model.featurizer)
    return prf_at_threshold(model.classifier.decision_scores(X), y, model.threshold)
