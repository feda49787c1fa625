"""Mention/candidate pair features."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ..errors import UnknownTypeError
from ..text_norm import DEFAULT_CONFIG, NormConfig, normalize_phrase
from .rules import contains_run
from .similarity import CharTrigramEmbedder, cosine, jaro_winkler


@dataclass(frozen=True)
class FeatureVector:
    jw: float
    cos: float
    exact: int
    sub: int
    mention_type: tuple[int, ...]
    entity_type: tuple[int, ...]

    def to_array(self) -> np.ndarray:
        return np.array([self.jw, self.cos, self.exact, self.sub, *self.mention_type, *self.entity_type], dtype=float)


def _one_hot(value, inventory, kind):
    try:
        pos = inventory.index(value)
    except ValueError:
        raise UnknownTypeError(f"{kind} type {value!r} is not in the configured inventory") from None
    return tuple(int(i == pos) for i in range(len(inventory)))


def featurize(mention, entity, emb, cfg: NormConfig = DEFAULT_CONFIG, *,
              mention_types, entity_types) -> FeatureVector:
    m_tokens = tuple(normalize_phrase(mention.surface, cfg))
    e_tokens = tuple(entity.norm_tokens)
    exact = int(bool(m_tokens) and m_tokens == e_tokens)
    sub = int(contains_run(m_tokens, e_tokens))
    return FeatureVector(
        jw=jaro_winkler(" ".join(m_tokens), " ".join(e_tokens)),
        cos=cosine(emb.embed(m_tokens), emb.embed(e_tokens)),
        exact=exact,
        sub=sub,
        mention_type=_one_hot(mention.mtype, list(mention_types), "mention"),
        entity_type=_one_hot(entity.attr_type, list(entity_types), "entity"),
    )


class PairFeaturizer(BaseEstimator, TransformerMixin):
    """Turns ``(mention, entity)`` pairs into a dense feature matrix.

    Column layout: ``jw, cos, exact, sub``, then one column per mention
    type and one per entity type, in inventory order.
    """

    def __init__(self, mention_types=None, entity_types=None, embedder=None, norm_config=DEFAULT_CONFIG):
        self.mention_types = mention_types
        self.entity_types = entity_types
        self.embedder = embedder
        self.norm_config = norm_config

    def fit(self, pairs=None, y=None):
        if self.mention_types is None or self.entity_types is None:
            if pairs is None:
                raise ValueError("type inventories are needed, either as parameters or from pairs")
        self.mention_types_ = list(self.mention_types if self.mention_types is not None
                                   else sorted({m.mtype for m, _ in pairs}))
        self.entity_types_ = list(self.entity_types if self.entity_types is not None
                                  else sorted({e.attr_type for _, e in pairs}))
        self.embedder_ = self.embedder if self.embedder is not None else CharTrigramEmbedder()
        self.layout_ = (["jw", "cos", "exact", "sub"]
                        + [f"mention_type={t}" for t in self.mention_types_]
                        + [f"entity_type={t}" for t in self.entity_types_])
        return self

    def featurize(self, mention, entity) -> FeatureVector:
        return featurize(mention, entity, self.embedder_, self.norm_config,
                         mention_types=self.mention_types_, entity_types=self.entity_types_)

    def transform(self, pairs) -> np.ndarray:
        rows = [self.featurize(m, e).to_array() for m, e in pairs]
        if not rows:
            return np.zeros((0, len(self.layout_)))
        return np.vstack(rows)
