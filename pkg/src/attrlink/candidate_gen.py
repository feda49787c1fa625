"""Candidate generation: BM25 over an inverted index of entity labels.

Query terms are expanded against the index vocabulary by normalized
Levenshtein similarity; an expanded term contributes its BM25 term score
scaled by that similarity.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, field

from .errors import EmptyCatalogError, FormatError, IndexConfigMismatchError
from .kg_store import AttributeEntity, Catalog
from .ner import Mention
from .text_norm import DEFAULT_CONFIG, NormConfig, normalize_phrase

INDEX_FORMAT = "attrlink.bm25-index"
INDEX_VERSION = 1
_EPS = 1e-12


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 1.2
    b: float = 0.75
    fuzziness: float = 0.7
    top_k: int = 20

    def __post_init__(self):
        if self.k1 < 0:
            raise ValueError("k1 must be >= 0")
        if not 0 <= self.b <= 1:
            raise ValueError("b must lie in [0, 1]")
        if not 0 <= self.fuzziness <= 1:
            raise ValueError("fuzziness must lie in [0, 1]")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")


def levenshtein(a: str, b: str, max_dist: int | None = None) -> int:
    """Edit distance; returns ``max_dist + 1`` early once the bound is exceeded."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        if max_dist is not None and min(cur) > max_dist:
            return max_dist + 1
        prev = cur
    return prev[-1]


def fuzzy_similarity(a: str, b: str) -> float:
    m = max(len(a), len(b))
    if m == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / m


@dataclass
class InvertedIndex:
    catalog: Catalog
    postings: dict[str, list[tuple[int, int]]]
    doc_len: list[int]
    doc_freq: dict[str, int]
    config_digest: str
    norm_config: NormConfig = DEFAULT_CONFIG
    _expansions: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.n_docs = len(self.doc_len)
        self.avg_doc_len = sum(self.doc_len) / self.n_docs if self.n_docs else 0.0
        self.vocab = sorted(self.postings)
        self._tf = [dict() for _ in range(self.n_docs)]
        for term, plist in self.postings.items():
            for ordinal, tf in plist:
                self._tf[ordinal][term] = tf

    def idf(self, term: str) -> float:
        df = self.doc_freq.get(term, 0)
        return math.log(1.0 + (self.n_docs - df + 0.5) / (df + 0.5))

    def tf(self, term: str, ordinal: int) -> int:
        return self._tf[ordinal].get(term, 0)

    def term_score(self, term: str, ordinal: int, params: Bm25Params) -> float:
        tf = self.tf(term, ordinal)
        if tf == 0:
            return 0.0
        norm = 1.0 - params.b + params.b * self.doc_len[ordinal] / self.avg_doc_len
        return self.idf(term) * tf * (params.k1 + 1.0) / (tf + params.k1 * norm)

    def save(self, path) -> None:
        payload = {
            "format": INDEX_FORMAT,
            "version": INDEX_VERSION,
            "norm_config": asdict(self.norm_config),
            "config_digest": self.config_digest,
            "entities": [
                {"id": e.id, "label": e.label, "attr_type": e.attr_type, "norm_tokens": list(e.norm_tokens)}
                for e in self.catalog.entities
            ],
            "doc_len": self.doc_len,
            "postings": {t: [list(p) for p in self.postings[t]] for t in self.vocab},
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "InvertedIndex":
        with open(path, encoding="utf-8") as fh:
            try:
                payload = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}: {exc}") from None
        if payload.get("format") != INDEX_FORMAT or payload.get("version") != INDEX_VERSION:
            raise FormatError(f"{path}: not a version-{INDEX_VERSION} index file")
        cfg = NormConfig.from_dict(payload["norm_config"])
        entities = [
            AttributeEntity(e["id"], e["label"], e["attr_type"], tuple(e["norm_tokens"]))
            for e in payload["entities"]
        ]
        postings = {t: [tuple(p) for p in plist] for t, plist in payload["postings"].items()}
        return cls(
            Catalog(entities, cfg),
            postings,
            list(payload["doc_len"]),
            {t: len(plist) for t, plist in postings.items()},
            payload["config_digest"],
            cfg,
        )


def build_index(catalog: Catalog, cfg: NormConfig | None = None) -> InvertedIndex:
    """Index the normalized label tokens of every catalog entity."""
    if len(catalog) == 0:
        raise EmptyCatalogError("cannot index an empty catalog")
    cfg = cfg or catalog.cfg
    if cfg != catalog.cfg:
        catalog = Catalog.from_records(((e.id, e.label, e.attr_type) for e in catalog.entities), cfg)
    postings: dict[str, list[tuple[int, int]]] = {}
    doc_len = []
    for ordinal, entity in enumerate(catalog.entities):
        doc_len.append(len(entity.norm_tokens))
        for term, tf in sorted(Counter(entity.norm_tokens).items()):
            postings.setdefault(term, []).append((ordinal, tf))
    doc_freq = {t: len(p) for t, p in postings.items()}
    return InvertedIndex(catalog, postings, doc_len, doc_freq, cfg.digest(), cfg)


def fuzzy_expand(term: str, index: InvertedIndex, fuzziness: float) -> list[tuple[str, float]]:
    """Vocabulary terms whose normalized Levenshtein similarity to ``term`` is >= ``fuzziness``."""
    key = (term, fuzziness)
    cached = index._expansions.get(key)
    if cached is not None:
        return list(cached)
    out = []
    for v in index.vocab:
        m = max(len(term), len(v))
        if m == 0:
            continue
        budget = (1.0 - fuzziness) * m
        if abs(len(term) - len(v)) > budget + _EPS:
            continue
        d = levenshtein(term, v, max_dist=int(math.floor(budget + _EPS)))
        sim = 1.0 - d / m
        if sim >= fuzziness - _EPS:
            out.append((v, sim))
    out.sort(key=lambda p: (-p[1], p[0]))
    index._expansions[key] = tuple(out)
    return out


def bm25_score(query_terms, ordinal: int, index: InvertedIndex, params: Bm25Params = Bm25Params()) -> float:
    """Sum of BM25 term scores; items may be plain terms or ``(term, weight)`` pairs."""
    total = 0.0
    for q in query_terms:
        term, weight = (q, 1.0) if isinstance(q, str) else q
        total += weight * index.term_score(term, ordinal, params)
    return total


@dataclass
class CandidateSet:
    mention: Mention
    candidates: list[tuple[AttributeEntity, float]] = field(default_factory=list)

    def __len__(self):
        return len(self.candidates)

    @property
    def entities(self) -> list[AttributeEntity]:
        return [e for e, _ in self.candidates]


def expand_query(terms, index: InvertedIndex, fuzziness: float) -> list[tuple[str, float]]:
    expanded = []
    for q in terms:
        expanded.extend(fuzzy_expand(q, index, fuzziness))
    return expanded


def retrieve(mention: Mention, index: InvertedIndex, params: Bm25Params = Bm25Params(),
             cfg: NormConfig = DEFAULT_CONFIG) -> CandidateSet:
    if cfg.digest() != index.config_digest:
        raise IndexConfigMismatchError(
            f"index was built with normalization {index.config_digest}, query uses {cfg.digest()}"
        )
    weighted = expand_query(normalize_phrase(mention.surface, cfg), index, params.fuzziness)
    hits = set()
    for term, _ in weighted:
        hits.update(o for o, _ in index.postings[term])
    scored = [(index.catalog.entities[o], bm25_score(weighted, o, index, params)) for o in hits]
    scored.sort(key=lambda p: (-p[1], p[0].id))
    return CandidateSet(mention, scored[: params.top_k])
