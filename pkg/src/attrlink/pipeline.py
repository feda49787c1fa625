"""End-to-end enrichment: tag, retrieve, disambiguate, emit triples, report."""
from __future__ import annotations

import json
import logging
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from .candidate_gen import Bm25Params, CandidateSet, InvertedIndex, retrieve
from .disambiguation import EntityLinker, LinkDecision, TypeMapper, disambiguate, exact_match
from .kg_store import DEFAULT_PREDICATE, ProductRecord, Triple, emit_triples, write_triples
from .ner import Mention, Tagger, TaggedSentence, decode_bio
from .text_norm import DEFAULT_CONFIG, NormConfig, normalize_phrase, surface_key, tokenize

log = logging.getLogger(__name__)


@dataclass
class EnrichmentResult:
    product_id: str
    mentions: list[Mention]
    candidate_counts: list[int]
    decisions: list[LinkDecision]
    triples: list[Triple]
    exact: list[bool] = field(default_factory=list)

    @property
    def n_linked(self):
        return sum(not d.is_nil for d in self.decisions)

    @property
    def n_unlinked(self):
        return sum(d.is_nil for d in self.decisions)

    def to_json(self) -> dict:
        return {
            "product_id": self.product_id,
            "mentions": [
                {
                    "surface": m.surface,
                    "type": m.mtype,
                    "tok_span": list(m.tok_span),
                    "char_span": list(m.char_span),
                    "n_candidates": n,
                    "outcome": d.outcome,
                    "score": d.score,
                    "model": d.model,
                    "exact": x,
                }
                for m, n, d, x in zip(self.mentions, self.candidate_counts, self.decisions, self.exact)
            ],
            "triples": [[t.subject, t.predicate, t.object] for t in self.triples],
        }

    @classmethod
    def from_json(cls, obj) -> "EnrichmentResult":
        mentions, counts, decisions, exact = [], [], [], []
        for row in obj["mentions"]:
            m = Mention(row["surface"], row["type"], tuple(row["tok_span"]), tuple(row["char_span"]))
            mentions.append(m)
            counts.append(row["n_candidates"])
            decisions.append(LinkDecision(m, row["outcome"], row["score"], row["model"]))
            exact.append(bool(row["exact"]))
        triples = [Triple(*t) for t in obj["triples"]]
        return cls(obj["product_id"], mentions, counts, decisions, triples, exact)


@dataclass
class EnrichmentStats:
    n_products: int = 0
    avg_mentions_per_product: float = 0.0
    avg_candidates_per_mention: float = 0.0
    avg_linked_per_product: float = 0.0
    avg_unlinked_per_product: float = 0.0
    pct_exact_links: float = 0.0
    top_unlinked: list = field(default_factory=list)

    def to_json(self) -> dict:
        d = asdict(self)
        d["top_unlinked"] = [
            {"mention": s, "mention_type": t, "n_products": n} for s, t, n in self.top_unlinked
        ]
        return d


@dataclass
class Enricher:
    """The loaded components of one enrichment run."""

    tagger: Tagger
    index: InvertedIndex
    model: str = "exact"
    mapper: TypeMapper | None = None
    linker: EntityLinker | None = None
    cfg: NormConfig = DEFAULT_CONFIG
    params: Bm25Params = field(default_factory=Bm25Params)
    predicate: str = DEFAULT_PREDICATE

    def __post_init__(self):
        if self.mapper is None:
            self.mapper = TypeMapper.default()

    def link(self, mention: Mention) -> tuple[int, LinkDecision]:
        if not normalize_phrase(mention.surface, self.cfg):
            return 0, LinkDecision(mention, None, 0.0, self.model)
        cands: CandidateSet = retrieve(mention, self.index, self.params, self.cfg)
        return len(cands), disambiguate(cands, self.model, self.mapper, self.linker, self.cfg)

    def enrich(self, product: ProductRecord) -> EnrichmentResult:
        tokens = tokenize(product.description)
        tags = self.tagger.tag(tokens)
        mentions = decode_bio(TaggedSentence(tokens, tags, product.description))
        counts, decisions, exact = [], [], []
        catalog = self.index.catalog
        for m in mentions:
            n, d = self.link(m)
            counts.append(n)
            decisions.append(d)
            exact.append(d.outcome is not None and exact_match(m, catalog[d.outcome], self.cfg))
        triples = emit_triples(product, decisions, catalog, self.predicate)
        return EnrichmentResult(product.id, mentions, counts, decisions, triples, exact)


def enrich_product(product: ProductRecord, tagger: Tagger, index: InvertedIndex, model="exact",
                   mapper=None, linker=None, cfg=DEFAULT_CONFIG, predicate=DEFAULT_PREDICATE,
                   params=None) -> EnrichmentResult:
    enricher = Enricher(tagger, index, model, mapper, linker, cfg, params or Bm25Params(), predicate)
    return enricher.enrich(product)


def report_unlinked(results: Sequence[EnrichmentResult], top_n=10) -> list[tuple[str, str, int]]:
    """NIL mentions grouped by (surface, type), counted once per product."""
    products = defaultdict(set)
    for r in results:
        for d in r.decisions:
            if d.is_nil:
                products[(surface_key(d.mention.surface), d.mention.mtype)].add(r.product_id)
    rows = [(s, t, len(p)) for (s, t), p in products.items()]
    rows.sort(key=lambda row: (-row[2], row[0], row[1]))
    return rows[:top_n]


def compute_stats(results: Sequence[EnrichmentResult], top_n=10) -> EnrichmentStats:
    n = len(results)
    if n == 0:
        return EnrichmentStats()
    n_mentions = sum(len(r.mentions) for r in results)
    n_linked = sum(r.n_linked for r in results)
    n_unlinked = sum(r.n_unlinked for r in results)
    n_cands = sum(sum(r.candidate_counts) for r in results)
    n_exact = sum(sum(x for x, d in zip(r.exact, r.decisions) if not d.is_nil) for r in results)
    return EnrichmentStats(
        n_products=n,
        avg_mentions_per_product=n_mentions / n,
        avg_candidates_per_mention=n_cands / n_mentions if n_mentions else 0.0,
        avg_linked_per_product=n_linked / n,
        avg_unlinked_per_product=n_unlinked / n,
        pct_exact_links=100.0 * n_exact / n_linked if n_linked else 0.0,
        top_unlinked=report_unlinked(results, top_n),
    )


def run_corpus(products: Sequence[ProductRecord], enricher: Enricher, out_dir=None, top_n=10):
    """Enrich every product; failures are recorded per product, not raised.

    Returns ``(results, stats, errors)``. With ``out_dir`` set, writes
    ``results.jsonl``, ``triples.nt``, ``stats.json``, ``unlinked.tsv`` and
    ``errors.jsonl`` there.
    """
    results, errors = [], []
    for p in products:
        try:
            results.append(enricher.enrich(p))
        except Exception as exc:  # noqa: BLE001 - isolate per-product failures
            log.warning("product %s failed: %s", p.id, exc)
            errors.append({"product_id": p.id, "error": type(exc).__name__, "message": str(exc)})
    stats = compute_stats(results, top_n)
    if out_dir is not None:
        write_outputs(Path(out_dir), results, stats, errors)
    return results, stats, errors


def write_outputs(out: Path, results, stats: EnrichmentStats, errors) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "results.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for r in results:
            fh.write(json.dumps(r.to_json(), ensure_ascii=False) + "\n")
    write_triples([t for r in results for t in r.triples], out / "triples.nt")
    write_stats(stats, out / "stats.json")
    write_unlinked(stats.top_unlinked, out / "unlinked.tsv")
    with open(out / "errors.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for e in errors:
            fh.write(json.dumps(e, ensure_ascii=False) + "\n")


def write_stats(stats: EnrichmentStats, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(stats.to_json(), fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def write_unlinked(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("mention\tmention_type\tn_products\n")
        for s, t, n in rows:
            fh.write(f"{s}\t{t}\t{n}\n")


def load_results(path) -> list[EnrichmentResult]:
    with open(path, encoding="utf-8") as fh:
        return [EnrichmentResult.from_json(json.loads(line)) for line in fh if line.strip()]
