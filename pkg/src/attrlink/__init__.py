"""Extract attribute mentions from product descriptions and link them to
knowledge-graph attribute entities."""
from .candidate_gen import Bm25Params, CandidateSet, InvertedIndex, bm25_score, build_index, fuzzy_expand, retrieve
from .kg_store import (
    AttributeEntity,
    Catalog,
    ProductRecord,
    Triple,
    emit_triples,
    load_catalog,
    load_products,
    write_triples,
)
from .ner import (
    Mention,
    PerceptronTagger,
    PretaggedTagger,
    TaggedSentence,
    decode_bio,
    encode_bio,
    evaluate_ner,
    tag,
    train_tagger,
)
from .pipeline import EnrichmentResult, EnrichmentStats, Enricher, enrich_product, report_unlinked, run_corpus
from .text_norm import NormConfig, Token, normalize_phrase, normalize_token, tokenize

__version__ = "0.1.0"
