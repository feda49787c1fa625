"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 bad input, 3 runtime failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .candidate_gen import Bm25Params, InvertedIndex, build_index, retrieve
from .disambiguation import (
    ML_MODELS,
    RULE_MODELS,
    EntityLinker,
    TypeMapper,
    WordVectorEmbedder,
    evaluate_pairs,
    mention_from_text,
    read_pairs,
    split_by_product,
    train_linker,
)
from .errors import AttrLinkError, InputError
from .kg_store import DEFAULT_PREDICATE, load_catalog, load_products
from .ner import (
    DEFAULT_MENTION_TYPES,
    PerceptronTagger,
    PretaggedTagger,
    TaggedSentence,
    evaluate_ner,
    read_conll,
    train_tagger,
    write_conll,
)
from .pipeline import Enricher, compute_stats, load_results, run_corpus, write_stats
from .text_norm import NormConfig, normalize_token, tokenize

log = logging.getLogger("attrlink")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_norm_flags(p):
    p.add_argument("--no-lowercase", action="store_true")
    p.add_argument("--no-fold-accents", action="store_true")
    p.add_argument("--no-strip-special", action="store_true")
    p.add_argument("--no-stem", action="store_true")


def _norm_config(args) -> NormConfig:
    return NormConfig(
        lowercase=not args.no_lowercase,
        fold_accents=not args.no_fold_accents,
        strip_special=not args.no_strip_special,
        stem=not args.no_stem,
    )


def _types(value):
    return tuple(t.strip() for t in value.split(",") if t.strip()) if value else DEFAULT_MENTION_TYPES


def _mapper(path):
    return TypeMapper.load(path) if path else TypeMapper.default()


def _prf_row(name, prf):
    print("model\tprecision\trecall\tf1")
    print(f"{name}\t{prf.precision:.2f}\t{prf.recall:.2f}\t{prf.f1:.2f}")


# -- subcommands -----------------------------------------------------------

def cmd_ner_train(args):
    sentences = read_conll(args.train)
    model = train_tagger(sentences, epochs=args.epochs, seed=args.seed, mention_types=_types(args.types))
    model.save(args.out)
    log.info("trained on %d sentences, wrote %s", len(sentences), args.out)


def cmd_ner_tag(args):
    model = PerceptronTagger.load(args.model)
    sentences = []
    for p in load_products(args.products):
        tokens = tokenize(p.description)
        sentences.append(TaggedSentence(tokens, model.tag(tokens), p.description))
    write_conll([s for s in sentences if s.tokens], args.out)


def cmd_ner_eval(args):
    gold = read_conll(args.gold)
    if args.pred:
        pred = read_conll(args.pred)
    else:
        model = PerceptronTagger.load(args.model)
        pred = [TaggedSentence(g.tokens, model.tag(g.tokens), g.text) for g in gold]
    metrics = evaluate_ner(gold, pred)
    if args.json:
        print(json.dumps(metrics.as_dict(), indent=2, sort_keys=True))
        return
    print(f"token_accuracy\t{metrics.token_accuracy:.4f}")
    print(f"entity_precision\t{metrics.entity_precision:.4f}")
    print(f"entity_recall\t{metrics.entity_recall:.4f}")
    print(f"entity_f1\t{metrics.entity_f1:.4f}")
    for mtype, row in metrics.per_type.items():
        print(f"{mtype}\tP={row['precision']:.4f}\tR={row['recall']:.4f}\tF1={row['f1']:.4f}\tn={row['support']}")


def cmd_index_build(args):
    cfg = _norm_config(args)
    index = build_index(load_catalog(args.entities, cfg=cfg), cfg)
    index.save(args.out)
    log.info("indexed %d entities, %d terms", index.n_docs, len(index.vocab))


def cmd_retrieve(args):
    index = InvertedIndex.load(args.index)
    params = Bm25Params(fuzziness=args.fuzziness, top_k=args.top_k)
    cands = retrieve(mention_from_text(args.mention, args.type), index, params, _norm_config(args))
    for entity, score in cands.candidates:
        print(f"{entity.id}\t{entity.label}\t{entity.attr_type}\t{score:.6f}")


def _embedder(args, cfg):
    if args.embeddings:
        return WordVectorEmbedder.load(args.embeddings, lambda t: normalize_token(t, cfg))
    return None


def cmd_el_train(args):
    cfg = _norm_config(args)
    catalog = load_catalog(args.entities, cfg=cfg)
    pairs = read_pairs(args.pairs)
    test = []
    if args.holdout > 0:
        pairs, test = split_by_product(pairs, args.holdout, args.seed)
    linker = train_linker(
        args.model, pairs, catalog,
        mention_types=_types(args.types), embedder=_embedder(args, cfg), cfg=cfg,
        min_precision=args.min_precision, folds=args.folds, seed=args.seed, entities_path=args.entities,
    )
    out = args.out or f"el-{args.model}.json"
    linker.save(out)
    log.info("threshold %.6g, wrote %s", linker.threshold, out)
    if test:
        _prf_row(args.model, evaluate_pairs(linker, test, catalog, cfg=cfg))


def cmd_el_eval(args):
    cfg = _norm_config(args)
    if args.model_file in RULE_MODELS:
        name, model, entities = args.model_file, args.model_file, args.entities
    else:
        model = EntityLinker.load(args.model_file)
        name, entities = model.kind, args.entities or model.entities_path
        cfg = model.featurizer.norm_config
    if not entities:
        raise InputError("no entity catalog given (--entities) and none recorded in the model file")
    catalog = load_catalog(entities, cfg=cfg)
    prf = evaluate_pairs(model, read_pairs(args.pairs), catalog, _mapper(args.type_mapper), cfg)
    _prf_row(name, prf)


def _parse_el_model(spec):
    kind, _, path = spec.partition(":")
    if kind in RULE_MODELS:
        return kind, None
    if kind in ML_MODELS:
        if not path:
            raise InputError(f"--el-model {kind} needs a model file, e.g. {kind}:model.json")
        linker = EntityLinker.load(path)
        if linker.kind != kind:
            raise InputError(f"{path} holds a {linker.kind} model, not {kind}")
        return kind, linker
    raise InputError(f"unknown --el-model {spec!r}")


def cmd_enrich(args):
    cfg = _norm_config(args)
    catalog = load_catalog(args.entities, cfg=cfg)
    index = InvertedIndex.load(args.index)
    if [e.id for e in index.catalog.entities] != [e.id for e in catalog.entities]:
        raise InputError(f"index {args.index} was not built from {args.entities}")
    if args.bio:
        tagger = PretaggedTagger(read_conll(args.bio))
    else:
        tagger = PerceptronTagger.load(args.ner_model)
    kind, linker = _parse_el_model(args.el_model)
    enricher = Enricher(
        tagger, index, kind, _mapper(args.type_mapper), linker, cfg,
        Bm25Params(fuzziness=args.fuzziness, top_k=args.top_k), args.predicate,
    )
    results, stats, errors = run_corpus(load_products(args.products), enricher, args.out, args.top_n)
    log.info("%d products enriched, %d failed", len(results), len(errors))
    print(json.dumps(stats.to_json(), indent=2, sort_keys=True))


def cmd_stats(args):
    stats = compute_stats(load_results(args.results), args.top_n)
    if args.out:
        write_stats(stats, args.out)
    print(json.dumps(stats.to_json(), indent=2, sort_keys=True))


def build_parser():
    parser = _Parser(prog="attrlink", description="Product attribute extraction and KG entity linking.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ner-train", help="train the perceptron BIO tagger")
    p.add_argument("--train", required=True, help="CoNLL-style BIO file")
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--types", help="comma-separated mention types (default: the 11 dress attributes)")
    p.set_defaults(func=cmd_ner_train)

    p = sub.add_parser("ner-tag", help="tag product descriptions into a BIO file")
    p.add_argument("--model", required=True)
    p.add_argument("--products", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ner_tag)

    p = sub.add_parser("ner-eval", help="token accuracy and entity-level P/R/F1")
    p.add_argument("--gold", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--model")
    g.add_argument("--pred")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_ner_eval)

    p = sub.add_parser("index-build", help="build the BM25 index over entity labels")
    p.add_argument("--entities", required=True)
    p.add_argument("--out", required=True)
    _add_norm_flags(p)
    p.set_defaults(func=cmd_index_build)

    p = sub.add_parser("retrieve", help="print ranked candidates for one mention")
    p.add_argument("--index", required=True)
    p.add_argument("--mention", required=True)
    p.add_argument("--type", default="detail", help="mention type (informational)")
    p.add_argument("--top-k", type=int, default=20)
    p.add_argument("--fuzziness", type=float, default=0.7)
    _add_norm_flags(p)
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("el-train", help="train and calibrate a linking classifier")
    p.add_argument("--model", required=True, choices=ML_MODELS)
    p.add_argument("--pairs", required=True)
    p.add_argument("--entities", required=True)
    p.add_argument("--out")
    p.add_argument("--min-precision", type=float, default=0.9)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--holdout", type=float, default=0.0,
                   help="fraction of products held out for a test report (0.1 gives a 9:1 split)")
    p.add_argument("--embeddings", help="word-vector text file; default is hashed char trigrams")
    p.add_argument("--types", help="comma-separated mention types")
    _add_norm_flags(p)
    p.set_defaults(func=cmd_el_train)

    p = sub.add_parser("el-eval", help="precision/recall/F1 on labeled pairs")
    p.add_argument("--model-file", required=True, help="trained model file, or 'exact' / 'sub'")
    p.add_argument("--pairs", required=True)
    p.add_argument("--entities", help="defaults to the catalog recorded in the model file")
    p.add_argument("--type-mapper")
    _add_norm_flags(p)
    p.set_defaults(func=cmd_el_eval)

    p = sub.add_parser("enrich", help="run the full pipeline over a product corpus")
    p.add_argument("--products", required=True)
    p.add_argument("--entities", required=True)
    p.add_argument("--index", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--ner-model")
    g.add_argument("--bio", help="pre-tagged CoNLL file replacing the tagger")
    p.add_argument("--el-model", required=True, help="exact | sub | logreg:FILE | svc:FILE | rf:FILE")
    p.add_argument("--type-mapper")
    p.add_argument("--predicate", default=DEFAULT_PREDICATE)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0, help="accepted for reproducible invocations; inference is deterministic")
    p.add_argument("--top-n", type=int, default=10)
    p.add_argument("--top-k", type=int, default=20)
    p.add_argument("--fuzziness", type=float, default=0.7)
    _add_norm_flags(p)
    p.set_defaults(func=cmd_enrich)

    p = sub.add_parser("stats", help="recompute enrichment statistics from results.jsonl")
    p.add_argument("--results", required=True)
    p.add_argument("--top-n", type=int, default=10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except (InputError, FileNotFoundError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        print(f"attrlink: input error: {exc}", file=sys.stderr)
        return 2
    except (AttrLinkError, OSError, ValueError, KeyError) as exc:
        print(f"attrlink: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
