"""BIO mention detection.

Tags are plain strings (``"O"``, ``"B-color"``, ``"I-color"``). The
baseline tagger is a greedy left-to-right averaged perceptron; anything
exposing ``tag(tokens) -> list[str]`` can stand in for it, including
:class:`PretaggedTagger`, which replays tags read from a CoNLL file.
"""
from __future__ import annotations

import json
import random
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Protocol, Sequence

from sklearn.base import BaseEstimator

from .errors import (
    AlignmentError,
    EmptyDatasetError,
    FormatError,
    LengthMismatchError,
    OverlapError,
    RangeError,
    UnknownTagError,
)
from .text_norm import Token, normalize_token

DEFAULT_MENTION_TYPES = (
    "shape", "hem", "color", "collar", "material", "fastening",
    "pockets", "neckline", "sleeve_type", "pattern", "detail",
)
OUTSIDE = "O"
MODEL_FORMAT = "attrlink.perceptron-tagger"
MODEL_VERSION = 1


def tag_order(mention_types) -> list[str]:
    """Fixed tie-break order: O, then B-types, then I-types, each alphabetical."""
    types = sorted(set(mention_types))
    return [OUTSIDE] + [f"B-{t}" for t in types] + [f"I-{t}" for t in types]


def split_tag(tag: str) -> tuple[str, str | None]:
    if tag == OUTSIDE:
        return OUTSIDE, None
    prefix, sep, mtype = tag.partition("-")
    if not sep or prefix not in ("B", "I") or not mtype:
        raise UnknownTagError(f"malformed BIO tag {tag!r}")
    return prefix, mtype


@dataclass(frozen=True)
class Mention:
    surface: str
    mtype: str
    tok_span: tuple[int, int]
    char_span: tuple[int, int]


def render_tokens(tokens: Sequence[Token]) -> str:
    """Rebuild a text in which every token sits at its own offsets."""
    chars: list[str] = []
    for t in tokens:
        if len(chars) < t.start:
            chars.extend(" " * (t.start - len(chars)))
        chars[t.start:t.end] = t.surface
    return "".join(chars)


def tokens_from_words(words: Sequence[str]) -> list[Token]:
    out, pos = [], 0
    for w in words:
        out.append(Token(w, pos, pos + len(w)))
        pos += len(w) + 1
    return out


@dataclass
class TaggedSentence:
    tokens: list[Token]
    tags: list[str]
    text: str | None = None

    def __post_init__(self):
        if self.text is None:
            self.text = render_tokens(self.tokens)

    @classmethod
    def from_words(cls, words, tags):
        return cls(tokens_from_words(words), list(tags))

    @property
    def words(self) -> list[str]:
        return [t.surface for t in self.tokens]


def decode_bio(sent: TaggedSentence) -> list[Mention]:
    """Chunk a tagged sentence into mentions.

    An ``I-x`` that does not continue an ``x`` chunk opens a new mention.
    """
    if len(sent.tokens) != len(sent.tags):
        raise LengthMismatchError(f"{len(sent.tokens)} tokens but {len(sent.tags)} tags")
    spans = []
    cur = None  # [start, end, type]
    for i, tag in enumerate(sent.tags):
        prefix, mtype = split_tag(tag)
        if prefix == "I" and cur is not None and cur[2] == mtype and cur[1] == i:
            cur[1] = i + 1
            continue
        if cur is not None:
            spans.append(cur)
            cur = None
        if prefix != OUTSIDE:
            cur = [i, i + 1, mtype]
    if cur is not None:
        spans.append(cur)
    return mentions_from_spans(sent.tokens, sent.text, spans)


def encode_bio(tokens: Sequence[Token], mentions: Sequence[Mention]) -> list[str]:
    tags = [OUTSIDE] * len(tokens)
    for m in sorted(mentions, key=lambda m: m.tok_span):
        start, end = m.tok_span
        if not 0 <= start < end <= len(tokens):
            raise RangeError(f"mention span {m.tok_span} outside 0..{len(tokens)}")
        if any(t != OUTSIDE for t in tags[start:end]):
            raise OverlapError(f"mention span {m.tok_span} overlaps another mention")
        tags[start] = f"B-{m.mtype}"
        for i in range(start + 1, end):
            tags[i] = f"I-{m.mtype}"
    return tags


def mentions_from_spans(tokens: Sequence[Token], text: str, spans) -> list[Mention]:
    """Build mentions from ``(start, end, type)`` token spans."""
    out = []
    for start, end, mtype in spans:
        cs, ce = tokens[start].start, tokens[end - 1].end
        out.append(Mention(text[cs:ce], mtype, (start, end), (cs, ce)))
    return out


# -- tagger -----------------------------------------------------------------

class Tagger(Protocol):
    def tag(self, tokens: Sequence[Token]) -> list[str]: ...


def _shape(word):
    out = []
    for ch in word:
        c = "X" if ch.isupper() else "x" if ch.isalpha() else "d" if ch.isdigit() else ch
        if not out or out[-1] != c:
            out.append(c)
    return "".join(out)


def _features(words, lowers, i, prev_tag):
    w, lw = words[i], lowers[i]
    return (
        "bias",
        "w=" + w,
        "lw=" + lw,
        "nw=" + normalize_token(w),
        "suf3=" + lw[-3:],
        "pre3=" + lw[:3],
        "shape=" + _shape(w),
        "pw=" + (lowers[i - 1] if i > 0 else "<s>"),
        "nx=" + (lowers[i + 1] if i + 1 < len(words) else "</s>"),
        "pt=" + prev_tag,
    )


_START = "<start>"


class PerceptronTagger(BaseEstimator):
    """Greedy averaged-perceptron BIO tagger.

    Parameters
    ----------
    mention_types : sequence of str
        Tag inventory; the tag set is ``O`` plus ``B-``/``I-`` per type.
    epochs : int
        Passes over the training data. ``0`` leaves every weight at zero,
        so the tagger predicts ``O`` everywhere.
    seed : int
        Seeds the per-epoch shuffle of training sentences.
    """

    def __init__(self, mention_types=DEFAULT_MENTION_TYPES, epochs=10, seed=0):
        self.mention_types = mention_types
        self.epochs = epochs
        self.seed = seed

    def _scores(self, feats):
        scores = dict.fromkeys(self.tags_, 0.0)
        for f in feats:
            row = self.weights_.get(f)
            if row:
                for tag, w in row.items():
                    scores[tag] += w
        return scores

    def _best(self, scores, exclude=None):
        # first tag in tie-break order with the highest score
        best, best_score = None, 0.0
        for t in self.tags_:
            if t != exclude and (best is None or scores[t] > best_score):
                best, best_score = t, scores[t]
        return best

    def _score(self, feats):
        return self._best(self._scores(feats))

    def fit(self, X, y):
        """Train on token sequences ``X`` (strings or Tokens) with gold tags ``y``."""
        X = [[getattr(t, "surface", t) for t in sent] for sent in X]
        y = [list(tags) for tags in y]
        if not X:
            raise EmptyDatasetError("training set is empty")
        if len(X) != len(y):
            raise LengthMismatchError(f"{len(X)} sentences but {len(y)} tag sequences")
        self.tags_ = tag_order(self.mention_types)
        known = set(self.tags_)
        for words, tags in zip(X, y):
            if len(words) != len(tags):
                raise LengthMismatchError(f"{len(words)} tokens but {len(tags)} tags")
            for t in tags:
                if t not in known:
                    raise UnknownTagError(f"tag {t!r} is not in the inventory")

        self.weights_ = {}
        totals = defaultdict(float)
        stamps = defaultdict(int)
        clock = 0
        rng = random.Random(self.seed)
        order = list(range(len(X)))
        for _ in range(self.epochs):
            rng.shuffle(order)
            for k in order:
                words, gold = X[k], y[k]
                lowers = [w.lower() for w in words]
                prev = _START
                for i in range(len(words)):
                    clock += 1
                    feats = _features(words, lowers, i, prev)
                    scores = self._scores(feats)
                    guess = self._best(scores)
                    rival = self._best(scores, exclude=gold[i])
                    # update unless gold wins outright; a tie won only by the
                    # tie-break order does not count as learned
                    if scores[rival] >= scores[gold[i]]:
                        for f in feats:
                            row = self.weights_.setdefault(f, {})
                            for tag, delta in ((gold[i], 1.0), (rival, -1.0)):
                                key = (f, tag)
                                w = row.get(tag, 0.0)
                                totals[key] += (clock - stamps[key]) * w
                                stamps[key] = clock
                                row[tag] = w + delta
                    prev = guess

        averaged = {}
        for f, row in self.weights_.items():
            for tag, w in row.items():
                key = (f, tag)
                total = totals[key] + (clock - stamps[key]) * w
                avg = total / clock
                if avg != 0.0:
                    averaged.setdefault(f, {})[tag] = avg
        self.weights_ = averaged
        self.n_epochs_ = self.epochs
        return self

    def tag(self, tokens: Sequence) -> list[str]:
        words = [getattr(t, "surface", t) for t in tokens]
        lowers = [w.lower() for w in words]
        out, prev = [], _START
        for i in range(len(words)):
            prev = self._score(_features(words, lowers, i, prev))
            out.append(prev)
        return out

    def predict(self, X):
        return [self.tag(sent) for sent in X]

    def save(self, path):
        payload = {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "mention_types": list(self.mention_types),
            "epochs": self.n_epochs_,
            "seed": self.seed,
            "weights": {f: dict(sorted(row.items())) for f, row in sorted(self.weights_.items())},
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False, indent=0, sort_keys=False)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            try:
                payload = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}: {exc}") from None
        if payload.get("format") != MODEL_FORMAT or payload.get("version") != MODEL_VERSION:
            raise FormatError(f"{path}: not a version-{MODEL_VERSION} tagger model")
        model = cls(tuple(payload["mention_types"]), payload["epochs"], payload["seed"])
        model.tags_ = tag_order(model.mention_types)
        model.weights_ = payload["weights"]
        model.n_epochs_ = payload["epochs"]
        return model


def train_tagger(train: Sequence[TaggedSentence], epochs=10, seed=0, mention_types=DEFAULT_MENTION_TYPES):
    return PerceptronTagger(mention_types, epochs, seed).fit([s.words for s in train], [s.tags for s in train])


def tag(model: Tagger, tokens: Sequence[Token]) -> list[str]:
    return model.tag(tokens)


class PretaggedTagger:
    """Replays externally produced tags, keyed by the token surface sequence."""

    def __init__(self, sentences: Sequence[TaggedSentence]):
        self._table = {tuple(s.words): list(s.tags) for s in sentences}

    def tag(self, tokens):
        key = tuple(getattr(t, "surface", t) for t in tokens)
        if not key:
            return []
        try:
            return list(self._table[key])
        except KeyError:
            raise AlignmentError("no pre-tagged sentence matches this token sequence") from None


# -- evaluation ---------------------------------------------------------------

@dataclass
class NerMetrics:
    token_accuracy: float
    entity_precision: float
    entity_recall: float
    entity_f1: float
    per_type: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "token_accuracy": self.token_accuracy,
            "entity_precision": self.entity_precision,
            "entity_recall": self.entity_recall,
            "entity_f1": self.entity_f1,
            "per_type": self.per_type,
        }


def _prf(tp, n_pred, n_gold):
    p = tp / n_pred if n_pred else 0.0
    r = tp / n_gold if n_gold else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


def evaluate_ner(gold: Sequence[TaggedSentence], pred: Sequence[TaggedSentence]) -> NerMetrics:
    """Token accuracy plus exact (span, type) entity-level scores."""
    if len(gold) != len(pred):
        raise AlignmentError(f"{len(gold)} gold sentences but {len(pred)} predicted")
    correct = total = 0
    gold_ents, pred_ents = set(), set()
    for k, (g, p) in enumerate(zip(gold, pred)):
        if len(g.tags) != len(p.tags):
            raise AlignmentError(f"sentence {k}: {len(g.tags)} gold tags vs {len(p.tags)} predicted")
        correct += sum(a == b for a, b in zip(g.tags, p.tags))
        total += len(g.tags)
        gold_ents |= {(k, m.tok_span, m.mtype) for m in decode_bio(g)}
        pred_ents |= {(k, m.tok_span, m.mtype) for m in decode_bio(p)}

    tp = len(gold_ents & pred_ents)
    prec, rec, f1 = _prf(tp, len(pred_ents), len(gold_ents))
    per_type = {}
    for mtype in sorted({e[2] for e in gold_ents | pred_ents}):
        ge = {e for e in gold_ents if e[2] == mtype}
        pe = {e for e in pred_ents if e[2] == mtype}
        p_t, r_t, f_t = _prf(len(ge & pe), len(pe), len(ge))
        per_type[mtype] = {"precision": p_t, "recall": r_t, "f1": f_t, "support": len(ge)}
    return NerMetrics(correct / total if total else 0.0, prec, rec, f1, per_type)


# -- CoNLL-style files -------------------------------------------------------

def read_conll(path) -> list[TaggedSentence]:
    sentences, words, tags = [], [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip():
                if words:
                    sentences.append(TaggedSentence.from_words(words, tags))
                    words, tags = [], []
                continue
            token, sep, t = line.rpartition("\t")
            if not sep or not token:
                raise FormatError(f"{path}:{lineno}: expected 'token<TAB>tag'")
            try:
                split_tag(t)
            except UnknownTagError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from None
            words.append(token)
            tags.append(t)
    if words:
        sentences.append(TaggedSentence.from_words(words, tags))
    return sentences


def write_conll(sentences: Sequence[TaggedSentence], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for k, s in enumerate(sentences):
            if k:
                fh.write("\n")
            for w, t in zip(s.words, s.tags):
                fh.write(f"{w}\t{t}\n")
