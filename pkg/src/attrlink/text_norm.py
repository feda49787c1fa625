"""Tokenization and the shared normalization pipeline.

Every component that compares strings (index, rule matchers, features)
goes through :func:`normalize_phrase` with the same :class:`NormConfig`.
"""
from __future__ import annotations

import hashlib
import re
import unicodedata
from dataclasses import asdict, dataclass

from . import porter

_TOKEN_RE = re.compile(r"[^\s\-/]+")
_STRIP_CHARS = ".,;:!?()\"'"
_NON_ALNUM = re.compile(r"[^a-z0-9]")
# with lowercase off, upper-case letters survive the whitelist
_NON_ALNUM_CASED = re.compile(r"[^A-Za-z0-9]")


@dataclass(frozen=True)
class Token:
    surface: str
    start: int
    end: int


@dataclass(frozen=True)
class NormConfig:
    lowercase: bool = True
    fold_accents: bool = True
    strip_special: bool = True
    stem: bool = True

    def digest(self) -> str:
        """Short stable hash, embedded in persisted indexes and models."""
        key = ",".join(f"{k}={int(v)}" for k, v in sorted(asdict(self).items()))
        return hashlib.sha1(key.encode("ascii")).hexdigest()[:12]

    @classmethod
    def from_dict(cls, d):
        return cls(**{k: bool(d[k]) for k in ("lowercase", "fold_accents", "strip_special", "stem") if k in d})


DEFAULT_CONFIG = NormConfig()


def tokenize(text: str) -> list[Token]:
    """Split on whitespace, ``-`` and ``/``; strip edge punctuation."""
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        raw = m.group()
        left = len(raw) - len(raw.lstrip(_STRIP_CHARS))
        stripped = raw.strip(_STRIP_CHARS)
        if not stripped:
            continue
        start = m.start() + left
        tokens.append(Token(stripped, start, start + len(stripped)))
    return tokens


def fold_accents(s: str) -> str:
    decomposed = unicodedata.normalize("NFKD", s)
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def normalize_token(tok: str, cfg: NormConfig = DEFAULT_CONFIG) -> str:
    s = tok
    if cfg.lowercase:
        s = s.lower()
    if cfg.fold_accents:
        s = fold_accents(s)
    if cfg.strip_special:
        s = (_NON_ALNUM if cfg.lowercase else _NON_ALNUM_CASED).sub("", s)
    if cfg.stem and s:
        s = porter.stem(s)
    return s


def normalize_phrase(text: str, cfg: NormConfig = DEFAULT_CONFIG) -> list[str]:
    out = []
    for t in tokenize(text):
        n = normalize_token(t.surface, cfg)
        if n:
            out.append(n)
    return out


def surface_key(text: str) -> str:
    """Lower-cased, whitespace-collapsed surface used for grouping reports."""
    return " ".join(t.surface.lower() for t in tokenize(text))
