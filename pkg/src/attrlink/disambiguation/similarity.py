"""String and vector similarity, and the token embedding providers."""
from __future__ import annotations

import zlib

import numpy as np

from ..errors import DimensionMismatchError, FormatError

WINKLER_SCALE = 0.1
WINKLER_MAX_PREFIX = 4


def jaro(a: str, b: str) -> float:
    if a == b:
        return 1.0
    if not a or not b:
        return 0.0
    window = max(max(len(a), len(b)) // 2 - 1, 0)
    a_hit = [False] * len(a)
    b_hit = [False] * len(b)
    matches = 0
    for i, ch in enumerate(a):
        lo, hi = max(0, i - window), min(len(b), i + window + 1)
        for j in range(lo, hi):
            if not b_hit[j] and b[j] == ch:
                a_hit[i] = b_hit[j] = True
                matches += 1
                break
    if matches == 0:
        return 0.0
    b_seq = (b[j] for j in range(len(b)) if b_hit[j])
    half_transpositions = sum(a[i] != next(b_seq) for i in range(len(a)) if a_hit[i])
    t = half_transpositions / 2
    return (matches / len(a) + matches / len(b) + (matches - t) / matches) / 3.0


def jaro_winkler(a: str, b: str) -> float:
    j = jaro(a, b)
    prefix = 0
    for ca, cb in zip(a[:WINKLER_MAX_PREFIX], b[:WINKLER_MAX_PREFIX]):
        if ca != cb:
            break
        prefix += 1
    return j + prefix * WINKLER_SCALE * (1.0 - j)


def cosine(u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise DimensionMismatchError(f"cannot compare vectors of shape {u.shape} and {v.shape}")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


class CharTrigramEmbedder:
    """Hashed character-trigram vectors, L2-normalized per token, mean-pooled."""

    mode = "char_trigram_hash"

    def __init__(self, dim=256):
        self.dim = dim

    def token_vector(self, token: str) -> np.ndarray:
        vec = np.zeros(self.dim)
        padded = f"#{token}#"
        for i in range(len(padded) - 2):
            vec[zlib.crc32(padded[i:i + 3].encode("utf-8")) % self.dim] += 1.0
        norm = np.linalg.norm(vec)
        return vec / norm if norm else vec

    def embed(self, tokens) -> np.ndarray:
        if not tokens:
            return np.zeros(self.dim)
        return np.mean([self.token_vector(t) for t in tokens], axis=0)

    def to_config(self):
        return {"mode": self.mode, "dim": self.dim}


class WordVectorEmbedder:
    """Word vectors read from ``token v1 v2 ...`` lines; unknown tokens are skipped."""

    mode = "word_vectors"

    def __init__(self, vectors: dict[str, np.ndarray], path=None):
        dims = {v.shape[0] for v in vectors.values()}
        if len(dims) > 1:
            raise FormatError(f"word vectors have mixed dimensions {sorted(dims)}")
        self.vectors = vectors
        self.dim = dims.pop() if dims else 0
        self.path = path

    @classmethod
    def load(cls, path, normalize=None):
        vectors = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                parts = line.split()
                if not parts:
                    continue
                if len(parts) < 2:
                    raise FormatError(f"{path}:{lineno}: expected 'token v1 v2 ...'")
                try:
                    vec = np.array([float(x) for x in parts[1:]])
                except ValueError:
                    raise FormatError(f"{path}:{lineno}: non-numeric vector component") from None
                key = normalize(parts[0]) if normalize else parts[0]
                vectors.setdefault(key, vec)
        return cls(vectors, path)

    def embed(self, tokens) -> np.ndarray:
        known = [self.vectors[t] for t in tokens if t in self.vectors]
        if not known:
            return np.zeros(self.dim)
        return np.mean(known, axis=0)

    def to_config(self):
        return {"mode": self.mode, "path": str(self.path) if self.path else None}


def embedder_from_config(cfg, normalize=None):
    if cfg is None or cfg.get("mode") == CharTrigramEmbedder.mode:
        return CharTrigramEmbedder((cfg or {}).get("dim", 256))
    if cfg.get("mode") == WordVectorEmbedder.mode:
        return WordVectorEmbedder.load(cfg["path"], normalize)
    raise FormatError(f"unknown embedding mode {cfg.get('mode')!r}")
