"""Deterministic text-embedding providers for observation-to-vertex merging.

Two providers are shipped. ``FeatureHashProvider`` buckets whitespace tokens
into a signed count vector, so observations sharing most of their tokens land
close in cosine space and can merge under a threshold. ``IdentityProvider``
derives a pseudo-random unit vector from a hash of the whole string, so
distinct strings sit near-orthogonal and every distinct observation becomes
its own vertex in practice. Both are pure functions of the input text: the
same string always yields a bit-identical vector.
"""

from __future__ import annotations

import hashlib
import re
from typing import Protocol

import numpy as np

from .errors import InvalidEmbeddingError

_TOKEN_RE = re.compile(r"[A-Za-z0-9_]+")


def _stable_hash(data: str) -> int:
    # hash() is salted per process; blake2b is stable across runs and platforms.
    return int.from_bytes(hashlib.blake2b(data.encode("utf-8"), digest_size=8).digest(), "big")


class EmbeddingProvider(Protocol):
    dim: int

    def embed(self, text: str) -> np.ndarray: ...


class FeatureHashProvider:
    """Signed feature hashing of text tokens into a fixed-length count vector."""

    def __init__(self, dim: int = 256):
        self.dim = int(dim)

    def embed(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dim)
        for token in _TOKEN_RE.findall(text.lower()):
            h = _stable_hash(token)
            sign = 1.0 if (h >> 60) & 1 else -1.0
            vec[h % self.dim] += sign
        if not vec.any():
            raise InvalidEmbeddingError(f"text hashed to a zero vector: {text!r}")
        return vec


class IdentityProvider:
    """One near-orthogonal unit vector per distinct string.

    Identical strings embed to bit-identical vectors (cosine exactly 1);
    distinct strings land far below any useful merge threshold, so with a
    threshold of 1.0 vertex merging degenerates to exact-string keying.
    """

    def __init__(self, dim: int = 64):
        self.dim = int(dim)

    def embed(self, text: str) -> np.ndarray:
        rng = np.random.default_rng(_stable_hash(text))
        vec = rng.standard_normal(self.dim)
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:  # unreachable for standard_normal, kept for totality
            raise InvalidEmbeddingError(f"degenerate embedding for {text!r}")
        return vec / norm


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine of the angle between two vectors, exactly 1.0 for identical arrays."""
    if u is v or np.array_equal(u, v):
        return 1.0
    denom = float(np.linalg.norm(u)) * float(np.linalg.norm(v))
    if denom == 0.0:
        raise InvalidEmbeddingError("cosine similarity of a zero-norm vector")
    return float(np.clip(np.dot(u, v) / denom, -1.0, 1.0))


def make_provider(name: str, dim: int | None = None) -> EmbeddingProvider:
    if name == "hash":
        return FeatureHashProvider(dim or 256)
    if name == "identity":
        return IdentityProvider(dim or 64)
    raise ValueError(f"unknown embedding provider {name!r}")
