"""Text encoders emitting fixed-dimension vectors.

Encoder choice is configuration, not code: anything that maps a batch of
strings to an (n, d) array works. Two encoders ship here:

* ``hash:<d>`` -- deterministic feature hashing of word tokens and
  character trigrams into d buckets with sha256-derived signs. No model
  files, no randomness, identical output on every platform.
* ``sentence-transformers:<model>`` -- any locally available
  sentence-transformers model (optional dependency; requires the model
  weights on disk or a network path to fetch them).
"""

from __future__ import annotations

import hashlib
import re

import numpy as np

__all__ = ["get_encoder", "HashedNgramEncoder"]

_WORD_RE = re.compile(r"[a-z0-9']+")


class HashedNgramEncoder:
    """Bag of word tokens + within-word char trigrams, hashed into R^d.

    Trigrams never span word boundaries: boundary grams (" th", "er ")
    are shared by almost all English text and would drown the topical
    word signal.
    """

    def __init__(self, dim: int = 64):
        if dim < 2:
            raise ValueError("hash encoder needs dim >= 2")
        self.dim = dim

    def _tokens(self, text: str):
        words = _WORD_RE.findall(text.lower())
        grams = [w[i : i + 3] for w in words for i in range(len(w) - 2)]
        return words + grams

    def _slot(self, token: str):
        digest = hashlib.sha256(token.encode("utf-8")).digest()
        bucket = int.from_bytes(digest[:8], "big") % self.dim
        sign = 1.0 if digest[8] % 2 == 0 else -1.0
        return bucket, sign

    def __call__(self, texts) -> np.ndarray:
        out = np.zeros((len(texts), self.dim), dtype=np.float64)
        for row, text in enumerate(texts):
            tokens = self._tokens(text)
            if not tokens:
                raise ValueError(f"text {row} produced no tokens: {text!r}")
            for token in tokens:
                bucket, sign = self._slot(token)
                out[row, bucket] += sign
        return out


class SentenceTransformerEncoder:
    def __init__(self, model_name: str):
        from sentence_transformers import SentenceTransformer

        self.model = SentenceTransformer(model_name)

    def __call__(self, texts) -> np.ndarray:
        return np.asarray(self.model.encode(list(texts), convert_to_numpy=True),
                          dtype=np.float64)


def get_encoder(identifier: str):
    """Resolve an encoder identifier: ``hash:<d>`` or
    ``sentence-transformers:<model>``."""
    kind, _, arg = identifier.partition(":")
    if kind == "hash":
        return HashedNgramEncoder(int(arg) if arg else 64)
    if kind == "sentence-transformers":
        if not arg:
            raise ValueError("sentence-transformers encoder needs a model name")
        return SentenceTransformerEncoder(arg)
    raise ValueError(f"unknown encoder {identifier!r}")
