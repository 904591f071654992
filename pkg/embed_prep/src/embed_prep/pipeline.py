"""Embed labeled corpora and export shufkde-format data files.

Corpus input: UTF-8 text, one record per line, ``label<TAB>text``. Labels
are arbitrary strings; they map to 1-based class ids in sorted order and
the mapping is recorded as a comment in the exported dataset.

Output formats are exactly the primary package's:

* dataset -- header ``n d m``, then per row d floats and a 1-based label;
* vocabulary -- per line a term and d floats.

All vectors are unit-normalized (the export refuses non-normalizable
rows rather than guessing), and floats carry 17 significant digits.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .encoders import get_encoder

__all__ = ["EmbedJob", "read_corpus", "embed_corpus", "embed_vocab"]

NORM_TOL = 1e-4


@dataclass(frozen=True)
class EmbedJob:
    corpus_path: str
    encoder: str
    out_path: str
    normalize: bool = True

    def __post_init__(self):
        if not self.normalize:
            raise ValueError("exported vectors are always unit-normalized")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _atomic_write(path, text: str):
    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _normalize_rows(vectors: np.ndarray, what: str) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    bad = np.flatnonzero(norms.ravel() == 0.0)
    if bad.size:
        raise ValueError(f"{what} rows {bad.tolist()} have zero embeddings")
    unit = vectors / norms
    err = np.max(np.abs(np.linalg.norm(unit, axis=1) - 1.0))
    if err > NORM_TOL:
        raise ValueError(f"normalization failed: residual {err:g}")
    return unit


def read_corpus(path):
    """Parse ``label<TAB>text`` lines; returns (labels, texts)."""
    labels, texts = [], []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            label, sep, text = line.partition("\t")
            if not sep or not label.strip() or not text.strip():
                raise ValueError(f"{path}:{lineno}: expected 'label<TAB>text'")
            labels.append(label.strip())
            texts.append(text.strip())
    if not labels:
        raise ValueError(f"{path}: empty corpus")
    return labels, texts


def embed_corpus(job: EmbedJob) -> dict:
    """Embed a corpus and write a dataset file; returns a small summary."""
    labels, texts = read_corpus(job.corpus_path)
    encoder = get_encoder(job.encoder)
    vectors = _normalize_rows(np.asarray(encoder(texts), dtype=np.float64), "corpus")

    classes = sorted(set(labels))
    class_id = {label: i + 1 for i, label in enumerate(classes)}
    n, d = vectors.shape
    mapping = " ".join(f"{label}={class_id[label]}" for label in classes)
    rows = [
        f"# embedded with {job.encoder} from {os.path.basename(os.fspath(job.corpus_path))}",
        f"# labels: {mapping}",
        f"{n} {d} {len(classes)}",
    ]
    for vec, label in zip(vectors, labels):
        rows.append(" ".join(_fmt(v) for v in vec) + f" {class_id[label]}")
    _atomic_write(job.out_path, "\n".join(rows) + "\n")
    return {"n": n, "d": d, "m": len(classes), "classes": classes}


def embed_vocab(terms, encoder_id: str, out_path) -> dict:
    """Embed a term list and write a vocabulary file."""
    terms = [t.strip() for t in terms if t.strip()]
    if not terms:
        raise ValueError("empty term list")
    if len(set(terms)) != len(terms):
        raise ValueError("vocabulary terms must be unique")
    for term in terms:
        if any(ch.isspace() for ch in term):
            raise ValueError(f"term {term!r} contains whitespace")
    encoder = get_encoder(encoder_id)
    vectors = _normalize_rows(np.asarray(encoder(terms), dtype=np.float64), "vocab")
    rows = [
        term + " " + " ".join(_fmt(v) for v in vec)
        for term, vec in zip(terms, vectors)
    ]
    _atomic_write(out_path, "\n".join(rows) + "\n")
    return {"terms": len(terms), "d": vectors.shape[1]}
