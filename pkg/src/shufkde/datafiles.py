"""File formats: datasets, vocabularies and released-model documents.

Dataset files are UTF-8 text. Lines starting with ``#`` are comments and
may appear anywhere (generators record their parameters this way). The
first non-comment line is the header ``n d m``; the next n non-comment
lines hold d decimal floats and a trailing 1-based integer label,
space-separated. Vocabulary files hold one ``term`` followed by d floats
per line. Floats are written with 17 significant digits so values
round-trip exactly; all writes are atomic (write-temp, rename).

Labels are 1-based on disk and 0-based in memory.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, InvalidParam
from .lsq import KERNELS, LsqSpec, PairSet, check_unit
from .protocol import ReleasedModel

__all__ = [
    "LabeledDataset",
    "Vocabulary",
    "fmt_float",
    "dumps_17g",
    "loads_json",
    "atomic_write_text",
    "read_dataset",
    "write_dataset",
    "read_vocab",
    "write_vocab",
    "model_to_doc",
    "model_from_doc",
    "save_model",
    "load_model",
]


@dataclass
class LabeledDataset:
    """n unit vectors in R^d with labels in [0, m)."""

    vectors: np.ndarray
    labels: np.ndarray
    m: int

    def __post_init__(self):
        self.vectors = check_unit(np.atleast_2d(self.vectors))
        self.labels = np.asarray(self.labels, dtype=np.int64)
        n = self.vectors.shape[0]
        if self.labels.shape != (n,):
            raise InvalidParam(f"need {n} labels, got shape {self.labels.shape}")
        if self.m < 1:
            raise InvalidParam("class count m must be >= 1")
        if n and (self.labels.min() < 0 or self.labels.max() >= self.m):
            raise InvalidParam(f"labels must lie in [0, {self.m})")
        if n < self.m:
            raise InvalidParam(f"need at least one point per class: n={n} < m={self.m}")

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


@dataclass
class Vocabulary:
    """Public terms with matching unit embedding vectors."""

    terms: list
    vectors: np.ndarray

    def __post_init__(self):
        self.vectors = check_unit(np.atleast_2d(self.vectors))
        if len(self.terms) != self.vectors.shape[0]:
            raise InvalidParam("terms and vectors must have matching length")
        if len(set(self.terms)) != len(self.terms):
            raise InvalidParam("vocabulary terms must be unique")

    def __len__(self) -> int:
        return len(self.terms)


def fmt_float(x: float) -> str:
    """17 significant digits: guarantees exact float round-trip."""
    return format(float(x), ".17g")


def _dump(obj, out: list):
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        # JSON has no Infinity token; non-finite values travel as strings
        out.append(json.dumps(str(x)) if not math.isfinite(x) else fmt_float(x))
    elif isinstance(obj, dict):
        out.append("{")
        for k, key in enumerate(sorted(obj)):
            if k:
                out.append(",")
            out.append(json.dumps(key))
            out.append(":")
            _dump(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for k, item in enumerate(obj):
            if k:
                out.append(",")
            _dump(item, out)
        out.append("]")
    else:
        raise InvalidParam(f"cannot serialize {type(obj).__name__}")


def dumps_17g(obj) -> str:
    """Deterministic JSON: sorted keys, floats at 17 significant digits."""
    out: list = []
    _dump(obj, out)
    return "".join(out)


def _revive_floats(obj):
    if isinstance(obj, str) and obj in ("inf", "-inf", "nan"):
        return float(obj)
    if isinstance(obj, dict):
        return {k: _revive_floats(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_revive_floats(v) for v in obj]
    return obj


def loads_json(text: str):
    return _revive_floats(json.loads(text))


def atomic_write_text(path, text: str):
    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _data_lines(path):
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            yield lineno, line


def read_dataset(path) -> LabeledDataset:
    """Parse and validate a dataset file; raises FormatError on any defect."""
    lines = _data_lines(path)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise FormatError(f"{path}: empty dataset file") from None
    parts = header.split()
    if len(parts) != 3:
        raise FormatError(f"{path}:{lineno}: header must be 'n d m', got {header!r}")
    try:
        n, d, m = (int(p) for p in parts)
    except ValueError:
        raise FormatError(f"{path}:{lineno}: non-integer header field") from None
    if n < 1 or d < 1 or m < 1:
        raise FormatError(f"{path}:{lineno}: header fields must be positive")

    vectors = np.empty((n, d), dtype=np.float64)
    labels = np.empty(n, dtype=np.int64)
    count = 0
    for lineno, line in lines:
        if count >= n:
            raise FormatError(f"{path}:{lineno}: more than {n} data rows")
        tokens = line.split()
        if len(tokens) != d + 1:
            raise FormatError(
                f"{path}:{lineno}: expected {d} floats and a label, got {len(tokens)} tokens"
            )
        try:
            vectors[count] = [float(t) for t in tokens[:d]]
            label = int(tokens[d])
        except ValueError:
            raise FormatError(f"{path}:{lineno}: unparseable number") from None
        if not 1 <= label <= m:
            raise FormatError(f"{path}:{lineno}: label {label} outside [1, {m}]")
        labels[count] = label - 1
        count += 1
    if count != n:
        raise FormatError(f"{path}: header declares {n} rows, found {count}")
    try:
        return LabeledDataset(vectors, labels, m)
    except Exception as exc:
        raise FormatError(f"{path}: {exc}") from exc


def write_dataset(path, dataset: LabeledDataset, comments: list | None = None):
    rows = ["# " + c for c in (comments or [])]
    rows.append(f"{dataset.n} {dataset.dim} {dataset.m}")
    for vec, label in zip(dataset.vectors, dataset.labels):
        rows.append(" ".join(fmt_float(v) for v in vec) + f" {int(label) + 1}")
    atomic_write_text(path, "\n".join(rows) + "\n")


def read_vocab(path) -> Vocabulary:
    terms = []
    rows = []
    d = None
    for lineno, line in _data_lines(path):
        tokens = line.split()
        if len(tokens) < 2:
            raise FormatError(f"{path}:{lineno}: expected 'term' plus d floats")
        if d is None:
            d = len(tokens) - 1
        elif len(tokens) - 1 != d:
            raise FormatError(f"{path}:{lineno}: inconsistent dimension")
        terms.append(tokens[0])
        try:
            rows.append([float(t) for t in tokens[1:]])
        except ValueError:
            raise FormatError(f"{path}:{lineno}: unparseable number") from None
    if not terms:
        raise FormatError(f"{path}: empty vocabulary file")
    try:
        return Vocabulary(terms, np.asarray(rows, dtype=np.float64))
    except Exception as exc:
        raise FormatError(f"{path}: {exc}") from exc


def write_vocab(path, vocab: Vocabulary):
    rows = [
        term + " " + " ".join(fmt_float(v) for v in vec)
        for term, vec in zip(vocab.terms, vocab.vectors)
    ]
    atomic_write_text(path, "\n".join(rows) + "\n")


def model_to_doc(model: ReleasedModel, embed_pairs: bool = False) -> dict:
    """JSON document for a released model. Pairs are normally identified
    by the public seed; ``embed_pairs`` ships the explicit parameters."""
    doc = {
        "kind": "released-model",
        "kernel": model.spec.kernel,
        "dim": model.spec.dim,
        "n": model.n,
        "I": model.I,
        "Q": model.spec.q,
        "public_seed": model.public_seed,
        "f_tilde": model.f_tilde.ravel().tolist(),
    }
    if embed_pairs or model.public_seed is None:
        doc["pairs"] = model.resolve_pairs().to_params()
    return doc


def model_from_doc(doc: dict) -> ReleasedModel:
    try:
        kernel = doc["kernel"]
        if kernel not in KERNELS:
            raise FormatError(f"unknown kernel {kernel!r}")
        spec = LsqSpec(kernel, int(doc["dim"]))
        ident = int(doc["I"])
        f_tilde = np.asarray(doc["f_tilde"], dtype=np.float64).reshape(ident, spec.q)
        pairs = None
        if "pairs" in doc:
            pairs = PairSet.from_params(spec, ident, doc["pairs"])
        seed = doc.get("public_seed")
        return ReleasedModel(spec, int(doc["n"]), ident, f_tilde,
                             None if seed is None else int(seed), pairs)
    except (KeyError, ValueError, TypeError) as exc:
        raise FormatError(f"malformed model document: {exc}") from exc


def save_model(path, model: ReleasedModel, embed_pairs: bool = False):
    atomic_write_text(path, dumps_17g(model_to_doc(model, embed_pairs)) + "\n")


def load_model(path) -> ReleasedModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_doc(loads_json(fh.read()))
