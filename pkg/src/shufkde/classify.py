"""Private classification and class decoding on top of the KDE protocol.

Each user holds a labeled point (x, c). Labels are protected with m-ary
randomized response (local DP, eps_lbl), the users are grouped by
reported label, the per-class counts are published as-is, and each
reported class runs one independent KDE protocol execution. The
highest-density-class (HDC) classifier labels a test point by the class
whose released KDE is largest; class decoding ranks a public vocabulary
by one class's KDE to recover its semantics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bitsum import VARIANT_EXACT, VARIANTS, BitsumConfig
from .datafiles import (LabeledDataset, Vocabulary, atomic_write_text,
                        dumps_17g, loads_json, model_from_doc, model_to_doc)
from .errors import EmptyClass, FormatError, InvalidParam
from .lsq import LsqSpec, check_unit
from .privacy import BudgetSpec, label_keep_probability, solve_per_instance
from .protocol import ReleasedModel, init_protocol, query_batch, run_protocol
from .seeds import derive_seed, rng_from
from .shuffler import TranscriptMeter

__all__ = [
    "ClassifierModel",
    "randomize_label",
    "randomize_labels",
    "train",
    "classify",
    "classify_batch",
    "decode_class",
    "evaluate",
    "debiased_counts",
    "save_classifier",
    "load_classifier",
]


@dataclass
class ClassifierModel:
    """Per-class released models plus the published noisy class counts."""

    spec: LsqSpec
    m: int
    I: int
    eps_label: float
    variant: str
    counts: np.ndarray
    models: list

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if len(self.models) != self.m or self.counts.shape != (self.m,):
            raise InvalidParam("need one released model and one count per class")
        if np.any(self.counts < 1):
            raise InvalidParam("every trained class must have count >= 1")

    @property
    def n(self) -> int:
        return int(self.counts.sum())


def randomize_label(c: int, m: int, eps_label: float, rng: np.random.Generator) -> int:
    """Keep c with probability e^eps/(e^eps - 1 + m), else uniform over the rest."""
    return int(randomize_labels(np.array([c]), m, eps_label, rng)[0])


def randomize_labels(labels: np.ndarray, m: int, eps_label: float,
                     rng: np.random.Generator) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= m):
        raise InvalidParam(f"labels must lie in [0, {m})")
    keep_p = label_keep_probability(eps_label, m)
    keep = rng.random(labels.shape) < keep_p
    # uniform over [m] \ {c}: draw from m-1 slots and skip the true label
    other = rng.integers(0, m - 1, labels.shape)
    other = other + (other >= labels)
    return np.where(keep, labels, other)


def train(dataset: LabeledDataset, spec: LsqSpec, I: int, variant: str,
          master_seed: int, eps_label: float = math.inf,
          budget: BudgetSpec | None = None, message_level: bool = False,
          p_rr: float | None = None, three_nb_c: float = 0.2,
          rr_debias: bool = True,
          ) -> tuple[ClassifierModel, list[TranscriptMeter] | None]:
    """Randomize labels, group, and run one KDE protocol per reported class.

    Deterministic given ``master_seed``. ``budget`` is required for every
    variant except the exact baseline. Raises EmptyClass when a reported
    class has zero users (the argmax domain would be undefined otherwise).
    """
    if variant not in VARIANTS:
        raise InvalidParam(f"unknown bitsum variant {variant!r}")
    if dataset.dim != spec.dim:
        raise InvalidParam(f"dataset dim {dataset.dim} != spec dim {spec.dim}")
    if dataset.m < 2:
        raise InvalidParam("classification needs m >= 2")
    if variant != VARIANT_EXACT and budget is None:
        raise InvalidParam(f"variant {variant!r} needs a privacy budget")

    eps0 = delta0 = None
    if budget is not None and variant != VARIANT_EXACT:
        per = solve_per_instance(budget, spec.s, I)
        eps0, delta0 = per.eps0, per.delta0
        if delta0 == 0.0 and variant != VARIANT_EXACT:
            # pure-mode accounting still needs a working delta0 for RR/3NB/
            # Gaussian parameter formulas; those variants are not pure-DP
            raise InvalidParam(f"variant {variant!r} is not a pure-DP protocol")

    reported = randomize_labels(dataset.labels, dataset.m,
                                eps_label, rng_from(master_seed, "labels"))
    counts = np.bincount(reported, minlength=dataset.m)
    empty = np.flatnonzero(counts == 0)
    if empty.size:
        raise EmptyClass(f"reported classes {empty.tolist()} have zero users")

    models = []
    meters = [] if message_level else None
    for c in range(dataset.m):
        X_c = dataset.vectors[reported == c]
        cfg = BitsumConfig(variant, int(counts[c]), eps0=eps0, delta0=delta0,
                           p_rr=p_rr, three_nb_c=three_nb_c, rr_debias=rr_debias)
        init = init_protocol(spec, I, int(counts[c]), cfg,
                             public_seed=derive_seed(master_seed, "public", c))
        model, meter_res = run_protocol(init, X_c, rng_from(master_seed, "private", c),
                                        message_level=message_level)
        models.append(model)
        if message_level:
            meters.append(meter_res)

    clf = ClassifierModel(spec, dataset.m, I, eps_label, variant, counts, models)
    return clf, meters


def classify_batch(model: ClassifierModel, Y: np.ndarray) -> np.ndarray:
    """HDC labels for each query row; ties break toward the smallest index."""
    Y = check_unit(np.atleast_2d(Y))
    scores = np.stack([query_batch(m, Y) for m in model.models], axis=1)
    return np.argmax(scores, axis=1)


def classify(model: ClassifierModel, y: np.ndarray) -> int:
    return int(classify_batch(model, np.atleast_2d(y))[0])


def decode_class(model: ClassifierModel, c: int, vocab: Vocabulary, k: int):
    """Top-k vocabulary terms by the class's KDE, with scores.

    Sorted by descending score; exact score ties break lexicographically
    by term so rankings are reproducible.
    """
    if not 0 <= c < model.m:
        raise InvalidParam(f"class {c} outside [0, {model.m})")
    if k > len(vocab):
        raise InvalidParam(f"k={k} exceeds vocabulary size {len(vocab)}")
    scores = query_batch(model.models[c], vocab.vectors)
    order = sorted(range(len(vocab)), key=lambda t: (-scores[t], vocab.terms[t]))
    return [(vocab.terms[t], float(scores[t])) for t in order[:k]]


def evaluate(model: ClassifierModel, vectors: np.ndarray, labels: np.ndarray):
    """Accuracy and m x m confusion counts (rows true, columns predicted)."""
    labels = np.asarray(labels, dtype=np.int64)
    preds = classify_batch(model, vectors)
    confusion = np.zeros((model.m, model.m), dtype=np.int64)
    np.add.at(confusion, (labels, preds), 1)
    accuracy = float(np.trace(confusion)) / labels.size
    return accuracy, confusion


def debiased_counts(counts: np.ndarray, eps_label: float) -> np.ndarray:
    """Diagnostic inverse of the label-RR marginal; never used in training
    (training consumes the published raw counts)."""
    counts = np.asarray(counts, dtype=np.float64)
    m = counts.size
    keep_p = label_keep_probability(eps_label, m)
    q = (1.0 - keep_p) / (m - 1)
    if keep_p - q <= 0:
        raise InvalidParam("keep probability equals chance level; counts unrecoverable")
    n = counts.sum()
    return (counts - n * q) / (keep_p - q)


def classifier_to_doc(model: ClassifierModel, embed_pairs: bool = False) -> dict:
    return {
        "kind": "classifier-model",
        "kernel": model.spec.kernel,
        "dim": model.spec.dim,
        "m": model.m,
        "I": model.I,
        "eps_label": model.eps_label,
        "variant": model.variant,
        "counts": model.counts.tolist(),
        "classes": [model_to_doc(rm, embed_pairs) for rm in model.models],
    }


def classifier_from_doc(doc: dict) -> ClassifierModel:
    try:
        spec = LsqSpec(doc["kernel"], int(doc["dim"]))
        models = [model_from_doc(d) for d in doc["classes"]]
        return ClassifierModel(
            spec, int(doc["m"]), int(doc["I"]), float(doc["eps_label"]),
            doc["variant"], np.asarray(doc["counts"], dtype=np.int64), models,
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise FormatError(f"malformed classifier document: {exc}") from exc


def save_classifier(path, model: ClassifierModel, embed_pairs: bool = False):
    atomic_write_text(path, dumps_17g(classifier_to_doc(model, embed_pairs)) + "\n")


def load_classifier(path) -> ClassifierModel:
    with open(path, "r", encoding="utf-8") as fh:
        return classifier_from_doc(loads_json(fh.read()))
