"""Simulated trusted shuffler and message transport.

Messages are envelopes (payload, (i, j)) where (i, j) addresses one of
the I x Q protocol instances (0-based here). The shuffler applies a
uniformly random permutation, which removes sender identities; the
analyzer then routes payloads to per-instance cells by tag.

Communication metering observes the user-to-shuffler leg: per-user
message counts and the per-message bit width ceil(log2(I*Q)) + 1 (the
flattened tag plus the 1-bit payload, which reduces to ceil(log2 d) + 1
when I = d and Q = 1).

The shuffler is an in-process trusted component; cryptographic
realizations are out of scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParam, TagOutOfRange

__all__ = [
    "Envelopes",
    "TranscriptMeter",
    "bits_per_message",
    "shuffle",
    "route",
    "meter",
    "dump_transcript",
]


@dataclass
class Envelopes:
    """A column-oriented batch of tagged messages.

    ``tags`` holds flattened instance indices i*Q + j; ``payloads`` holds
    values in {-1, +1} (int8). Batches concatenate cheaply, which keeps
    million-message simulations in numpy instead of per-object Python.
    """

    tags: np.ndarray
    payloads: np.ndarray

    def __post_init__(self):
        self.tags = np.asarray(self.tags, dtype=np.int64)
        self.payloads = np.asarray(self.payloads, dtype=np.int8)
        if self.tags.shape != self.payloads.shape or self.tags.ndim != 1:
            raise InvalidParam("tags and payloads must be 1-D arrays of equal length")

    def __len__(self) -> int:
        return self.tags.size

    @classmethod
    def from_cells(cls, cell_idx: np.ndarray, payloads: np.ndarray) -> "Envelopes":
        return cls(cell_idx, payloads)

    @classmethod
    def concat(cls, batches: list["Envelopes"]) -> "Envelopes":
        if not batches:
            return cls(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int8))
        return cls(
            np.concatenate([b.tags for b in batches]),
            np.concatenate([b.payloads for b in batches]),
        )

    def check_bounds(self, I: int, Q: int):
        if len(self) == 0:
            return
        if self.tags.min() < 0 or self.tags.max() >= I * Q:
            raise TagOutOfRange(
                f"tag outside [0, {I * Q}) for declared I={I}, Q={Q}"
            )


@dataclass(frozen=True)
class TranscriptMeter:
    """Exact communication accounting for one protocol execution."""

    per_user_message_counts: np.ndarray
    bits_per_message: int

    @property
    def total_messages(self) -> int:
        return int(np.sum(self.per_user_message_counts))

    @property
    def total_bits(self) -> int:
        return self.bits_per_message * self.total_messages

    @property
    def mean_messages_per_user(self) -> float:
        return float(np.mean(self.per_user_message_counts))


def bits_per_message(I: int, Q: int) -> int:
    """ceil(log2(I*Q)) + 1: flattened tag plus the single payload bit."""
    if I < 1 or Q < 1:
        raise InvalidParam("I and Q must be positive")
    return math.ceil(math.log2(I * Q)) + 1


def shuffle(envelopes: Envelopes, rng: np.random.Generator) -> Envelopes:
    """Uniformly random permutation of the combined message multiset."""
    order = rng.permutation(len(envelopes))
    return Envelopes(envelopes.tags[order], envelopes.payloads[order])


def route(envelopes: Envelopes, I: int, Q: int) -> list[list[np.ndarray]]:
    """Partition payloads into I x Q cells by tag (multiset-preserving)."""
    envelopes.check_bounds(I, Q)
    order = np.argsort(envelopes.tags, kind="stable")
    sorted_tags = envelopes.tags[order]
    sorted_payloads = envelopes.payloads[order]
    counts = np.bincount(sorted_tags, minlength=I * Q)
    bounds = np.cumsum(counts)[:-1]
    flat_cells = np.split(sorted_payloads, bounds)
    return [[flat_cells[i * Q + j] for j in range(Q)] for i in range(I)]


def meter(per_user: list[Envelopes], I: int, Q: int) -> TranscriptMeter:
    """Observe the pre-shuffle leg: per-user counts and exact bit totals."""
    counts = np.array([len(env) for env in per_user], dtype=np.int64)
    for env in per_user:
        env.check_bounds(I, Q)
    return TranscriptMeter(counts, bits_per_message(I, Q))


def dump_transcript(envelopes: Envelopes, path):
    """Audit dump, one line per envelope in post-shuffle order:
    ``tag_index,payload_bit`` with +1 encoded as 1 and -1 as 0."""
    with open(path, "w", encoding="utf-8") as fh:
        for tag, payload in zip(envelopes.tags, envelopes.payloads):
            fh.write(f"{int(tag)},{1 if payload > 0 else 0}\n")
