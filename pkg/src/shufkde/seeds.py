"""Deterministic seed derivation for domain-separated randomness streams.

All randomness in the library flows from numpy Generators. Public
randomness (LSQ pair sampling) is identified by a single integer seed so
that a released model can name the stream that reproduces its pairs.
Derived seeds mix a parent seed with string/integer tags through
SeedSequence, which is stable across runs and platforms.
"""

from __future__ import annotations

import numpy as np

__all__ = ["derive_seed", "rng_from"]


def _tag_to_ints(tag) -> list[int]:
    if isinstance(tag, str):
        return list(tag.encode("utf-8"))
    if isinstance(tag, (int, np.integer)):
        return [int(tag)]
    raise TypeError(f"unsupported seed tag {tag!r}")


def derive_seed(base: int, *tags) -> int:
    """Mix ``base`` and tags into a new 64-bit seed, deterministically."""
    entropy = [int(base)]
    for tag in tags:
        entropy.extend(_tag_to_ints(tag))
    words = np.random.SeedSequence(entropy).generate_state(2, dtype=np.uint32)
    return int(words[0]) << 32 | int(words[1])


def rng_from(base: int, *tags) -> np.random.Generator:
    """Generator seeded by ``derive_seed(base, *tags)``."""
    return np.random.default_rng(derive_seed(base, *tags))
