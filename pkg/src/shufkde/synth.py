"""Synthetic spherical-mixture datasets for desk-scale experiments."""

from __future__ import annotations

import math

import numpy as np

from .datafiles import LabeledDataset
from .errors import InfeasibleSeparation, InvalidParam

__all__ = ["sample_centers", "gen_synthetic"]

_MAX_ATTEMPTS = 10_000


def sample_centers(m: int, dim: int, separation: float,
                   rng: np.random.Generator) -> np.ndarray:
    """m centers uniform on the unit sphere with pairwise angle >= separation.

    Whole-tuple rejection sampling keeps the conditional-uniform law;
    gives up after 10^4 attempts.
    """
    if m < 1 or dim < 2:
        raise InvalidParam("need m >= 1 and dim >= 2")
    if separation < 0:
        raise InvalidParam("separation must be nonnegative")
    max_dot = math.cos(separation)
    for _ in range(_MAX_ATTEMPTS):
        centers = rng.standard_normal((m, dim))
        centers /= np.linalg.norm(centers, axis=1, keepdims=True)
        dots = centers @ centers.T
        np.fill_diagonal(dots, -1.0)
        if np.all(dots <= max_dot):
            return centers
    raise InfeasibleSeparation(
        f"could not place {m} centers at pairwise angle >= {separation:g} rad "
        f"in dimension {dim} within {_MAX_ATTEMPTS} attempts"
    )


def gen_synthetic(m: int, per_class: int, dim: int, separation: float,
                  noise: float, rng: np.random.Generator,
                  ) -> tuple[LabeledDataset, np.ndarray]:
    """Spherical Gaussian mixture, rows normalized to unit length.

    Returns the dataset and the class centers (useful as planted targets
    in decoding experiments).
    """
    if per_class < 1:
        raise InvalidParam("per_class must be >= 1")
    if noise < 0:
        raise InvalidParam("noise must be nonnegative")
    centers = sample_centers(m, dim, separation, rng)
    points = np.repeat(centers, per_class, axis=0)
    points = points + noise * rng.standard_normal(points.shape)
    norms = np.linalg.norm(points, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise InfeasibleSeparation("degenerate zero-norm sample; retry with another seed")
    points /= norms
    labels = np.repeat(np.arange(m, dtype=np.int64), per_class)
    return LabeledDataset(points, labels, m), centers
