"""Locality-sensitive quantization (LSQ) families.

An LSQ family for a kernel k is a distribution over function pairs
(f, g) mapping R^d into [-R, R]^Q with at most S non-zero coordinates,
such that E[f(x)^T g(y)] approximates k(x, y) up to an additive slack
beta. Three families are provided, all with beta = 0:

* ``gaussian``     -- random Fourier features for k(x,y) = exp(-||x-y||^2),
                      parameters (Q, R, S) = (1, sqrt(2), 1);
* ``ip-signed``    -- random-sign sketch for k(x,y) = x^T y on unit
                      vectors, parameters (1, sqrt(d), 1);
* ``ip-identity``  -- the identity map for x^T y, parameters (d, 1, d).

Inputs are required to be unit vectors (the datasets this library
targets are unit-normalized embeddings); the kernel bandwidth is fixed
at 1 and not exposed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParam, NonUnitInput

__all__ = [
    "KERNEL_GAUSSIAN",
    "KERNEL_IP_SIGNED",
    "KERNEL_IP_IDENTITY",
    "KERNELS",
    "LsqSpec",
    "PairSet",
    "sample_pair",
    "sample_pairs",
    "eval_f",
    "eval_g",
    "kernel_exact",
    "kde_exact",
    "check_unit",
]

KERNEL_GAUSSIAN = "gaussian"
KERNEL_IP_SIGNED = "ip-signed"
KERNEL_IP_IDENTITY = "ip-identity"
KERNELS = (KERNEL_GAUSSIAN, KERNEL_IP_SIGNED, KERNEL_IP_IDENTITY)

UNIT_NORM_TOL = 1e-6


def check_unit(x: np.ndarray, tol: float = UNIT_NORM_TOL) -> np.ndarray:
    """Validate that x (a vector or a matrix of row vectors) is unit-length.

    Rejects rather than renormalizes, so that ingestion bugs surface
    instead of being silently masked. Returns the input as float64.
    """
    x = np.asarray(x, dtype=np.float64)
    norms = np.linalg.norm(x, axis=-1)
    err = np.max(np.abs(norms - 1.0)) if norms.size else 0.0
    if err > tol:
        raise NonUnitInput(f"input norm deviates from 1 by {err:.3g} (tolerance {tol:g})")
    return x


@dataclass(frozen=True)
class LsqSpec:
    """A kernel's LSQ family: kernel kind and ambient dimension.

    The family parameters (Q, R, S, beta) are fixed by the kernel kind
    and exposed as read-only properties, so the defining invariants hold
    by construction.
    """

    kernel: str
    dim: int

    def __post_init__(self):
        if self.kernel not in KERNELS:
            raise InvalidParam(f"unknown kernel {self.kernel!r}, expected one of {KERNELS}")
        if int(self.dim) < 1:
            raise InvalidParam(f"dim must be a positive integer, got {self.dim}")
        object.__setattr__(self, "dim", int(self.dim))

    @property
    def q(self) -> int:
        return self.dim if self.kernel == KERNEL_IP_IDENTITY else 1

    @property
    def r(self) -> float:
        if self.kernel == KERNEL_GAUSSIAN:
            return math.sqrt(2.0)
        if self.kernel == KERNEL_IP_SIGNED:
            return math.sqrt(self.dim)
        return 1.0

    @property
    def s(self) -> int:
        return self.dim if self.kernel == KERNEL_IP_IDENTITY else 1

    @property
    def beta(self) -> float:
        return 0.0


class PairSet:
    """A batch of sampled (f, g) pairs from one LSQ family.

    For all three families g is the same map as f. The batch form is the
    primary representation: protocol executions evaluate many pairs on
    many points at once. ``pair(i)`` gives a single-pair view.
    """

    def __init__(self, spec: LsqSpec, count: int, omegas=None, phases=None, signs=None):
        if count < 1:
            raise InvalidParam("pair count must be >= 1")
        self.spec = spec
        self.count = int(count)
        self.omegas = omegas  # (count, d) for gaussian
        self.phases = phases  # (count,)   for gaussian
        self.signs = signs    # (count, d) for ip-signed
        if spec.kernel == KERNEL_GAUSSIAN:
            assert omegas is not None and phases is not None
            assert omegas.shape == (count, spec.dim) and phases.shape == (count,)
        elif spec.kernel == KERNEL_IP_SIGNED:
            assert signs is not None and signs.shape == (count, spec.dim)

    @classmethod
    def sample(cls, spec: LsqSpec, count: int, rng: np.random.Generator) -> "PairSet":
        """Draw ``count`` independent pairs using the supplied (public) stream."""
        if spec.kernel == KERNEL_GAUSSIAN:
            omegas = rng.standard_normal((count, spec.dim))
            phases = rng.uniform(0.0, 2.0 * np.pi, count)
            return cls(spec, count, omegas=omegas, phases=phases)
        if spec.kernel == KERNEL_IP_SIGNED:
            signs = rng.integers(0, 2, (count, spec.dim)) * 2.0 - 1.0
            return cls(spec, count, signs=signs)
        return cls(spec, count)  # identity family has no randomness

    def pair(self, i: int) -> "PairSet":
        """Single-pair view (a PairSet of count 1)."""
        if not 0 <= i < self.count:
            raise IndexError(i)
        if self.spec.kernel == KERNEL_GAUSSIAN:
            return PairSet(self.spec, 1, omegas=self.omegas[i : i + 1],
                           phases=self.phases[i : i + 1])
        if self.spec.kernel == KERNEL_IP_SIGNED:
            return PairSet(self.spec, 1, signs=self.signs[i : i + 1])
        return PairSet(self.spec, 1)

    def features(self, X: np.ndarray) -> np.ndarray:
        """Evaluate f on each row of X: returns (n_points, count, Q).

        Every entry lies in [-R, R]; rows of the identity family carry
        up to S = d non-zeros, the other families exactly one coordinate.
        """
        X = check_unit(np.atleast_2d(X))
        if X.shape[1] != self.spec.dim:
            raise InvalidParam(f"points have dim {X.shape[1]}, spec has dim {self.spec.dim}")
        if self.spec.kernel == KERNEL_GAUSSIAN:
            # f(x) = sqrt(2) * cos(sqrt(2) w^T x + phase); E[f(x) g(y)] = exp(-||x-y||^2)
            proj = math.sqrt(2.0) * X @ self.omegas.T + self.phases[None, :]
            return (math.sqrt(2.0) * np.cos(proj))[:, :, None]
        if self.spec.kernel == KERNEL_IP_SIGNED:
            return (X @ self.signs.T)[:, :, None]
        return np.broadcast_to(X[:, None, :], (X.shape[0], self.count, self.spec.dim)).copy()

    def to_params(self) -> dict:
        """JSON-friendly explicit parameters (alternative to a seed identifier)."""
        if self.spec.kernel == KERNEL_GAUSSIAN:
            return {"omegas": self.omegas.tolist(), "phases": self.phases.tolist()}
        if self.spec.kernel == KERNEL_IP_SIGNED:
            return {"signs": self.signs.tolist()}
        return {}

    @classmethod
    def from_params(cls, spec: LsqSpec, count: int, params: dict) -> "PairSet":
        if spec.kernel == KERNEL_GAUSSIAN:
            return cls(spec, count,
                       omegas=np.asarray(params["omegas"], dtype=np.float64),
                       phases=np.asarray(params["phases"], dtype=np.float64))
        if spec.kernel == KERNEL_IP_SIGNED:
            return cls(spec, count, signs=np.asarray(params["signs"], dtype=np.float64))
        return cls(spec, count)

    def __eq__(self, other):
        if not isinstance(other, PairSet) or self.spec != other.spec or self.count != other.count:
            return False
        for a, b in ((self.omegas, other.omegas), (self.phases, other.phases),
                     (self.signs, other.signs)):
            if (a is None) != (b is None):
                return False
            if a is not None and not np.array_equal(a, b):
                return False
        return True


def sample_pairs(spec: LsqSpec, count: int, rng: np.random.Generator) -> PairSet:
    return PairSet.sample(spec, count, rng)


def sample_pair(spec: LsqSpec, rng: np.random.Generator) -> PairSet:
    """One independent (f, g) pair drawn from the public stream."""
    return PairSet.sample(spec, 1, rng)


def eval_f(pair: PairSet, x: np.ndarray) -> np.ndarray:
    """f evaluated at a single unit vector; shape (count, Q)."""
    return pair.features(np.atleast_2d(x))[0]


def eval_g(pair: PairSet, y: np.ndarray) -> np.ndarray:
    """g evaluated at a single unit vector; g is the same map as f."""
    return eval_f(pair, y)


def kernel_exact(kernel: str, x: np.ndarray, y: np.ndarray) -> float:
    """Exact kernel value; the oracle for tests and the non-private baseline."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if kernel == KERNEL_GAUSSIAN:
        diff = x - y
        return float(np.exp(-np.dot(diff, diff)))
    if kernel in (KERNEL_IP_SIGNED, KERNEL_IP_IDENTITY):
        return float(np.dot(x, y))
    raise InvalidParam(f"unknown kernel {kernel!r}")


def kde_exact(kernel: str, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Brute-force KDE of dataset X at each query row of Y."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    Y = np.atleast_2d(np.asarray(Y, dtype=np.float64))
    if kernel == KERNEL_GAUSSIAN:
        sq = (
            np.sum(X * X, axis=1)[:, None]
            + np.sum(Y * Y, axis=1)[None, :]
            - 2.0 * X @ Y.T
        )
        return np.exp(-np.maximum(sq, 0.0)).mean(axis=0)
    if kernel in (KERNEL_IP_SIGNED, KERNEL_IP_IDENTITY):
        return (X @ Y.T).mean(axis=0)
    raise InvalidParam(f"unknown kernel {kernel!r}")
