"""Shuffled-DP bitsum protocols behind a common interface.

A bitsum protocol estimates S = sum of n private bits. Four variants:

* ``exact``            -- no privacy; one +/-1 payload per user, exact count.
* ``rr``               -- randomized response: each user flips her bit with
                          probability p_RR before sending; the analyzer
                          debiases the raw count.
* ``3nb``              -- correlated negative-binomial noise: each user
                          sends (b + psi1 + psi3) copies of +1 and
                          (psi2 + psi3) copies of -1, with psi1, psi2 from
                          NB(r, p) and psi3 from NB(r', p'); the analyzer
                          takes the signed sum.
* ``central-gaussian`` -- baseline, not a shuffled protocol: the exact
                          count plus Gaussian noise calibrated to
                          (eps0, delta0), for apples-to-apples comparison
                          under identical composition accounting.

Payloads are single bits on the wire (+1 encoded as 1, -1 as 0).

The negative binomial here uses the "number of extra events" convention:
NB(r, p) has mass P(k) proportional to C(k+r-1, k) (1-p)^r p^k, mean
r p/(1-p) and variance r p/(1-p)^2, so p = e^(-0.99 eps0) yields small
noise for large eps0. Non-integer r is supported exactly through the
Gamma-Poisson mixture.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateConfig, InvalidParam

__all__ = [
    "VARIANT_EXACT",
    "VARIANT_RR",
    "VARIANT_3NB",
    "VARIANT_CENTRAL_GAUSSIAN",
    "VARIANTS",
    "BitsumConfig",
    "sample_negative_binomial",
    "randomize_bit",
    "randomize_bit_vector",
    "analyze",
    "rmse_theoretical",
    "estimate_from_bits",
    "expected_messages_per_bit",
    "encode_payloads",
    "decode_payloads",
]

VARIANT_EXACT = "exact"
VARIANT_RR = "rr"
VARIANT_3NB = "3nb"
VARIANT_CENTRAL_GAUSSIAN = "central-gaussian"
VARIANTS = (VARIANT_EXACT, VARIANT_RR, VARIANT_3NB, VARIANT_CENTRAL_GAUSSIAN)

_PRIVATE_VARIANTS = (VARIANT_RR, VARIANT_3NB, VARIANT_CENTRAL_GAUSSIAN)


@dataclass(frozen=True)
class BitsumConfig:
    """One protocol instance: variant, user count and per-instance budget.

    ``p_rr`` overrides the derived flip probability; the default follows
    the blanket-noise analysis lineage and should be treated as a
    calibration stand-in, not a tight constant. ``three_nb_c`` is the
    order-one constant in the 3NB p' exponent; it affects only noise
    magnitude. ``rr_debias=False`` retains the raw-sum analyzer for
    comparison experiments.
    """

    variant: str
    n: int
    eps0: float | None = None
    delta0: float | None = None
    p_rr: float | None = None
    three_nb_c: float = 0.2
    rr_debias: bool = True

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise InvalidParam(f"unknown bitsum variant {self.variant!r}")
        if int(self.n) < 1:
            raise InvalidParam(f"user count must be >= 1, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if self.variant in _PRIVATE_VARIANTS and self.p_rr is None:
            if self.eps0 is None or self.eps0 <= 0:
                raise InvalidParam(f"{self.variant} requires eps0 > 0")
            if self.delta0 is None or not 0.0 < self.delta0 < 1.0:
                raise InvalidParam(f"{self.variant} requires delta0 in (0, 1)")
        if self.p_rr is not None and not 0.0 <= self.p_rr < 0.5:
            raise DegenerateConfig(f"p_rr must lie in [0, 1/2), got {self.p_rr}")

    @property
    def flip_prob(self) -> float:
        """RR flip probability: the override, else min(0.49, lam/(2n)) with
        lam = (64/eps0^2) ln(4/delta0)."""
        if self.p_rr is not None:
            return self.p_rr
        lam = (64.0 / self.eps0**2) * math.log(4.0 / self.delta0)
        p = lam / (2.0 * self.n)
        if p >= 0.5:
            raise DegenerateConfig(
                f"RR flip probability {p:.4g} >= 1/2: n={self.n} too small for "
                f"eps0={self.eps0:.4g}, delta0={self.delta0:.3g}"
            )
        return min(0.49, p)

    @property
    def nb_params(self) -> tuple[float, float, float, float]:
        """3NB parameters (r, p, r', p')."""
        r = 1.0 / self.n
        p = math.exp(-0.99 * self.eps0)
        r_prime = 3.0 * (1.0 + math.log(2.0 * math.exp(0.99 * self.eps0) / self.delta0))
        p_prime = math.exp(
            -self.three_nb_c * self.eps0 / (self.eps0 + math.log(1.0 / self.delta0))
        )
        if not (r > 0 and r_prime > 0 and 0 < p < 1 and 0 < p_prime < 1):
            raise DegenerateConfig(
                f"3NB parameters out of range: r={r}, p={p}, r'={r_prime}, p'={p_prime}"
            )
        return r, p, r_prime, p_prime

    @property
    def gaussian_sigma(self) -> float:
        return math.sqrt(2.0 * math.log(1.25 / self.delta0)) / self.eps0


def sample_negative_binomial(r: float, p: float, rng: np.random.Generator, size=None):
    """NB(r, p) sample(s) via the Gamma-Poisson mixture (exact for real r > 0)."""
    if r <= 0:
        raise InvalidParam(f"NB shape r must be > 0, got {r}")
    if not 0.0 < p < 1.0:
        raise InvalidParam(f"NB parameter p must lie in (0, 1), got {p}")
    lam = rng.gamma(r, p / (1.0 - p), size)
    return rng.poisson(lam)


def randomize_bit_vector(cfg: BitsumConfig, bits: np.ndarray, rng: np.random.Generator):
    """Run the randomizer of ``cfg`` on a vector of k bits (one user, k instances).

    Returns (cell_indices, payloads): the flat instance index of each
    emitted payload and the payload values in {-1, +1} (int8).
    """
    bits = np.asarray(bits, dtype=np.int64).ravel()
    if bits.size and (bits.min() < 0 or bits.max() > 1):
        raise InvalidParam("bits must lie in {0, 1}")
    k = bits.size
    idx = np.arange(k, dtype=np.int64)

    if cfg.variant in (VARIANT_EXACT, VARIANT_CENTRAL_GAUSSIAN):
        return idx, (2 * bits - 1).astype(np.int8)

    if cfg.variant == VARIANT_RR:
        p = cfg.flip_prob
        flips = rng.random(k) < p
        sent = np.bitwise_xor(bits, flips.astype(np.int64))
        return idx, (2 * sent - 1).astype(np.int8)

    # 3NB: (b + psi1 + psi3) plus-payloads and (psi2 + psi3) minus-payloads.
    r, p, r_prime, p_prime = cfg.nb_params
    psi1 = sample_negative_binomial(r, p, rng, k)
    psi2 = sample_negative_binomial(r, p, rng, k)
    psi3 = sample_negative_binomial(r_prime, p_prime, rng, k)
    n_plus = bits + psi1 + psi3
    n_minus = psi2 + psi3
    cell_idx = np.concatenate([np.repeat(idx, n_plus), np.repeat(idx, n_minus)])
    payloads = np.concatenate(
        [np.ones(int(n_plus.sum()), dtype=np.int8), -np.ones(int(n_minus.sum()), dtype=np.int8)]
    )
    return cell_idx, payloads


def randomize_bit(cfg: BitsumConfig, b: int, rng: np.random.Generator) -> np.ndarray:
    """Payloads one user emits for a single bit; array over {-1, +1}."""
    _, payloads = randomize_bit_vector(cfg, np.array([b]), rng)
    return payloads


def analyze(cfg: BitsumConfig, payloads, rng: np.random.Generator | None = None) -> float:
    """Estimate of the true bit sum S from one instance's payload multiset.

    The central-Gaussian baseline adds its noise here (the analyzer is
    the trusted curator in that model) and therefore needs ``rng``.
    """
    payloads = np.asarray(payloads, dtype=np.int64).ravel()
    plus = int(np.count_nonzero(payloads == 1))

    if cfg.variant == VARIANT_EXACT:
        return float(plus)
    if cfg.variant == VARIANT_RR:
        p = cfg.flip_prob
        if not cfg.rr_debias:
            return float(plus)
        return (plus - cfg.n * p) / (1.0 - 2.0 * p)
    if cfg.variant == VARIANT_3NB:
        # Signed sum: psi3 pairs cancel exactly, psi1 vs psi2 cancel in
        # expectation, so E[sum] = S with no debias constant.
        return float(payloads.sum())
    if rng is None:
        raise InvalidParam("central-gaussian analyze needs an rng for its noise")
    return plus + rng.normal(0.0, cfg.gaussian_sigma)


def rmse_theoretical(cfg: BitsumConfig) -> float:
    """Closed-form RMSE of the estimate.

    For 3NB this is the standard deviation of the aggregate injected
    noise sum(psi1 - psi2): the psi3 payload pairs cancel exactly in the
    signed sum and contribute no estimator variance (they only pad the
    message counts).
    """
    if cfg.variant == VARIANT_EXACT:
        return 0.0
    if cfg.variant == VARIANT_CENTRAL_GAUSSIAN:
        return cfg.gaussian_sigma
    if cfg.variant == VARIANT_RR:
        p = cfg.flip_prob
        return math.sqrt(cfg.n * p * (1.0 - p)) / (1.0 - 2.0 * p)
    r, p, _, _ = cfg.nb_params
    return math.sqrt(cfg.n * 2.0 * r * p / (1.0 - p) ** 2)


def estimate_from_bits(cfg: BitsumConfig, bits: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Sample the analyzer estimates directly from a bit matrix.

    ``bits`` has shape (n, k): n users, k independent protocol instances.
    Distributionally identical to randomizing every user's payloads,
    shuffling, routing and analyzing (the aggregate 3NB noise uses the
    infinite divisibility of NB in its shape parameter). Exact variant
    output equals the message-level pipeline bit for bit.
    """
    bits = np.asarray(bits, dtype=np.int64)
    if bits.ndim != 2 or bits.shape[0] != cfg.n:
        raise InvalidParam(f"bits must have shape (n={cfg.n}, k), got {bits.shape}")
    sums = bits.sum(axis=0).astype(np.float64)
    k = bits.shape[1]

    if cfg.variant == VARIANT_EXACT:
        return sums
    if cfg.variant == VARIANT_RR:
        p = cfg.flip_prob
        flips = rng.random(bits.shape) < p
        raw = np.bitwise_xor(bits, flips.astype(np.int64)).sum(axis=0).astype(np.float64)
        if not cfg.rr_debias:
            return raw
        return (raw - cfg.n * p) / (1.0 - 2.0 * p)
    if cfg.variant == VARIANT_3NB:
        r, p, _, _ = cfg.nb_params
        noise_up = sample_negative_binomial(cfg.n * r, p, rng, k)
        noise_down = sample_negative_binomial(cfg.n * r, p, rng, k)
        return sums + noise_up - noise_down
    return sums + rng.normal(0.0, cfg.gaussian_sigma, k)


def expected_messages_per_bit(cfg: BitsumConfig, mean_bit: float = 1.0) -> float:
    """Analytic expected message count per user per instance.

    Exact/RR/central-Gaussian always send exactly one payload. A 3NB user
    sends b + psi1 + psi2 + 2 psi3 payloads, so the expectation follows
    from the NB means.
    """
    if cfg.variant != VARIANT_3NB:
        return 1.0
    r, p, r_prime, p_prime = cfg.nb_params
    return mean_bit + 2.0 * r * p / (1.0 - p) + 2.0 * r_prime * p_prime / (1.0 - p_prime)


def encode_payloads(payloads: np.ndarray) -> np.ndarray:
    """Wire encoding: one bit per payload, +1 -> 1, -1 -> 0."""
    payloads = np.asarray(payloads)
    return (payloads > 0).astype(np.uint8)


def decode_payloads(bits: np.ndarray) -> np.ndarray:
    bits = np.asarray(bits)
    return np.where(bits > 0, 1, -1).astype(np.int8)
