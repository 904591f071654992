"""The shuffled-DP KDE protocol: init, randomizer, analyzer, query.

Public initialization samples I (f, g) pairs from an LSQ family using
public randomness and declares one bitsum instance per (i, j) in
[I] x [Q]. Each user Bernoulli-rounds her feature coordinates from
[-R, R] to {-R, R} (b_ij ~ Bernoulli((1 + f_i(x)_j / R)/2)), feeds each
bit to the matching bitsum randomizer, and tags the payloads with
(i, j). The analyzer routes the shuffled payloads, runs the bitsum
analyzers, and publishes F_ij = (2*B_ij - n)*R. A query y evaluates
(1/(nI)) * sum_ij F_ij * g_i(y)_j, which is pure post-processing and can
run arbitrarily many times.

Two execution paths are provided: a message-level path that simulates
every envelope through the shuffler (used for metering and audits), and
a vectorized path that samples the analyzer estimates directly from the
bit matrix, identical in distribution (and exactly equal for the exact
variant given the same bit draws).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import bitsum as bs
from .errors import InvalidParam, UserCountMismatch
from .lsq import LsqSpec, PairSet, check_unit, kde_exact
from .seeds import derive_seed, rng_from
from .shuffler import Envelopes, TranscriptMeter, meter, route, shuffle

__all__ = [
    "ProtocolInit",
    "ReleasedModel",
    "SupRmseReport",
    "init_protocol",
    "user_randomize",
    "analyze",
    "query",
    "query_batch",
    "suprmse_formula",
    "bound_suprmse",
    "run_protocol",
    "empirical_suprmse",
]


@dataclass
class ProtocolInit:
    """Published initialization: pairs, instance grid and declared n.

    The declared user count is fixed here; a mismatch with the actual
    number of senders is a hard error, not a silent degradation.
    """

    spec: LsqSpec
    I: int
    n: int
    bitsum_cfg: bs.BitsumConfig
    pairs: PairSet
    public_seed: int | None = None

    def __post_init__(self):
        if self.pairs.count != self.I:
            raise InvalidParam(f"need {self.I} pairs, got {self.pairs.count}")
        if self.pairs.spec != self.spec:
            raise InvalidParam("pair spec does not match protocol spec")
        if self.bitsum_cfg.n != self.n:
            raise InvalidParam(
                f"bitsum config declares n={self.bitsum_cfg.n}, protocol n={self.n}"
            )

    @property
    def Q(self) -> int:
        return self.spec.q


@dataclass
class ReleasedModel:
    """The analyzer's published output: the DP function description.

    Contains only F (the I x Q analyzer outputs), n, the LSQ spec and the
    public-randomness identifier -- no per-user values. Pairs are
    reproduced lazily from the seed when querying.
    """

    spec: LsqSpec
    n: int
    I: int
    f_tilde: np.ndarray
    public_seed: int | None = None
    pairs: PairSet | None = field(default=None, repr=False)

    def __post_init__(self):
        self.f_tilde = np.asarray(self.f_tilde, dtype=np.float64)
        if self.f_tilde.shape != (self.I, self.spec.q):
            raise InvalidParam(
                f"F matrix must have shape ({self.I}, {self.spec.q}), got {self.f_tilde.shape}"
            )
        if not np.all(np.isfinite(self.f_tilde)):
            raise InvalidParam("F matrix entries must be finite")
        if self.public_seed is None and self.pairs is None:
            raise InvalidParam("model needs a public seed or explicit pair parameters")

    def resolve_pairs(self) -> PairSet:
        if self.pairs is None:
            self.pairs = PairSet.sample(
                self.spec, self.I, np.random.default_rng(self.public_seed)
            )
        return self.pairs


def init_protocol(spec: LsqSpec, I: int, n: int, bitsum_cfg: bs.BitsumConfig,
                  public_seed: int | None = None,
                  pairs: PairSet | None = None) -> ProtocolInit:
    """Sample the public initialization (pairs from the public seed)."""
    if I < 1:
        raise InvalidParam("I must be >= 1")
    if pairs is None:
        if public_seed is None:
            raise InvalidParam("init needs a public seed or explicit pairs")
        pairs = PairSet.sample(spec, I, np.random.default_rng(public_seed))
    return ProtocolInit(spec, I, n, bitsum_cfg, pairs, public_seed)


def _bit_probs(init: ProtocolInit, X: np.ndarray) -> np.ndarray:
    """Bernoulli parameters (1 + f_i(x)_j / R)/2, shape (n_points, I, Q)."""
    feats = init.pairs.features(X)
    return np.clip(0.5 * (1.0 + feats / init.spec.r), 0.0, 1.0)


def user_randomize(init: ProtocolInit, x: np.ndarray,
                   rng: np.random.Generator) -> Envelopes:
    """One user's envelopes: every (i, j) cell is visited, including zero
    coordinates (which round via Bernoulli(1/2)), so participation
    patterns leak nothing and the bitsum n-count premise holds."""
    probs = _bit_probs(init, np.atleast_2d(x))[0]  # (I, Q)
    bits = (rng.random(probs.shape) < probs).astype(np.int64)
    cell_idx, payloads = bs.randomize_bit_vector(init.bitsum_cfg, bits.ravel(), rng)
    return Envelopes(cell_idx, payloads)


def analyze(init: ProtocolInit, cells: list[list[np.ndarray]],
            rng: np.random.Generator | None = None) -> ReleasedModel:
    """Run the bitsum analyzers per cell and publish F = (2*B - n)*R."""
    I, Q = init.I, init.Q
    b_tilde = np.empty((I, Q), dtype=np.float64)
    for i in range(I):
        for j in range(Q):
            b_tilde[i, j] = bs.analyze(init.bitsum_cfg, cells[i][j], rng)
    f_tilde = (2.0 * b_tilde - init.n) * init.spec.r
    return ReleasedModel(init.spec, init.n, I, f_tilde, init.public_seed, init.pairs)


def query_batch(model: ReleasedModel, Y: np.ndarray) -> np.ndarray:
    """KDE estimates at each query row: (1/(nI)) sum_ij F_ij g_i(y)_j."""
    pairs = model.resolve_pairs()
    g = pairs.features(np.atleast_2d(Y))  # (k, I, Q)
    return np.einsum("kiq,iq->k", g, model.f_tilde) / (model.n * model.I)


def query(model: ReleasedModel, y: np.ndarray) -> float:
    return float(query_batch(model, np.atleast_2d(y))[0])


def suprmse_formula(beta: float, r: float, s: int, I: int, err_pi: float,
                    n: int) -> float:
    """supRMSE upper bound sqrt(4*beta^2 + 16*R^4*S*(S + (E/n)^2)/I)."""
    if I < 1 or n < 1 or err_pi < 0:
        raise InvalidParam("need I >= 1, n >= 1, err_pi >= 0")
    return float(np.sqrt(
        4.0 * beta**2 + 16.0 * r**4 * s * (s + (err_pi / n) ** 2) / I
    ))


def bound_suprmse(spec: LsqSpec, I: int, err_pi: float, n: int) -> float:
    """The supRMSE bound evaluated at a family's (beta, R, S)."""
    return suprmse_formula(spec.beta, spec.r, spec.s, I, err_pi, n)


def run_protocol(init: ProtocolInit, X: np.ndarray, rng: np.random.Generator,
                 message_level: bool = False,
                 ) -> tuple[ReleasedModel, TranscriptMeter | None]:
    """Execute the full protocol on dataset X (one row per user).

    The message-level path simulates every envelope (and returns the
    communication meter); the default path samples the analyzer
    estimates directly from the bit matrix.
    """
    X = check_unit(np.atleast_2d(X))
    if X.shape[0] != init.n:
        raise UserCountMismatch(
            f"protocol declared n={init.n} users but {X.shape[0]} sent data"
        )
    if message_level:
        per_user = [user_randomize(init, X[u], rng) for u in range(init.n)]
        meter_result = meter(per_user, init.I, init.Q)
        shuffled = shuffle(Envelopes.concat(per_user), rng)
        cells = route(shuffled, init.I, init.Q)
        return analyze(init, cells, rng), meter_result

    probs = _bit_probs(init, X)  # (n, I, Q)
    bits = (rng.random(probs.shape) < probs).astype(np.int64)
    est = bs.estimate_from_bits(init.bitsum_cfg, bits.reshape(init.n, -1), rng)
    f_tilde = ((2.0 * est - init.n) * init.spec.r).reshape(init.I, init.Q)
    model = ReleasedModel(init.spec, init.n, init.I, f_tilde,
                          init.public_seed, init.pairs)
    return model, None


@dataclass
class SupRmseReport:
    """Per-query RMSE over repeated executions against the exact KDE."""

    per_query: np.ndarray
    trials: int

    @property
    def max_rmse(self) -> float:
        return float(np.max(self.per_query))

    @property
    def mean_rmse(self) -> float:
        return float(np.mean(self.per_query))


def empirical_suprmse(spec: LsqSpec, I: int, bitsum_cfg: bs.BitsumConfig,
                      X: np.ndarray, queries: np.ndarray, trials: int,
                      seed: int, message_level: bool = False) -> SupRmseReport:
    """RMSE per query over ``trials`` independent protocol executions.

    Each trial draws fresh public randomness (pairs) and private
    randomness, all derived from ``seed``.
    """
    if trials < 1:
        raise InvalidParam("trials must be >= 1")
    X = check_unit(np.atleast_2d(X))
    queries = check_unit(np.atleast_2d(queries))
    exact = kde_exact(spec.kernel, X, queries)
    errs = np.empty((trials, queries.shape[0]), dtype=np.float64)
    for t in range(trials):
        public_seed = derive_seed(seed, "public", t)
        init = init_protocol(spec, I, X.shape[0], bitsum_cfg, public_seed)
        model, _ = run_protocol(init, X, rng_from(seed, "private", t),
                                message_level=message_level)
        errs[t] = query_batch(model, queries) - exact
    per_query = np.sqrt(np.mean(errs**2, axis=0))
    return SupRmseReport(per_query, trials)
