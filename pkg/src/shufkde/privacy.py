"""Privacy accounting for the composed KDE protocol.

The protocol runs I*Q bitsum instances; removing one user changes the
inputs of at most S instances per repetition, so each repetition is an
(eps0*S, delta0*S)-DP mechanism and the I repetitions compose. Two
composition modes:

* ``advanced``: eps = eps0*S*(e^(eps0*S) - 1)*I + eps0*S*sqrt(2*I*ln(1/delta'))
                delta = I*S*delta0 + delta'
* ``pure``:     eps = I*S*eps0, delta = 0 (for pure bitsum protocols).

Forward composition, the delta-budget split and the inverse solve for
the per-instance eps0 live here. Label randomized response adds its own
eps_lbl on top in the communication-threat model only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import Infeasible, InvalidParam

__all__ = [
    "MODE_ADVANCED",
    "MODE_PURE",
    "BudgetSpec",
    "PerInstanceBudget",
    "compose",
    "solve_per_instance",
    "label_keep_probability",
    "threat_model_totals",
    "total_budget_report",
]

MODE_ADVANCED = "advanced"
MODE_PURE = "pure"

_BISECT_HI = 100.0
_BISECT_ITERS = 200
_EPS_REL_TOL = 1e-9


@dataclass(frozen=True)
class BudgetSpec:
    """Target privacy budget for one protocol execution."""

    target_eps: float
    target_delta: float
    mode: str = MODE_ADVANCED
    eps_label: float = 0.0
    split: float = 0.5  # fraction of target_delta allotted to delta'

    def __post_init__(self):
        if self.mode not in (MODE_ADVANCED, MODE_PURE):
            raise InvalidParam(f"unknown composition mode {self.mode!r}")
        if self.target_eps <= 0:
            raise InvalidParam("target_eps must be positive")
        if self.mode == MODE_ADVANCED and not 0.0 < self.target_delta < 1.0:
            raise InvalidParam("advanced mode requires target_delta in (0, 1)")
        if self.mode == MODE_PURE and self.target_delta != 0.0:
            raise InvalidParam("pure mode requires target_delta = 0")
        if self.eps_label < 0:
            raise InvalidParam("eps_label must be nonnegative")
        if self.mode == MODE_ADVANCED and not 0.0 < self.split < 1.0:
            raise InvalidParam("split must lie in (0, 1)")


@dataclass(frozen=True)
class PerInstanceBudget:
    eps0: float
    delta0: float
    delta_prime: float


def compose(eps0: float, delta0: float, s: int, i: int, delta_prime: float,
            mode: str = MODE_ADVANCED) -> tuple[float, float]:
    """Forward composition of I repetitions of an (eps0*S, delta0*S) mechanism."""
    if eps0 <= 0 or s < 1 or i < 1:
        raise InvalidParam("compose needs eps0 > 0 and S, I >= 1")
    if mode == MODE_PURE:
        return i * s * eps0, 0.0
    if mode != MODE_ADVANCED:
        raise InvalidParam(f"unknown composition mode {mode!r}")
    if not 0.0 < delta_prime < 1.0:
        raise InvalidParam(f"delta' must lie in (0, 1), got {delta_prime}")
    if delta0 < 0:
        raise InvalidParam("delta0 must be nonnegative")
    es = eps0 * s
    # expm1 overflows past ~709; the composed eps is effectively infinite there
    growth = math.expm1(es) if es < 700.0 else math.inf
    eps = es * growth * i + es * math.sqrt(2.0 * i * math.log(1.0 / delta_prime))
    delta = i * s * delta0 + delta_prime
    return eps, delta


def solve_per_instance(budget: BudgetSpec, s: int, i: int) -> PerInstanceBudget:
    """Invert ``compose``: per-instance (eps0, delta0, delta') for a target.

    The delta budget is split as delta' = split * delta and
    I*S*delta0 = (1 - split) * delta. eps0 is found by monotone bisection
    until the composed eps matches the target to 1e-9 relative.
    """
    if s < 1 or i < 1:
        raise InvalidParam("S and I must be >= 1")
    if budget.mode == MODE_PURE:
        return PerInstanceBudget(budget.target_eps / (i * s), 0.0, 0.0)

    delta_prime = budget.split * budget.target_delta
    delta0 = (1.0 - budget.split) * budget.target_delta / (i * s)
    target = budget.target_eps

    def composed(e0: float) -> float:
        return compose(e0, delta0, s, i, delta_prime, MODE_ADVANCED)[0]

    lo, hi = 0.0, _BISECT_HI
    if composed(hi) < target:
        raise Infeasible(
            f"no eps0 in (0, {_BISECT_HI:g}] reaches target eps {target:g} "
            f"at I={i}, S={s}"
        )
    eps0 = hi
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        if mid <= 0.0 or mid == lo or mid == hi:
            break
        val = composed(mid)
        if abs(val - target) <= _EPS_REL_TOL * target:
            eps0 = mid
            break
        if val < target:
            lo = mid
        else:
            hi = mid
        eps0 = hi
    return PerInstanceBudget(eps0, delta0, delta_prime)


def label_keep_probability(eps_label: float, m: int) -> float:
    """m-ary randomized response keep probability e^eps / (e^eps - 1 + m)."""
    if m < 2:
        raise InvalidParam("label randomized response needs m >= 2")
    if eps_label < 0:
        raise InvalidParam("eps_label must be nonnegative")
    if math.isinf(eps_label):
        return 1.0
    e = math.exp(eps_label)
    return e / (e - 1.0 + m)


def threat_model_totals(eps: float, eps_label: float, delta: float):
    """(eps, delta) under the model-threat adversary; label randomization
    adds eps_label under the communication-threat adversary."""
    return {"model": (eps, delta), "communication": (eps + eps_label, delta)}


def total_budget_report(budget: BudgetSpec, s: int, i: int) -> str:
    """Human-readable accounting table for one configuration."""
    per = solve_per_instance(budget, s, i)
    eps, delta = compose(per.eps0, per.delta0, s, i, per.delta_prime, budget.mode) \
        if budget.mode == MODE_ADVANCED else compose(per.eps0, 0.0, s, i, 0.0, MODE_PURE)
    totals = threat_model_totals(eps, budget.eps_label, delta)
    lines = [
        f"mode                  {budget.mode}",
        f"repetitions I         {i}",
        f"sparsity S            {s}",
        f"per-instance eps0     {per.eps0:.12g}",
        f"per-instance delta0   {per.delta0:.12g}",
        f"delta'                {per.delta_prime:.12g}",
        f"composed (eps, delta) ({eps:.12g}, {delta:.12g})",
        f"model-threat          ({totals['model'][0]:.12g}, {totals['model'][1]:.12g})",
        f"communication-threat  ({totals['communication'][0]:.12g}, "
        f"{totals['communication'][1]:.12g})",
    ]
    return "\n".join(lines)
