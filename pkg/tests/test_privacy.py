import math

import pytest

from shufkde import privacy as pv
from shufkde.errors import Infeasible, InvalidParam


def test_compose_pure_is_linear():
    eps, delta = pv.compose(0.5, 0.0, s=2, i=3, delta_prime=0.0, mode=pv.MODE_PURE)
    assert eps == 3.0 and delta == 0.0


def test_compose_advanced_delta_arithmetic():
    _, delta = pv.compose(1.0, 1e-7, s=1, i=2, delta_prime=1e-6, mode=pv.MODE_ADVANCED)
    assert delta == pytest.approx(1.2e-6, rel=1e-12)


def test_compose_advanced_eps_golden():
    # I = S = 1, eps0 = 1, delta' = e^-2:
    # eps = (e - 1) + sqrt(2 * ln(e^2)) = e + 1
    eps, _ = pv.compose(1.0, 0.0, s=1, i=1, delta_prime=math.exp(-2.0))
    assert eps == pytest.approx(3.718281828459045, rel=1e-12)


def test_compose_monotone_in_eps0_and_i():
    prev = 0.0
    for eps0 in (0.01, 0.05, 0.2, 0.5, 1.0, 2.0):
        eps, _ = pv.compose(eps0, 1e-8, s=1, i=16, delta_prime=1e-6)
        assert eps > prev
        prev = eps
    for mode in (pv.MODE_ADVANCED, pv.MODE_PURE):
        prev = 0.0
        for i in (1, 2, 8, 64, 512):
            eps, _ = pv.compose(0.1, 1e-8, s=1, i=i, delta_prime=1e-6, mode=mode)
            assert eps > prev
            prev = eps


def test_compose_rejects_bad_delta_prime():
    for bad in (0.0, 1.0, -0.5, 2.0):
        with pytest.raises(InvalidParam):
            pv.compose(1.0, 1e-8, s=1, i=2, delta_prime=bad)


def test_solve_pure_is_division():
    budget = pv.BudgetSpec(6.0, 0.0, pv.MODE_PURE)
    per = pv.solve_per_instance(budget, s=2, i=3)
    assert per.eps0 == 1.0 and per.delta0 == 0.0 and per.delta_prime == 0.0


def test_solve_delta_split():
    budget = pv.BudgetSpec(3.2, 1e-5, pv.MODE_ADVANCED)
    per = pv.solve_per_instance(budget, s=1, i=768)
    assert per.delta_prime == pytest.approx(5e-6, rel=1e-12)
    assert per.delta0 == pytest.approx(6.5104166666666675e-09, rel=1e-12)
    # the split must reassemble the target exactly
    assert 768 * per.delta0 + per.delta_prime == pytest.approx(1e-5, rel=1e-12)


@pytest.mark.parametrize("target,s,i", [
    (1.0, 1, 16), (3.2, 1, 768), (7.0, 1, 512), (5.0, 4, 32), (0.25, 1, 2),
])
def test_solve_compose_round_trip(target, s, i):
    budget = pv.BudgetSpec(target, 1e-6, pv.MODE_ADVANCED)
    per = pv.solve_per_instance(budget, s, i)
    eps, delta = pv.compose(per.eps0, per.delta0, s, i, per.delta_prime)
    assert eps == pytest.approx(target, rel=1e-9)
    assert delta == pytest.approx(1e-6, rel=1e-12)


def test_solve_custom_split_fraction():
    budget = pv.BudgetSpec(2.0, 1e-5, pv.MODE_ADVANCED, split=0.25)
    per = pv.solve_per_instance(budget, s=1, i=8)
    assert per.delta_prime == pytest.approx(0.25e-5, rel=1e-12)
    assert 8 * per.delta0 + per.delta_prime == pytest.approx(1e-5, rel=1e-12)


def test_solve_infeasible_target():
    budget = pv.BudgetSpec(1e60, 1e-6, pv.MODE_ADVANCED)
    with pytest.raises(Infeasible):
        pv.solve_per_instance(budget, s=1, i=1)


def test_label_keep_probability_values():
    assert pv.label_keep_probability(0.0, 4) == pytest.approx(0.25, rel=1e-15)
    assert pv.label_keep_probability(math.inf, 7) == 1.0
    # e^5 / (e^5 + 13)
    assert pv.label_keep_probability(5.0, 14) == pytest.approx(
        0.9194613371531957, rel=1e-12)


def test_threat_model_totals():
    totals = pv.threat_model_totals(3.2, 5.0, 1e-6)
    assert totals["communication"][0] == pytest.approx(8.2, rel=1e-12)
    assert totals["model"] == (3.2, 1e-6)
    same = pv.threat_model_totals(2.0, 0.0, 1e-6)
    assert same["model"] == same["communication"]


def test_budget_report_mentions_both_threat_models():
    budget = pv.BudgetSpec(6.0, 0.0, pv.MODE_PURE, eps_label=5.0)
    report = pv.total_budget_report(budget, s=2, i=3)
    assert "eps0     1" in report
    assert "model-threat          (6, 0)" in report
    assert "communication-threat  (11, 0)" in report


def test_budget_spec_validation():
    with pytest.raises(InvalidParam):
        pv.BudgetSpec(1.0, 0.5, "basic")
    with pytest.raises(InvalidParam):
        pv.BudgetSpec(-1.0, 1e-6, pv.MODE_ADVANCED)
    with pytest.raises(InvalidParam):
        pv.BudgetSpec(1.0, 0.0, pv.MODE_ADVANCED)  # advanced needs delta > 0
    with pytest.raises(InvalidParam):
        pv.BudgetSpec(1.0, 1e-6, pv.MODE_PURE)  # pure requires delta = 0
