"""Demo: privacy accounting across target budgets and composition modes.

For each target epsilon, the solver finds the per-instance eps0 whose
I-fold composition hits the target, splitting the delta budget between
the composition slack delta' and the I*S*delta0 term. The label
randomizer adds eps_lbl in the communication-threat model only.
"""

from shufkde import privacy

I, S = 768, 1
print(f"advanced composition, I = {I}, S = {S}, delta = 1e-6, eps_lbl = 5\n")
print(f"{'target eps':>10} {'eps0':>12} {'delta0':>12} {'model-threat':>14} "
      f"{'comm-threat':>12}")
for eps in (1.0, 3.2, 5.7, 10.0):
    budget = privacy.BudgetSpec(eps, 1e-6, privacy.MODE_ADVANCED, eps_label=5.0)
    per = privacy.solve_per_instance(budget, S, I)
    composed, delta = privacy.compose(per.eps0, per.delta0, S, I, per.delta_prime)
    totals = privacy.threat_model_totals(composed, budget.eps_label, delta)
    print(f"{eps:>10.2f} {per.eps0:>12.3e} {per.delta0:>12.3e} "
          f"{totals['model'][0]:>14.4f} {totals['communication'][0]:>12.4f}")

print("\npure composition (for pure-DP bitsum protocols): eps = I*S*eps0")
budget = privacy.BudgetSpec(6.0, 0.0, privacy.MODE_PURE, eps_label=3.0)
print()
print(privacy.total_budget_report(budget, s=2, i=3))
