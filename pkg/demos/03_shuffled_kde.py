"""Demo: the full shuffled-DP KDE protocol and its error bound.

Runs the protocol end to end -- public pair sampling, per-user Bernoulli
discretization, bitsum randomizers, the shuffler, the analyzer -- and
queries the released model. The empirical worst-case query RMSE is then
measured across repetitions and compared to the sqrt(4*beta^2 +
16*R^4*S*(S + (E/n)^2)/I) bound as the repetition count I grows.
"""

import numpy as np

from shufkde import bitsum as bs
from shufkde import lsq, protocol

rng = np.random.default_rng(2)
d, n = 16, 300
spec = lsq.LsqSpec(lsq.KERNEL_GAUSSIAN, d)
X = rng.standard_normal((n, d))
X /= np.linalg.norm(X, axis=1, keepdims=True)

# one message-level execution, so every envelope goes through the shuffler;
# the large p' constant keeps the 3NB padding traffic at desk scale
# (see demo 06 for what the default constant costs)
cfg = bs.BitsumConfig(bs.VARIANT_3NB, n, eps0=0.5, delta0=1e-6, three_nb_c=30.0)
init = protocol.init_protocol(spec, 64, n, cfg, public_seed=7)
model, meter = protocol.run_protocol(init, X, rng, message_level=True)
print(f"message-level run: {meter.total_messages} messages, "
      f"{meter.bits_per_message} bits each, {meter.total_bits} bits total")

queries = X[:5]
est = protocol.query_batch(model, queries)
exact = lsq.kde_exact(spec.kernel, X, queries)
for e, t in zip(est, exact):
    print(f"  released KDE {e:8.4f}   exact {t:8.4f}")

print("\nworst-case query RMSE vs the error bound (exact bitsum, 40 trials):")
queries = rng.standard_normal((50, d))
queries /= np.linalg.norm(queries, axis=1, keepdims=True)
exact_cfg = bs.BitsumConfig(bs.VARIANT_EXACT, n)
for I in (64, 256, 1024):
    report = protocol.empirical_suprmse(spec, I, exact_cfg, X, queries,
                                        trials=40, seed=11)
    bound = protocol.bound_suprmse(spec, I, 0.0, n)
    print(f"  I = {I:<5} max rmse = {report.max_rmse:.4f}   bound = {bound:.4f}")
