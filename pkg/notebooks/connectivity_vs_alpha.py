"""
Connectivity as links get more reliable
=======================================

Two equally likely classes, total key budget fixed at 80, swept over the
link-on probability.
"""

# %%
from keyrel.experiment import empirical_crossing, sweep_alpha

alphas = [round(0.05 * i, 12) for i in range(1, 21)]
profiles = [(10, 70), (20, 60), (30, 50), (40, 40)]
results = sweep_alpha(500, (0.5, 0.5), profiles, 10_000, alphas, trials=200, seed=1)

# %%
# The balanced profile needs the least reliable channel.
for res in results:
    cross = empirical_crossing(res.values, res.p_connected)
    print(res.meta["keys"], f"crossing {cross:.3f}",
          f"threshold {res.meta['critical_alpha']:.3f}")
