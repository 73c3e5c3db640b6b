"""
Edge probabilities in the heterogeneous key graph
=================================================

Two nodes share a key with a probability that only depends on their ring
sizes and the pool. Walk through the numbers for the four-class network.
"""

# %%
from keyrel import analytic
from keyrel.model import ModelParams

P = 10_000
for Ki, Kj in [(10, 10), (10, 25), (25, 25), (40, 40)]:
    print(f"K=({Ki},{Kj})  p={analytic.edge_prob(P, Ki, Kj):.6g}  "
          f"lgamma route={analytic.edge_prob_lgamma(P, Ki, Kj):.6g}")

# %%
# Mean edge probabilities per class. Smaller rings see fewer neighbours,
# so class 1 is the weakest link.
params = ModelParams(500, (0.25,) * 4, (10, 15, 20, 25), P, alpha=0.6)
summary = analytic.AnalyticSummary.of(params)
for i, (lam, Lam) in enumerate(zip(summary.lambda_, summary.Lambda), start=1):
    print(f"class {i}: lambda={lam:.5g}  with link failures={Lam:.5g}")
print("c_n =", round(summary.c_n, 4))

# %%
# Smallest K1 that clears the threshold, for each link reliability.
for alpha in (0.2, 0.4, 0.6, 0.8):
    print(alpha, analytic.critical_k1(500, (0.25,) * 4, (0, 5, 10, 15), P, alpha))
