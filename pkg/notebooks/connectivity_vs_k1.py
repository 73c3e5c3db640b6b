"""
Connectivity as the smallest ring grows
=======================================

Four classes with rings K1, K1+5, K1+10, K1+15 in a pool of 10,000 keys,
500 nodes, 200 networks per point. Takes about a minute.
"""

# %%
from keyrel.experiment import empirical_crossing, sweep_k1

results = sweep_k1(500, (0.25,) * 4, (0, 5, 10, 15), 10_000, (0.2, 0.4, 0.6, 0.8),
                   range(5, 36), trials=200, seed=1)

# %%
for res in results:
    cross = empirical_crossing(res.values, res.p_connected)
    print(f"alpha={res.meta['alpha']}: empirical 0.5 crossing {cross:.2f}, "
          f"threshold {res.meta['critical_k1']}")

# %%
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    for res in results:
        plt.plot(res.values, res.p_connected, marker="o", ms=3, label=f"alpha={res.meta['alpha']}")
        plt.axvline(res.meta["critical_k1"], ls=":", c="grey")
    plt.xlabel("K1")
    plt.ylabel("P[connected]")
    plt.legend()
    plt.show()
