"""
Sampling one network and inspecting its components
===================================================
"""

# %%
import numpy as np

from keyrel import analytic
from keyrel.graphalgo import components
from keyrel.model import ModelParams
from keyrel.sampler import sample_graph, trial_rng

params = ModelParams(500, (0.25,) * 4, (12, 17, 22, 27), 10_000, alpha=0.6)
g = sample_graph(params, trial_rng(seed=1, stream=0), keep_key_edges=True)
print(len(g.key_edges), "key-sharing pairs,", len(g.edges), "survive the channel")

# %%
out = components(g)
print(out)

# degree spread by class
deg = np.bincount(g.edges.ravel(), minlength=g.n)
for i in range(g.r):
    print(f"class {i + 1}: mean degree {deg[g.class_of == i].mean():.2f}")

# %%
# The expected number of isolated nodes from the closed form, next to the
# Monte Carlo average.
from keyrel.experiment import run_trials

counts = run_trials(params, 500, seed=1)
print("expected", round(analytic.expected_isolated(params), 3),
      "observed", round(counts.isolated_mean, 3), "+-", round(counts.isolated_sem, 3))
