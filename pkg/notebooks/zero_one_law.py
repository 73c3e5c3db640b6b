"""
Sharpening of the transition with n
===================================

Hold the scaling coefficient fixed while n grows; above 1 the networks end
up connected, below 1 they end up with isolated nodes.
"""

# %%
from keyrel.analytic import asymptotic_diagnostics
from keyrel.experiment import scaling_sweep
from keyrel.model import ScalingConfig

grid = (100, 200, 400, 800)
for c in (0.3, 1.0, 3.0):
    cfg = ScalingConfig(c, grid, (1.0,), (15,), sigma=1.0)
    res = scaling_sweep(cfg, trials=300, seed=1)
    row = "  ".join(f"n={pt.value}: {pt.p_connected:.2f}" for pt in res.points)
    print(f"c={c}: {row}")

# %%
print(asymptotic_diagnostics(ScalingConfig(3.0, grid, (1.0,), (15,), sigma=1.0), 800))
