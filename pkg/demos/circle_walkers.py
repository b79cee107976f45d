"""
Non-colliding walkers on a circle
=================================

Independent Brownian particles on the circle R/Z survive while no two of
them meet. Sorting the positions maps the configuration into the type A
alcove, so the non-collision probability is an alcove survival
probability.
"""
import numpy as np

from alcove.exitprob import survival_A
from alcove.montecarlo import SimConfig, circle_representative, mc_circle_collision

rng = np.random.default_rng(1)

# %%
# Random starting configurations for three and four walkers.
for k in (3, 4):
    for _ in range(3):
        x = np.sort(rng.uniform(0, 1, k))
        t = 0.02
        exact = survival_A(circle_representative(x), t).value
        est = mc_circle_collision(k, x, t, SimConfig(paths=20_000, dt=1e-3, bridge=True))
        z = (est.mean - exact) / est.stderr
        print(f"k={k} x={np.round(x, 3)}: formula {exact:.4f}, mc {est.mean:.4f}, z {z:+.2f}")

# %%
# Evenly spaced walkers are the most robust configuration.
print()
for k in (2, 3, 4, 5, 6):
    x = np.arange(k) / k
    vals = [survival_A(circle_representative(x), t).value for t in (0.005, 0.02, 0.05)]
    print(f"k={k}: " + "  ".join(f"{v:.5f}" for v in vals))
