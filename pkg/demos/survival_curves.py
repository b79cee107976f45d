"""
Survival of Brownian motion in alcoves
======================================

Brownian motion started inside an alcove is killed on the boundary. This
script tabulates the survival probability over time for several alcoves
and checks the closed formulas against the image-sum and Monte Carlo
routes.
"""
import numpy as np

from alcove.exitprob import SurvivalQuery, survival, survival_images
from alcove.montecarlo import SimConfig, mc_survival
from alcove.rootsys import RootDatum

# %%
# A start point per alcove. Type A points are given with k coordinates and
# projected onto the sum-zero plane internally.
starts = {
    ("A", 3): [0.6, 0.3, 0.1],
    ("A", 4): [0.7, 0.5, 0.3, 0.1],
    ("B", 3): [0.6, 0.3, 0.1],
    ("C", 2): [0.4, 0.1],
    ("D", 4): [0.55, 0.35, 0.2, 0.05],
    ("G2", 2): None,
}

ts = np.geomspace(1e-3, 0.5, 8)
print("t       " + "  ".join(f"{RootDatum(f, k).label:<8}" for f, k in starts))
for t in ts:
    row = []
    for (fam, k), x in starts.items():
        d = RootDatum(fam, k)
        x = d.barycenter if x is None else x
        row.append(survival(SurvivalQuery(d, tuple(x), t)).value)
    print(f"{t:.4f}  " + "  ".join(f"{v:.6f}" for v in row))

# %%
# In rank 2 the alcove is a triangle and the reflection image sum can be
# integrated directly. The two routes share nothing beyond the geometry.
print()
for fam, k in (("A", 3), ("C", 2), ("G2", 2)):
    d = RootDatum(fam, k)
    x = d.barycenter if starts[(fam, k)] is None else starts[(fam, k)]
    a = survival(SurvivalQuery(d, tuple(x), 0.05)).value
    b = survival_images(d, x, 0.05).value
    print(f"{d.label}: formula {a:.12f}, image sum {b:.12f}, gap {abs(a - b):.1e}")

# %%
# Monte Carlo with the bridge correction, which accounts for crossings
# between time steps. Plain Euler stepping overestimates survival.
print()
d, x, t = RootDatum("A", 4), starts[("A", 4)], 0.01
exact = survival(SurvivalQuery(d, tuple(x), t)).value
for bridge in (False, True):
    est = mc_survival(d, x, t, SimConfig(paths=20_000, dt=1e-4, horizon=0.05, bridge=bridge))
    print(f"bridge={bridge!s:5}: mc {est.mean:.4f} +- {est.stderr:.4f}, formula {exact:.4f}")
