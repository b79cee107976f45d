"""
Expected exit times from type A alcoves
=======================================

The mean exit time from the type A alcove solves a Poisson problem. For
two and three coordinates it is a polynomial; in general it is a lattice
series, which we compare with the time integral of the survival
probability.
"""
import numpy as np
from scipy.integrate import quad

from alcove.exitprob import survival_A
from alcove.expected import closed_form_expected, expected_exit_A, survival_eigen_expansion

# %%
# Interval and triangle: the series reproduces the polynomial forms.
for x in ([0.5, 0.0], [0.25, 0.0], [0.6, 0.3, 0.1], [2 / 3, 1 / 3, 0.0]):
    r = expected_exit_A(x)
    print(f"x={x}: series {r.value:.12f}, closed form {closed_form_expected(x):.12f}")

# %%
# Four coordinates have no polynomial form. Integrating the survival
# probability over time gives an independent value.
x = [0.7, 0.5, 0.3, 0.1]
r = expected_exit_A(x)
integral, _ = quad(lambda t: survival_A(x, t).value, 0, 10, points=[0.01, 0.1, 1], limit=200)
print(f"\nk=4: series {r.value:.10f} (tail bound {r.tail_bound:.1e}), "
      f"time integral {integral:.10f}")

# %%
# The eigenfunction expansion of the survival probability converges fast
# for moderate times and shows the lowest Dirichlet mode taking over.
print()
for t in (0.02, 0.05, 0.1, 0.3):
    exact = survival_A(x, t).value
    row = [survival_eigen_expansion(x, 4, t, r_max) for r_max in (20, 80, 320)]
    print(f"t={t:<5} " + "  ".join(f"{v: .3e}" for v in row) + f"   exact {exact:.3e}")

# %%
# Mean exit time over the triangle, sampled on a grid.
k = 3
grid = np.linspace(0.05, 0.95, 7)
best = max((closed_form_expected([a, b, 0.0]), a, b) for a in grid for b in grid if 0 < b < a < 1)
print(f"\nlargest sampled mean exit time {best[0]:.5f} at x=({best[1]:.2f}, {best[2]:.2f}, 0)")
