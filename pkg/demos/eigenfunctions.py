"""
Laplacian eigenfunctions on alcoves
===================================

Orbit sums over the Weyl group give explicit Dirichlet and Neumann
eigenfunctions on every alcove. This script looks at which of them are
real, checks their eigenvalues numerically, and runs the hot spots
check on a few Neumann modes.
"""
import numpy as np

from alcove.eigen import (H, Weight, eigenvalue, f_p, g_p, hot_spots_check, is_real,
                          laplacian_fd)
from alcove.rootsys import RootDatum

# %%
# Realness: the orbit of p must contain -p. In type A this means the
# coefficient vector reads the same backwards.
d = RootDatum("A", 4)
for c in ([1, 0, 1], [1, 2, 1], [2, 0, 1], [0, 3, 0]):
    wit = is_real(Weight.from_coefficients(d, c))
    print(f"A4 weight {c}: real={bool(wit)}, witness sign {wit.sign}")

# %%
# The lowest Dirichlet mode is the product of sines over positive roots.
print()
for fam, k in (("A", 3), ("C", 2), ("G2", 2), ("D", 4)):
    d = RootDatum(fam, k)
    rho = Weight(d, d.rho)
    x = d.sample_alcove(4, np.random.default_rng(0))
    v = f_p(rho, x)
    part = v.im if np.max(np.abs(v.re)) < 1e-9 else v.re
    print(f"{d.label}: f/H = {np.round(part / H(x, d), 8)}, eigenvalue {eigenvalue(rho):.4f}")

# %%
# Finite differences against the exact eigenvalue for a Neumann mode.
print()
d = RootDatum("C", 2)
w = Weight.from_coefficients(d, [2, 1])
x = d.sample_alcove(3, np.random.default_rng(1))
lap = laplacian_fd(lambda y: g_p(w, y).re, x)
print("C2 weight (2, 1): Laplacian / g =", np.round(lap / g_p(w, x).re, 3),
      " exact", round(eigenvalue(w), 3))

# %%
# Hot spots: interior values stay below the boundary supremum.
print()
for fam, k, c in (("C", 2, [1, 1]), ("G2", 2, [1, 0]), ("A", 3, [2, 2]), ("B", 2, [0, 1])):
    d = RootDatum(fam, k)
    rep = hot_spots_check(Weight.from_coefficients(d, c), samples=10_000)
    print(f"{d.label} {c}: interior max {rep.interior_max:.4f}, "
          f"boundary sup {rep.boundary_sup:.4f}, passed {rep.passed}")
