"""Quadrature on simplices: collapsed Gauss rules and adaptive bisection."""
import math
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def simplex_rule(dim, n):
    """Collapsed Gauss-Legendre rule on the reference simplex.

    The cube ``[0, 1]^dim`` is mapped onto the simplex by the Duffy
    transform; with ``n`` nodes per axis the rule integrates polynomials
    of degree ``2n - dim`` exactly.

    Returns
    -------
    bary : ndarray, shape (m, dim + 1)
        Barycentric coordinates of the nodes.
    weights : ndarray, shape (m,)
        Weights summing to one (the rule computes the simplex average).
    """
    x, w = np.polynomial.legendre.leggauss(n)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    grids = np.meshgrid(*([x] * dim), indexing="ij")
    wgrids = np.meshgrid(*([w] * dim), indexing="ij")
    u = np.stack([g.ravel() for g in grids], axis=1)
    wt = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    # Duffy: lambda_0 = 1 - u_0, lambda_1 = u_0 (1 - u_1), ...
    bary = np.empty((len(u), dim + 1))
    rem = np.ones(len(u))
    for d in range(dim):
        bary[:, d] = rem * (1.0 - u[:, d])
        rem = rem * u[:, d]
    bary[:, dim] = rem
    # collapse Jacobian prod_d u_d^(dim-1-d); reference volume 1/dim!
    jac = np.ones(len(u))
    for d in range(dim - 1):
        jac *= u[:, d] ** (dim - 1 - d)
    return bary, wt * jac * math.factorial(dim)


def simplex_volume(verts):
    """Volume of a simplex embedded in a possibly larger ambient space."""
    verts = np.asarray(verts, dtype=float)
    e = verts[1:] - verts[0]
    g = e @ e.T
    return math.sqrt(max(np.linalg.det(g), 0.0)) / math.factorial(len(e))


def _bisect(simplices):
    """Split each simplex at the midpoint of its longest edge."""
    s = simplices
    m = s.shape[1]
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    lens = np.stack([np.sum((s[:, i] - s[:, j]) ** 2, axis=-1) for i, j in pairs], axis=1)
    best = np.argmax(lens, axis=1)
    a = np.empty_like(s)
    b = np.empty_like(s)
    for p, (i, j) in enumerate(pairs):
        sel = best == p
        if not np.any(sel):
            continue
        mid = 0.5 * (s[sel, i] + s[sel, j])
        a[sel] = s[sel]
        b[sel] = s[sel]
        a[sel, j] = mid
        b[sel, i] = mid
    return a, b


def _longest_edge(s):
    m = s.shape[1]
    return np.sqrt(np.max([np.sum((s[:, i] - s[:, j]) ** 2, axis=-1)
                           for i in range(m) for j in range(i + 1, m)], axis=0))


def adaptive_simplex(f, verts, tol, n=5, max_simplices=200000, min_level=0, h_max=None):
    """Adaptive integral of ``f`` over a simplex.

    Parameters
    ----------
    f : callable
        Maps an array of points, shape (m, D), to values, shape (m,).
    verts : array_like, shape (dim + 1, D)
        Simplex vertices in ambient coordinates.
    tol : float
        Absolute error target; each piece receives a share proportional
        to its volume.
    n : int
        Nodes per axis of the collapsed rule.
    min_level : int
        Number of unconditional bisection rounds before testing.
    h_max : float, optional
        Pieces with an edge longer than this are always split. Set it to
        the length scale of ``f``; otherwise a feature narrower than the
        coarse pieces can be missed by both rules alike.

    Returns
    -------
    value : float
    err : float
        Sum of the accepted local error estimates.
    pieces : int
    """
    verts = np.asarray(verts, dtype=float)
    dim = len(verts) - 1
    bary, wt = simplex_rule(dim, n)
    vol0 = simplex_volume(verts)
    if vol0 == 0:
        return 0.0, 0.0, 0

    def integrate(simp):
        pts = np.einsum("qv,svd->sqd", bary, simp)
        vals = f(pts.reshape(-1, simp.shape[-1])).reshape(len(simp), len(bary))
        vols = np.sqrt(np.maximum(np.linalg.det(_gram_batch(simp)), 0.0)) / math.factorial(dim)
        return vols * (vals @ wt), vols

    active = verts[None]
    for _ in range(min_level):
        a, b = _bisect(active)
        active = np.concatenate([a, b])
    est, vols = integrate(active)
    accepted = []
    errs = []
    total = len(active)
    while len(active):
        a, b = _bisect(active)
        ia, _ = integrate(a)
        ib, _ = integrate(b)
        fine = ia + ib
        err = np.abs(fine - est)
        ok = err <= tol * vols / vol0
        if h_max is not None:
            ok &= _longest_edge(active) <= h_max
        accepted.append(fine[ok])
        errs.append(err[ok])
        if np.all(ok):
            break
        total += 2 * int(np.sum(~ok))
        if total > max_simplices:
            accepted.append(fine[~ok])
            errs.append(err[~ok])
            break
        keep = ~ok
        active = np.concatenate([a[keep], b[keep]])
        est = np.concatenate([ia[keep], ib[keep]])
        vols = 0.5 * np.concatenate([vols[keep], vols[keep]])
    value = math.fsum(np.concatenate(accepted))
    err = float(np.sum(np.concatenate(errs)))
    return value, err, total


def _gram_batch(simp):
    e = simp[:, 1:] - simp[:, :1]
    return np.einsum("sid,sjd->sij", e, e)
