"""Expected exit times from type A alcoves and the eigen expansion of survival.

For the alcove ``1 + x_k > x_1 > ... > x_k`` write ``p = floor(k/2)`` and
let ``O`` be the odd positive integers (even ``k``) or the even
nonnegative integers (odd ``k``). Then

    E_x(T) = sum_pi (-1)^c(pi) F_p(x_pi),
    F_p(y) = 4^p / pi^(p+2) sum_{l in O^p, l != 0} 1/|l|^2 prod_s sin(pi l_s y_s) / l_s,

where ``x_pi`` lists the pair differences of ``pi`` and the factor
``sin(pi l y)/l`` is read as ``pi y / 2`` at ``l = 0``.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc

from . import combinat
from .errors import DomainError
from .kernels1d import DEFAULT_CONTROL
from .rootsys import RootDatum

K_MAX = 8
# lattice points summed per partition at most
MAX_POINTS = 1 << 22


@dataclass(frozen=True)
class ExpectationResult:
    value: float
    tail_bound: float
    terms_used: int


def _alcove_point(x, k=None):
    x = np.asarray(x, dtype=float)
    if k is not None and len(x) != k:
        raise DomainError(f"x must have {k} coordinates")
    k = len(x)
    datum = RootDatum("A", k)
    xp = datum.project(x)
    if not bool(datum.alcove_contains(xp)):
        raise DomainError("x not in alcove")
    return xp, k


def _axis(k, L):
    """Admissible indices up to ``L`` for one factor."""
    if k % 2 == 0:
        return np.arange(1, L + 1, 2, dtype=float)
    return np.arange(0, L + 1, 2, dtype=float)


def _factor(l, y):
    """``sin(pi l y) / l`` with the value ``pi y / 2`` at ``l = 0``."""
    out = np.empty_like(l)
    z = l == 0
    out[z] = 0.5 * math.pi * y
    out[~z] = np.sin(math.pi * l[~z] * y) / l[~z]
    return out


def _shell_sum(ys, k, R):
    """Sum over ``l in O^p`` with ``0 < |l|^2 <= R``, without prefactor."""
    p = len(ys)
    L = int(math.isqrt(int(R)))
    ax = _axis(k, L)
    facs = [_factor(ax, y) for y in ys]
    sq = ax * ax
    if p == 1:
        keep = (sq > 0) & (sq <= R)
        return math.fsum(facs[0][keep] / sq[keep]), int(keep.sum())
    # accumulate over the first axis to bound memory
    total = []
    count = 0
    rest_sq = sq
    rest_f = facs[1]
    for s in range(2, p):
        rest_sq = np.add.outer(rest_sq, sq).ravel()
        rest_f = np.multiply.outer(rest_f, facs[s]).ravel()
    for a, fa in zip(sq, facs[0]):
        n = a + rest_sq
        keep = (n > 0) & (n <= R)
        if np.any(keep):
            total.append(fa * np.sum(rest_f[keep] / n[keep]))
            count += int(keep.sum())
    return math.fsum(total), count


def _tail_bound(p, k, R):
    """Integral bound on ``sum_{|l|^2 > R} 1/|l|^2 prod |factor|``."""
    # factors are at most pi/2 at l = 0 and 1/l otherwise; the partial sum of
    # these over l <= L is at most a + log(L) / 2 with a = pi/2 + 1
    a = 0.5 * math.pi + 1.0
    L0 = math.sqrt(R / p)
    lo = max(L0 - 2.0, 1.0)
    integrand = lambda u: (a + 0.5 * math.log(u)) ** (p - 1) / u ** 3
    # int_lo^inf integrand du, via v = a + log(u)/2
    v0 = a + 0.5 * math.log(lo)
    val = 2.0 * math.gamma(p) * gammaincc(p, 4.0 * v0) * math.exp(4.0 * a) / 4.0 ** p
    # one axis carries the maximum; spacing 2 between admissible indices
    return p * 0.5 * val + p * integrand(lo)


def expected_exit_A(x, k=None, ctl=None):
    """Expected exit time from the type A alcove by the lattice series.

    Parameters
    ----------
    x : array_like, shape (k,)
        Start point inside the alcove.
    k : int, optional
        Checked against ``len(x)``; at most 8.
    ctl : SeriesControl, optional
        ``tol`` is the target for the shell-tail bound. The shell radius
        doubles until the bound is met or ``MAX_POINTS`` lattice points per
        partition are reached.

    Returns
    -------
    ExpectationResult
    """
    ctl = ctl or DEFAULT_CONTROL
    x, k = _alcove_point(x, k)
    if k > K_MAX:
        raise DomainError(f"k={k} exceeds {K_MAX}")
    parts = combinat.enumerate_pair_partitions(k)
    p = k // 2
    pref = 4.0 ** p / math.pi ** (p + 2)
    npart = len(parts)
    R = 64.0
    while True:
        tail = pref * npart * _tail_bound(p, k, R)
        points = (math.sqrt(R) / 2 + 1) ** p
        if tail <= ctl.tol or 4 * points * 2 ** p > MAX_POINTS:
            break
        R *= 4.0
    total = []
    used = 0
    for pi in parts:
        ys = [x[i - 1] - x[j - 1] for i, j in pi.pairs]
        s, n = _shell_sum(ys, k, R)
        total.append(pi.sign * s)
        used += n
    value = pref * math.fsum(total)
    return ExpectationResult(value, float(tail), used)


def closed_form_expected(x, k=None):
    """Closed forms for ``k = 2``: ``x12 (1 - x12) / 2`` and ``k = 3``: ``x12 x23 (1 - x13)``."""
    x = np.asarray(x, dtype=float)
    k = len(x) if k is None else k
    if k not in (2, 3) or len(x) != k:
        raise ValueError("closed forms exist for k = 2 and k = 3 only")
    if k == 2:
        d = x[0] - x[1]
        return 0.5 * d * (1.0 - d)
    return (x[0] - x[1]) * (x[1] - x[2]) * (1.0 - (x[0] - x[2]))


def _c(l):
    return 4.0 / (math.pi * l)


def eigen_levels(x, k, r_max):
    """Levels ``r <= r_max`` with their functions ``F_r(x)``.

    ``F_r(x) = sum_pi (-1)^c(pi) sum_{l in O^p, |l|^2 = r} prod_s c_{l_s} sin(pi l_s y_s)``
    with ``c_l = 4 / (l pi)`` and the convention ``c_0 sin(0) = 2 y``.
    Each ``F_r`` is a Laplacian eigenfunction with eigenvalue ``-2 pi^2 r``.

    Returns
    -------
    dict
        Maps each representable ``r > 0`` to ``F_r(x)``.
    """
    x = np.asarray(x, dtype=float)
    k = int(k)
    p = k // 2
    L = int(math.isqrt(int(r_max)))
    ax = _axis(k, L)
    levels = {}
    for pi in combinat.enumerate_pair_partitions(k):
        ys = [x[i - 1] - x[j - 1] for i, j in pi.pairs]
        facs = [np.where(ax == 0, 2.0 * y, _c(np.maximum(ax, 1)) * np.sin(math.pi * ax * y))
                for y in ys]
        grid_f = facs[0]
        grid_r = ax * ax
        for f in facs[1:]:
            grid_f = np.multiply.outer(grid_f, f).ravel()
            grid_r = np.add.outer(grid_r, ax * ax).ravel()
        keep = (grid_r > 0) & (grid_r <= r_max)
        for r, v in zip(grid_r[keep].astype(int), grid_f[keep]):
            levels.setdefault(int(r), []).append(pi.sign * v)
    return {r: math.fsum(v) for r, v in sorted(levels.items())}


def F_r(x, k, r):
    """The level function ``F_r`` at ``x`` (zero when ``r`` is not representable)."""
    return eigen_levels(x, k, r).get(int(r), 0.0)


def survival_eigen_expansion(x, k, t, r_max):
    """Partial sum ``sum_{0 < r <= r_max} exp(-pi^2 r t) F_r(x)`` of survival."""
    if not t > 0:
        raise DomainError("t must be positive")
    lv = eigen_levels(x, k, r_max)
    return math.fsum(math.exp(-math.pi ** 2 * r * t) * v for r, v in lv.items())
