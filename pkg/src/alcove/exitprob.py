"""Closed-form survival probabilities for affine alcoves and type A chambers.

Each formula combines one-dimensional strip kernels, or planar triangle
blocks for types B and C, through a Pfaffian or a signed sum over pair
partitions. A root direction ``alpha`` sees Brownian motion with variance
``|alpha|^2`` per unit time, so every factor runs on the clock ``|alpha|^2 t``.
"""
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import combinat, imagesum
from .errors import DomainError, UnsupportedFormulaError
from .kernels1d import DEFAULT_CONTROL, SeriesControl, hit_survival, phi, psi
from .rootsys import RootDatum

F4_MESSAGE = "no compact closed formula is implemented for the F4 alcove"


@dataclass(frozen=True)
class SurvivalQuery:
    datum: RootDatum
    x: tuple
    t: float
    ctl: SeriesControl = field(default_factory=SeriesControl)


@dataclass(frozen=True)
class SurvivalResult:
    """Survival probability with a bound on the truncation error.

    ``method`` is one of ``pfaffian``, ``partition-sum``, ``image-sum`` or
    ``monte-carlo``.
    """

    value: float
    tail_bound: float
    method: str
    terms: int = 0


def _finish(raw, bound, method, terms=0):
    val = min(max(raw, 0.0), 1.0)
    return SurvivalResult(val, max(bound, abs(raw - val)), method, terms)


def _entry_bound(values, errors):
    """Crude bound on the error of a signed product sum from entry errors."""
    mags = np.abs(values) + errors
    return float(np.sum(errors) * max(1.0, float(np.max(mags))) ** (len(values) // 2))


def _check_alcove(datum, x):
    x = datum.project(np.asarray(x, dtype=float))
    if not bool(datum.alcove_contains(x)):
        raise DomainError(f"x not in alcove of type {datum.label}")
    return x


def _check_t(t):
    if not t >= 0:
        raise DomainError("t must be nonnegative")


def _pair_matrix(k, fn):
    vals = np.zeros((k, k))
    errs = np.zeros((k, k))
    for i, j in itertools.combinations(range(k), 2):
        v, e = fn(i, j)
        vals[i, j], vals[j, i] = v, -v
        errs[i, j] = errs[j, i] = e
    return vals, errs


def _kv(kv):
    return kv.value, kv.tail_bound


def survival_A(x, t, ctl=None, method=None):
    """Survival probability in the alcove ``1 + x_k > x_1 > ... > x_k``.

    Parameters
    ----------
    x : array_like, shape (k,)
        Start point; projected onto the sum-zero plane.
    t : float
    ctl : SeriesControl, optional
    method : {None, "pfaffian", "partition-sum"}
        Default is the Pfaffian for even ``k`` and the partition sum for
        odd ``k``.

    Returns
    -------
    SurvivalResult
    """
    ctl = ctl or DEFAULT_CONTROL
    x = np.asarray(x, dtype=float)
    k = len(x)
    datum = RootDatum("A", k)
    x = _check_alcove(datum, x)
    _check_t(t)
    if t == 0:
        return SurvivalResult(1.0, 0.0, method or "pfaffian", 0)
    if k > combinat.K_MAX:
        raise DomainError(f"k={k} exceeds the supported maximum {combinat.K_MAX}")
    kern = phi if k % 2 == 0 else psi
    vals, errs = _pair_matrix(k, lambda i, j: _kv(kern(x[i] - x[j], 2 * t, ctl)))
    if method is None:
        method = "pfaffian" if k % 2 == 0 else "partition-sum"
    if method == "pfaffian":
        if k % 2 == 0:
            raw = combinat.pfaffian(vals, method="expansion")
        else:
            raw = combinat.singlet_expansion(vals, method="expansion")
    elif method == "partition-sum":
        raw = combinat.partition_sum(k, lambda i, j: vals[i - 1, j - 1])
    else:
        raise ValueError(f"unknown method {method!r}")
    terms = len(combinat.enumerate_pair_partitions(k))
    return _finish(raw, _entry_bound(vals[np.triu_indices(k, 1)], errs[np.triu_indices(k, 1)]),
                   method, terms)


def survival_A_lattice(x, t, max_norm=6):
    """Odd-``k`` survival as a signed lattice sum over hitting events.

    Debug routine: sums, for each pair partition, the lattice points ``v``
    with ``max |<v, beta>| <= max_norm`` of signed products of
    probabilities that ``<X, beta>`` avoids the level ``<v, beta>``.
    """
    x = np.asarray(x, dtype=float)
    k = len(x)
    if k % 2 == 0:
        raise ValueError("lattice form applies to odd k")
    datum = RootDatum("A", k)
    x = _check_alcove(datum, x)
    levels = range(-max_norm, max_norm + 1)
    total = []
    for pi in combinat.enumerate_pair_partitions(k):
        factors = []
        for i, j in pi.pairs:
            d = x[i - 1] - x[j - 1]
            # sign -1 for a positive level, +1 otherwise
            factors.append(math.fsum((-1 if n > 0 else 1) * hit_survival(d, n, 2 * t)
                                     for n in levels))
        total.append(pi.sign * math.prod(factors))
    return math.fsum(total)


def chamber_survival_A(x, t):
    """Survival probability in the chamber ``x_1 > ... > x_k``.

    Entries are ``erf((x_i - x_j) / (2 sqrt(t)))``; odd ``k`` uses the
    singlet expansion of the Pfaffian.
    """
    x = np.asarray(x, dtype=float)
    k = len(x)
    if not np.all(np.diff(x) < 0):
        raise DomainError("x not in chamber: coordinates must be strictly decreasing")
    _check_t(t)
    if t == 0:
        return SurvivalResult(1.0, 0.0, "pfaffian", 0)
    vals, _ = _pair_matrix(k, lambda i, j: (math.erf((x[i] - x[j]) / (2 * math.sqrt(t))), 0.0))
    if k % 2 == 0:
        raw = combinat.pfaffian(vals)
    else:
        raw = combinat.singlet_expansion(vals)
    return _finish(raw, 1e-15 * k, "pfaffian")


def _assemble(k, vals, errs, singlet=None, serr=None):
    iu = np.triu_indices(k, 1)
    v = vals[iu]
    e = errs[iu]
    if k % 2 == 0:
        raw = combinat.pfaffian(vals, method="expansion")
    else:
        raw = combinat.singlet_expansion(vals, singlet, method="expansion")
        if singlet is not None:
            v = np.concatenate([v, singlet])
            e = np.concatenate([e, serr])
    return raw, _entry_bound(v, e)


def _block_survival(block, ctl, tol):
    def fn(x, t, i, j):
        if block == "C":
            return imagesum.block_survival_C2(x[i], x[j], t, tol), tol
        return imagesum.block_survival_B2(x[i], x[j], t, tol), tol
    return fn


def survival_C(x, t, ctl=None, tol=1e-9):
    """Survival probability in the alcove ``1/2 > x_1 > ... > x_k > 0``."""
    return _survival_BC("C", x, t, ctl, tol)


def survival_B(x, t, ctl=None, tol=1e-9):
    """Survival probability in ``x_1 > ... > x_k > 0, x_1 + x_2 < 1``."""
    return _survival_BC("B", x, t, ctl, tol)


def _survival_BC(fam, x, t, ctl, tol):
    ctl = ctl or DEFAULT_CONTROL
    x = np.asarray(x, dtype=float)
    k = len(x)
    datum = RootDatum(fam, k)
    x = _check_alcove(datum, x)
    _check_t(t)
    if t == 0:
        return SurvivalResult(1.0, 0.0, "pfaffian", 0)
    block = _block_survival(fam, ctl, tol)
    vals, errs = _pair_matrix(k, lambda i, j: block(x, t, i, j))
    singlet = serr = None
    if k % 2:
        if fam == "C":
            kv = [phi(2 * xi, 4 * t, ctl) for xi in x]
        else:
            kv = [phi(xi, t, ctl) for xi in x]
        singlet = np.array([v.value for v in kv])
        serr = np.array([v.tail_bound for v in kv])
    raw, bound = _assemble(k, vals, errs, singlet, serr)
    return _finish(raw, bound, "pfaffian", len(combinat.enumerate_pair_partitions(k)))


def survival_D(x, t, ctl=None):
    """Survival probability in ``x_1 > ... > x_{k-1} > |x_k|, x_1 + x_2 < 1``."""
    ctl = ctl or DEFAULT_CONTROL
    x = np.asarray(x, dtype=float)
    k = len(x)
    datum = RootDatum("D", k)
    x = _check_alcove(datum, x)
    _check_t(t)
    if t == 0:
        return SurvivalResult(1.0, 0.0, "pfaffian", 0)

    def entry(i, j):
        a = phi(x[i] - x[j], 2 * t, ctl)
        b = phi(x[i] + x[j], 2 * t, ctl)
        return a.value * b.value, a.tail_bound + b.tail_bound

    vals, errs = _pair_matrix(k, entry)
    raw, bound = _assemble(k, vals, errs)
    return _finish(raw, bound, "pfaffian", len(combinat.enumerate_pair_partitions(k)))


# (short root, long root, sign) for the three rectangles of the G2 alcove
_G2_RECTANGLES = (
    ((1, -1, 0), (-1, -1, 2), 1),
    ((-1, 0, 1), (1, -2, 1), -1),
    ((0, -1, 1), (-2, 1, 1), 1),
)


def survival_G2(x, t, ctl=None):
    """Survival probability in the G2 alcove as a signed sum of three rectangles.

    Each rectangle is the product of two strip survivals along an
    orthogonal short/long root pair.
    """
    ctl = ctl or DEFAULT_CONTROL
    datum = RootDatum("G2")
    x = _check_alcove(datum, x)
    _check_t(t)
    if t == 0:
        return SurvivalResult(1.0, 0.0, "partition-sum", 3)
    terms = []
    bound = 0.0
    for a, b, sign in _G2_RECTANGLES:
        a, b = np.array(a, float), np.array(b, float)
        pa = phi(float(x @ a), float(a @ a) * t, ctl)
        pb = phi(float(x @ b), float(b @ b) * t, ctl)
        terms.append(sign * pa.value * pb.value)
        bound += pa.tail_bound + pb.tail_bound
    return _finish(math.fsum(terms), bound, "partition-sum", 3)


def survival_F4(*args, **kwargs):
    raise UnsupportedFormulaError(F4_MESSAGE)


def survival(query):
    """Dispatch a :class:`SurvivalQuery` to the formula for its family."""
    fam = query.datum.family
    x, t, ctl = query.x, query.t, query.ctl
    if fam == "A":
        return survival_A(x, t, ctl)
    if fam == "B":
        return survival_B(x, t, ctl)
    if fam == "C":
        return survival_C(x, t, ctl)
    if fam == "D":
        return survival_D(x, t, ctl)
    if fam == "G2":
        return survival_G2(x, t, ctl)
    raise UnsupportedFormulaError(F4_MESSAGE)


def survival_images(datum, x, t, tol=1e-9):
    """Image-sum evaluation for rank-2 alcoves, wrapped as a result."""
    spec = imagesum.spec_from_datum(datum)
    x = _check_alcove(datum, x)
    if t == 0:
        return SurvivalResult(1.0, 0.0, "image-sum", 1)
    val, info = imagesum.survival_via_images(spec, x, t, tol, return_info=True)
    return _finish(val, info["tail_bound"], "image-sum", info["images"])
