"""Both sides of the affine De Bruijn formulas for the type A alcove.

For ``f(y) = f_1(y_1) ... f_k(y_k)`` the alternating integral

    L = int_A sum_{w in W_a} eps(w) f(w y) dy

over the alcove ``A = {y_1 > ... > y_k > y_1 - 1}`` of ``R^k`` equals

    Pf(J)                                            (k even),
    sum_l (-1)^(l+1) (int f_l) Pf(H without row/column l)   (k odd),

with ``J_ij = int (-1)^floor(y - z) f_i(y) f_j(z)`` and
``H_ij = int sgn(y - z) (1 + 2 floor|y - z|) f_i(y) f_j(z)``.

Both sides are computed independently: the left by adaptive simplex
quadrature of the image sum, the right by one-dimensional quadrature of
the correlation ``C_ij(w) = int f_i(z + w) f_j(z) dz`` in integer bands.
"""
import itertools
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from . import combinat
from .errors import DomainError
from .quadrature import adaptive_simplex
from .rootsys import RootDatum

K_MAX_LHS = 4
_SQRT2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class TestFunction:
    """A gaussian density or an interval indicator, times ``scale``.

    Attributes
    ----------
    kind : {"gaussian", "indicator"}
    a, b : float
        Mean and standard deviation for a gaussian, endpoints for an
        indicator.
    scale : float
    """

    __test__ = False  # not a pytest class

    kind: str
    a: float
    b: float
    scale: float = 1.0

    def __post_init__(self):
        if self.kind == "gaussian":
            if not self.b > 0:
                raise DomainError("gaussian sigma must be positive")
        elif self.kind == "indicator":
            if not self.a < self.b:
                raise DomainError("indicator needs a < b")
        else:
            raise DomainError(f"unknown test function kind {self.kind!r}")
        if not (math.isfinite(self.a) and math.isfinite(self.b) and math.isfinite(self.scale)):
            raise DomainError("test function parameters must be finite")

    @classmethod
    def gaussian(cls, mean, sigma, scale=1.0):
        return cls("gaussian", float(mean), float(sigma), float(scale))

    @classmethod
    def indicator(cls, a, b, scale=1.0):
        return cls("indicator", float(a), float(b), float(scale))

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        kind = d.pop("kind")
        scale = d.pop("scale", 1.0)
        if kind == "gaussian":
            return cls.gaussian(d["mean"], d["sigma"], scale)
        if kind == "indicator":
            return cls.indicator(d["a"], d["b"], scale)
        raise DomainError(f"unknown test function kind {kind!r}")

    def to_dict(self):
        if self.kind == "gaussian":
            return {"kind": "gaussian", "mean": self.a, "sigma": self.b, "scale": self.scale}
        return {"kind": "indicator", "a": self.a, "b": self.b, "scale": self.scale}

    @property
    def center(self):
        return self.a if self.kind == "gaussian" else 0.5 * (self.a + self.b)

    @property
    def decay_rate(self):
        """Rate ``c`` in ``|f(y)| <= C exp(-c y^2)``; infinite for compact support."""
        return 0.5 / self.b ** 2 if self.kind == "gaussian" else math.inf

    def radius(self, z):
        """Half-width outside which the function is negligible at ``z`` deviations."""
        return z * self.b if self.kind == "gaussian" else 0.5 * (self.b - self.a)

    def integral(self):
        return self.scale if self.kind == "gaussian" else self.scale * (self.b - self.a)

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        if self.kind == "gaussian":
            return self.scale * np.exp(-0.5 * ((y - self.a) / self.b) ** 2) / (_SQRT2PI * self.b)
        return self.scale * ((y >= self.a) & (y <= self.b)).astype(float)


@dataclass(frozen=True)
class DeBruijnControl:
    """Accuracy settings.

    tol : absolute tolerance of the simplex quadrature on the left side.
    z : gaussian truncation in standard deviations.
    nodes : Gauss-Legendre nodes per band on the right side.
    """

    tol: float = 1e-7
    z: float = 9.0
    nodes: int = 40


DEFAULT_CONTROL = DeBruijnControl()


@dataclass(frozen=True)
class SideValue:
    value: float
    error_bound: float
    terms: int


def _check(fs):
    fs = list(fs)
    if len(fs) < 2:
        raise DomainError("need at least two test functions")
    for f in fs:
        if not isinstance(f, TestFunction):
            raise DomainError("test functions must be TestFunction instances")
    return fs


# ---------------------------------------------------------------- left side

def _line_integral(fs, U):
    """``int prod_i f_i(U_i + s) ds`` for each row of ``U``."""
    shape = U.shape[:-1]
    lo = np.full(shape, -np.inf)
    hi = np.full(shape, np.inf)
    pref = np.ones(shape)
    W = 0.0
    wm = np.zeros(shape)
    wmm = np.zeros(shape)
    ngauss = 0
    for i, f in enumerate(fs):
        u = U[..., i]
        pref = pref * f.scale
        if f.kind == "indicator":
            lo = np.maximum(lo, f.a - u)
            hi = np.minimum(hi, f.b - u)
        else:
            w = 1.0 / f.b ** 2
            m = f.a - u
            W += w
            wm = wm + w * m
            wmm = wmm + w * m * m
            pref = pref / (_SQRT2PI * f.b)
            ngauss += 1
    if ngauss == 0:
        return pref * np.maximum(hi - lo, 0.0)
    M = wm / W
    expo = np.exp(-0.5 * (wmm - W * M * M))
    rw = math.sqrt(W)
    mass = ndtr(rw * (hi - M)) - ndtr(rw * (lo - M))
    return pref * expo * (_SQRT2PI / rw) * np.maximum(mass, 0.0)


def _translations(fs, z):
    """Coroot lattice shifts ``l`` that can bring some alcove image near the support.

    Alcove coordinates move within ``[-1, 1]``, so a shift can contribute
    only if the windows ``c_i - l_i +- (r_i + 1)`` share a common point.
    """
    k = len(fs)
    c = np.array([f.center for f in fs])
    r = np.array([f.radius(z) for f in fs]) + 1.0
    base = c - c.mean()
    span = int(math.ceil(2 * r.max())) + 1
    rngs = [range(int(math.floor(base[i] - span)), int(math.ceil(base[i] + span)) + 1)
            for i in range(k - 1)]
    out = []
    for head in itertools.product(*rngs):
        l = np.array(head + (-sum(head),), dtype=float)
        d = c - l
        if np.max(d - r) <= np.min(d + r):
            out.append(l)
    return np.array(out)


def _permutations(k):
    perms, signs = [], []
    for p in itertools.permutations(range(k)):
        perms.append(p)
        inv = sum(1 for i in range(k) for j in range(i + 1, k) if p[i] > p[j])
        signs.append(-1.0 if inv % 2 else 1.0)
    return np.array(perms), np.array(signs)


def lhs_alternating_integral(fs, ctl=None):
    """Integral over the alcove of the alternating sum over ``W_a``.

    The alcove is the product of the simplex ``A_0`` in the sum-zero plane
    with the diagonal line; the line integral of ``f`` is taken in closed
    form, leaving a ``(k - 1)``-dimensional adaptive simplex quadrature.

    Parameters
    ----------
    fs : sequence of TestFunction
        ``k <= 4`` functions.
    ctl : DeBruijnControl, optional

    Returns
    -------
    SideValue
        ``terms`` counts the group images kept.
    """
    ctl = ctl or DEFAULT_CONTROL
    fs = _check(fs)
    k = len(fs)
    if k > K_MAX_LHS:
        raise DomainError(f"quadrature dimension too high: k={k} > {K_MAX_LHS}")
    verts = RootDatum("A", k).alcove_vertices
    shifts = _translations(fs, ctl.z)
    perms, signs = _permutations(k)
    # y = v + s (1, ..., 1) / sqrt(k) has dy = dv ds; the line integral runs in s / sqrt(k)
    root_k = math.sqrt(k)

    def integrand(V):
        acc = np.zeros(len(V))
        for p, sg in zip(perms, signs):
            U = V[:, None, p] + shifts[None, :, :]
            acc += sg * _line_integral(fs, U).sum(axis=1)
        return root_k * acc

    widths = [2.0 * f.b for f in fs if f.kind == "gaussian"]
    h_max = min(widths + [0.5])
    value, err, _ = adaptive_simplex(integrand, verts, ctl.tol, n=5, min_level=1, h_max=h_max)
    return SideValue(float(value), float(err), int(len(shifts) * len(perms)))


# --------------------------------------------------------------- right side

def correlation(fi, fj, w):
    """``C(w) = int f_i(z + w) f_j(z) dz``, the density of ``y - z`` weighted by ``f_i f_j``."""
    w = np.asarray(w, dtype=float)
    s = fi.scale * fj.scale
    if fi.kind == "gaussian" and fj.kind == "gaussian":
        sd = math.hypot(fi.b, fj.b)
        return s * np.exp(-0.5 * ((w - (fi.a - fj.a)) / sd) ** 2) / (_SQRT2PI * sd)
    if fi.kind == "indicator" and fj.kind == "indicator":
        return s * np.maximum(np.minimum(fi.b - w, fj.b) - np.maximum(fi.a - w, fj.a), 0.0)
    if fi.kind == "gaussian":
        # z in [a_j, b_j], z + w ~ N(mean_i, sigma_i)
        return s * (ndtr((fj.b + w - fi.a) / fi.b) - ndtr((fj.a + w - fi.a) / fi.b))
    return s * (ndtr((fi.b - w - fj.a) / fj.b) - ndtr((fi.a - w - fj.a) / fj.b))


def _support(f, z):
    if f.kind == "gaussian":
        return f.a - z * f.b, f.a + z * f.b
    return f.a, f.b


def _band_integral(fi, fj, weight, ctl):
    """``int weight(w) C_ij(w) dw`` with ``weight`` constant on integer bands."""
    ai, bi = _support(fi, ctl.z)
    aj, bj = _support(fj, ctl.z)
    lo, hi = ai - bj, bi - aj
    cuts = set(range(int(math.floor(lo)), int(math.ceil(hi)) + 1))
    # kinks of the trapezoid for two indicators
    if fi.kind == "indicator" and fj.kind == "indicator":
        cuts |= {fi.a - fj.b, fi.a - fj.a, fi.b - fj.b, fi.b - fj.a}
    cuts |= {lo, hi}
    pts = np.array(sorted(c for c in cuts if lo <= c <= hi))
    x, wt = np.polynomial.legendre.leggauss(ctl.nodes)
    a, b = pts[:-1], pts[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    W = mid[:, None] + half[:, None] * x[None, :]
    band = np.floor(mid)
    vals = correlation(fi, fj, W) * weight(band)[:, None]
    return math.fsum((vals @ wt) * half)


def _tail(fi, fj, ctl):
    """Bound on the mass neglected by truncating gaussian supports."""
    t = 0.0
    for f, g in ((fi, fj), (fj, fi)):
        if f.kind == "gaussian":
            # weight |1 + 2 floor|w|| is at most 1 + 2 |w|; absorb it generously
            reach = abs(fi.center - fj.center) + fi.radius(ctl.z) + fj.radius(ctl.z) + 1
            t += abs(f.scale * g.integral()) * math.erfc(ctl.z / math.sqrt(2)) * (1 + 2 * reach)
    return t


def _kernel_matrix(fs, weight, ctl):
    k = len(fs)
    M = np.zeros((k, k))
    tail = 0.0
    for i, j in itertools.combinations(range(k), 2):
        v = _band_integral(fs[i], fs[j], weight, ctl)
        M[i, j], M[j, i] = v, -v
        tail += _tail(fs[i], fs[j], ctl)
    return M, tail


def kernel_J(fs, ctl=None):
    """Matrix ``J_ij = int (-1)^floor(y - z) f_i(y) f_j(z) dy dz``."""
    ctl = ctl or DEFAULT_CONTROL
    return _kernel_matrix(_check(fs), lambda n: 1.0 - 2.0 * np.mod(n, 2), ctl)[0]


def kernel_H(fs, ctl=None):
    """Matrix ``H_ij = int sgn(y - z) (1 + 2 floor|y - z|) f_i(y) f_j(z) dy dz``."""
    ctl = ctl or DEFAULT_CONTROL
    return _kernel_matrix(_check(fs), _h_weight, ctl)[0]


def _h_weight(n):
    # on the band [n, n + 1): sgn = +1 and floor|w| = n for n >= 0;
    # sgn = -1 and floor|w| = -n - 1 for n < 0
    return np.where(n >= 0, 1.0 + 2.0 * n, -(1.0 + 2.0 * (-n - 1)))


def rhs_even(fs, ctl=None):
    """``Pf(J)`` for an even number of test functions."""
    ctl = ctl or DEFAULT_CONTROL
    fs = _check(fs)
    if len(fs) % 2:
        raise DomainError("rhs_even needs an even number of functions")
    J, tail = _kernel_matrix(fs, lambda n: 1.0 - 2.0 * np.mod(n, 2), ctl)
    return SideValue(combinat.pfaffian(J), tail, len(combinat.enumerate_pair_partitions(len(fs))))


def rhs_odd(fs, ctl=None):
    """``sum_l (-1)^(l+1) (int f_l) Pf(H minor l)`` for an odd number of functions."""
    ctl = ctl or DEFAULT_CONTROL
    fs = _check(fs)
    if len(fs) % 2 == 0:
        raise DomainError("rhs_odd needs an odd number of functions")
    H, tail = _kernel_matrix(fs, _h_weight, ctl)
    ints = np.array([f.integral() for f in fs])
    value = combinat.singlet_expansion(H, ints)
    return SideValue(value, tail, len(combinat.enumerate_pair_partitions(len(fs))))


def rhs(fs, ctl=None):
    fs = _check(fs)
    return rhs_even(fs, ctl) if len(fs) % 2 == 0 else rhs_odd(fs, ctl)


# ------------------------------------------------------------------ battery

DEFAULT_BATTERY = [
    {"name": "k2-gaussian", "functions": [
        {"kind": "gaussian", "mean": 0.0, "sigma": 0.3},
        {"kind": "gaussian", "mean": 0.5, "sigma": 0.3}]},
    {"name": "k3-gaussian", "functions": [
        {"kind": "gaussian", "mean": -0.3, "sigma": 0.25},
        {"kind": "gaussian", "mean": 0.0, "sigma": 0.2},
        {"kind": "gaussian", "mean": 0.4, "sigma": 0.3}]},
    {"name": "k4-gaussian", "functions": [
        {"kind": "gaussian", "mean": -0.5, "sigma": 0.15},
        {"kind": "gaussian", "mean": -0.1, "sigma": 0.15},
        {"kind": "gaussian", "mean": 0.3, "sigma": 0.15},
        {"kind": "gaussian", "mean": 0.7, "sigma": 0.15}]},
    {"name": "k2-indicator", "functions": [
        {"kind": "indicator", "a": -0.5, "b": 1.2},
        {"kind": "indicator", "a": 0.0, "b": 2.5}]},
    {"name": "k3-indicator", "functions": [
        {"kind": "indicator", "a": -1.0, "b": 0.7},
        {"kind": "indicator", "a": -0.2, "b": 1.5},
        {"kind": "indicator", "a": 0.3, "b": 1.1}]},
]


def load_battery(source=None):
    """Battery cases as ``(name, [TestFunction, ...])`` pairs.

    ``source`` is a path to a JSON file, a JSON string, a list of case
    dicts, or ``None`` for the built-in battery.
    """
    if source is None:
        cases = DEFAULT_BATTERY
    elif isinstance(source, (list, tuple)):
        cases = source
    else:
        text = str(source)
        if text.lstrip().startswith(("[", "{")):
            cases = json.loads(text)
        else:
            with open(text) as fh:
                cases = json.load(fh)
    if isinstance(cases, dict):
        cases = cases.get("cases", [cases])
    return [(c.get("name", f"case{i}"), [TestFunction.from_dict(f) for f in c["functions"]])
            for i, c in enumerate(cases)]


@dataclass(frozen=True)
class CaseReport:
    name: str
    k: int
    lhs: float
    rhs: float
    tolerance: float

    @property
    def difference(self):
        return abs(self.lhs - self.rhs)

    @property
    def passed(self):
        return self.difference <= self.tolerance


def check_case(name, fs, tolerance=1e-4, ctl=None):
    left = lhs_alternating_integral(fs, ctl)
    right = rhs(fs, ctl)
    return CaseReport(name, len(fs), left.value, right.value, tolerance)
