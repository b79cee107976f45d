"""Survival kernels of one-dimensional Brownian motion in the unit strip.

Every kernel has two representations: a theta series (eigenfunction
expansion, fast for large ``t``) and an image sum (reflection principle,
fast for small ``t``). Both carry an explicit truncation bound.
"""
import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = ["SeriesControl", "KernelValue", "phi", "psi", "late_upper_exit",
           "hit_survival", "first_hit_one_survival"]


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for series evaluations.

    Attributes
    ----------
    tol : float
        Absolute tolerance on the truncation tail.
    max_terms : int
        Hard cap on the number of summed terms.
    t_switch : float
        Below this time the image sum is used, above it the theta series.
    """

    tol: float = 1e-12
    max_terms: int = 10_000
    t_switch: float = 0.25

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if int(self.max_terms) < 1:
            raise ValueError("max_terms must be >= 1")
        if not self.t_switch > 0:
            raise ValueError("t_switch must be positive")


DEFAULT_CONTROL = SeriesControl()


@dataclass(frozen=True)
class KernelValue:
    value: float
    tail_bound: float
    terms_used: int

    def __float__(self):
        return float(self.value)


def _check(x, t):
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"x={x} outside [0, 1]")
    if not t >= 0:
        raise DomainError(f"t={t} must be nonnegative")


def hit_survival(x, level, t):
    """Probability that Brownian motion from ``x`` avoids ``level`` up to ``t``."""
    d = abs(x - level)
    if t == 0:
        return 1.0 if d > 0 else 0.0
    return math.erf(d / math.sqrt(2.0 * t))


def _theta(x, t, ctl, first, c0):
    """Sum ``c0 + sum_{l=first, first+2, ...} 4/(l pi) e^{-(l pi)^2 t/2} sin(pi l x)``."""
    terms = [c0]
    l = first
    n = 0
    while True:
        lam = 0.5 * (l * math.pi) ** 2
        coef = 4.0 / (l * math.pi)
        terms.append(coef * math.exp(-lam * t) * math.sin(math.pi * l * x))
        n += 1
        nxt = l + 2
        ratio = math.exp(-2.0 * math.pi ** 2 * t * (nxt + 1))
        tail = 4.0 / (nxt * math.pi) * math.exp(-0.5 * (nxt * math.pi) ** 2 * t) / (1.0 - ratio)
        if tail <= 0.5 * ctl.tol or n >= ctl.max_terms:
            return KernelValue(math.fsum(terms), tail, n)
        l = nxt


def _image_tail(n, s):
    # sum_{m >= n} erfc(m / s), using erfc(a + h) <= e^{-2ah - h^2} erfc(a)
    q = math.exp(-(2 * n + 1) / s ** 2)
    return math.erfc(n / s) / (1.0 - q)


def _image(x, t, ctl, alternating):
    """``P(T_0>t) + sum_n (+-1)^n [P(T_-n>t) - P(T_n>t)]``."""
    s = math.sqrt(2.0 * t)
    terms = [math.erf(x / s)]
    n = 0
    while True:
        n += 1
        # erf((n+x)/s) - erf((n-x)/s) written via erfc to avoid cancellation
        d = math.erfc((n - x) / s) - math.erfc((n + x) / s)
        terms.append(-d if (alternating and n % 2) else d)
        tail = _image_tail(n, s)
        if tail <= 0.5 * ctl.tol or n >= ctl.max_terms:
            return KernelValue(math.fsum(terms), tail, n + 1)


def _pick(t, ctl, method):
    if method is None:
        return "image" if t < ctl.t_switch else "theta"
    if method not in ("theta", "image"):
        raise ValueError(f"unknown representation {method!r}")
    return method


def phi(x, t, ctl=None, method=None):
    """Probability that Brownian motion from ``x`` stays in ``(0, 1)`` up to ``t``.

    Parameters
    ----------
    x : float
        Start point in ``[0, 1]``.
    t : float
        Time horizon, nonnegative.
    ctl : SeriesControl, optional
    method : {None, "theta", "image"}
        Force a representation; by default chosen by ``ctl.t_switch``.

    Returns
    -------
    KernelValue
    """
    ctl = ctl or DEFAULT_CONTROL
    _check(x, t)
    if x == 0.0 or x == 1.0:
        return KernelValue(0.0, 0.0, 0)
    if t == 0:
        return KernelValue(1.0, 0.0, 0)
    if _pick(t, ctl, method) == "theta":
        return _theta(x, t, ctl, 1, 0.0)
    return _image(x, t, ctl, alternating=True)


def psi(x, t, ctl=None, method=None):
    """Strip survival plus twice the probability of exiting through 1 by ``t``.

    ``psi(x, t) = P(T_{0,1} > t) + 2 P(T_1 < T_0, T_1 <= t)``. It tends to
    ``2x`` as ``t`` grows.
    """
    ctl = ctl or DEFAULT_CONTROL
    _check(x, t)
    if x == 0.0:
        return KernelValue(0.0, 0.0, 0)
    if x == 1.0:
        return KernelValue(2.0, 0.0, 0)
    if t == 0:
        return KernelValue(1.0, 0.0, 0)
    if _pick(t, ctl, method) == "theta":
        return _theta(x, t, ctl, 2, 2.0 * x)
    return _image(x, t, ctl, alternating=False)


def late_upper_exit(x, t, ctl=None, method=None):
    """Probability of hitting 1 before 0, and only after time ``t``.

    The clock is that of a difference of two independent Brownian
    motions, which runs at twice the standard rate: the value equals
    ``P_x(T_0 > T_1 > 2t)`` for standard Brownian motion.

    The theta form is ``2 sum_n (-1)^(n+1)/(pi n) e^{-pi^2 n^2 t} sin(pi n x)``;
    the image form is ``x - sum_{n odd} [erfc((n-x)/sqrt(4t)) - erfc((n+x)/sqrt(4t))]``.
    """
    ctl = ctl or DEFAULT_CONTROL
    if not 0.0 < x < 1.0:
        raise DomainError(f"x={x} outside (0, 1)")
    if not t > 0:
        raise DomainError(f"t={t} must be positive")
    if _pick(2.0 * t, ctl, method) == "theta":
        terms = []
        n = 0
        while True:
            n += 1
            sgn = 1.0 if n % 2 else -1.0
            terms.append(sgn * 2.0 / (math.pi * n) * math.exp(-(math.pi * n) ** 2 * t)
                         * math.sin(math.pi * n * x))
            m = n + 1
            ratio = math.exp(-math.pi ** 2 * t * (2 * m + 1))
            tail = 2.0 / (math.pi * m) * math.exp(-(math.pi * m) ** 2 * t) / (1.0 - ratio)
            if tail <= 0.5 * ctl.tol or n >= ctl.max_terms:
                return KernelValue(math.fsum(terms), tail, n)
    s = math.sqrt(4.0 * t)
    terms = [x]
    n = -1
    while True:
        n += 2
        terms.append(-(math.erfc((n - x) / s) - math.erfc((n + x) / s)))
        tail = _image_tail(n + 1, s)
        if tail <= 0.5 * ctl.tol or n >= ctl.max_terms:
            return KernelValue(math.fsum(terms), tail, (n + 1) // 2)


def first_hit_one_survival(x, t, ctl=None):
    """``P_x(T_1 <= t, T_1 < T_0)`` for standard Brownian motion."""
    v = late_upper_exit(x, 0.5 * t, ctl)
    return KernelValue(x - v.value, v.tail_bound, v.terms_used)
