"""Dirichlet and Neumann Laplacian eigenfunctions on alcoves.

For a weight ``p`` (``<alpha_vee, p>`` integral for every root)

    f_p(x) = sum_{w in W} eps(w) exp(2 pi i <x, w p>),
    g_p(x) = sum_{w in W} exp(2 pi i <x, w p>),

are eigenfunctions of the Laplacian with eigenvalue ``-4 pi^2 <p, p>``,
with Dirichlet (``f_p``, ``p`` strictly dominant) or Neumann (``g_p``,
``p`` dominant) boundary conditions on the alcove.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .rootsys import RootDatum, coroot

ORBIT_CAP = 100_000
_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Weight:
    """An element of the weight lattice of ``datum``."""

    datum: RootDatum
    p: np.ndarray

    def __post_init__(self):
        p = self.datum.project(np.asarray(self.p, dtype=float))
        pair = np.array([coroot(a) @ p for a in self.datum.positive_roots])
        if not np.allclose(pair, np.round(pair), atol=_TOL):
            raise DomainError("p is not in the weight lattice")
        p = np.array(p)
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @classmethod
    def from_coefficients(cls, datum, coeffs):
        """Weight ``sum_i c_i omega_i`` in the fundamental weight basis."""
        coeffs = np.asarray(coeffs, dtype=float)
        return cls(datum, coeffs @ fundamental_weights(datum))

    @property
    def dominant(self):
        return bool(np.all(self.datum.simple_roots @ self.p >= -_TOL))

    @property
    def strictly_dominant(self):
        return bool(np.all(self.datum.simple_roots @ self.p > _TOL))

    def orbit(self):
        """Images ``w p`` for every ``w`` in ``W`` with their signs."""
        mats, signs = self.datum.weyl_group()
        if len(mats) > ORBIT_CAP:
            raise ValueError("Weyl group too large")
        return mats @ self.p, signs


@dataclass(frozen=True)
class EigenfunctionValue:
    re: np.ndarray
    im: np.ndarray

    @property
    def complex(self):
        return np.asarray(self.re) + 1j * np.asarray(self.im)


def fundamental_weights(datum):
    """Rows ``omega_j`` with ``<alpha_i_vee, omega_j> = delta_ij`` in the root span."""
    cor = np.array([coroot(a) for a in datum.simple_roots])
    return np.linalg.pinv(cor).T


def _orbit_sum(weight, x, signed):
    x = np.asarray(x, dtype=float)
    imgs, signs = weight.orbit()
    phase = 2.0 * math.pi * (x @ imgs.T)
    c = signs if signed else np.ones(len(signs))
    return EigenfunctionValue(np.cos(phase) @ c, np.sin(phase) @ c)


def f_p(weight, x):
    """Dirichlet eigenfunction ``sum_w eps(w) exp(2 pi i <x, w p>)``.

    Parameters
    ----------
    weight : Weight
        Strictly dominant.
    x : array_like, shape (..., n)

    Returns
    -------
    EigenfunctionValue
    """
    if not weight.strictly_dominant:
        raise DomainError("f_p needs a strictly dominant weight")
    return _orbit_sum(weight, x, True)


def g_p(weight, x):
    """Neumann eigenfunction ``sum_w exp(2 pi i <x, w p>)`` for dominant ``p``."""
    if not weight.dominant:
        raise DomainError("g_p needs a dominant weight")
    return _orbit_sum(weight, x, False)


@dataclass(frozen=True)
class RealnessWitness:
    real: bool
    w: np.ndarray = None
    sign: int = 0

    def __bool__(self):
        return self.real


def is_real(weight):
    """Whether ``-p`` lies in the orbit ``W p``.

    Returns
    -------
    RealnessWitness
        Truthy when real; carries the witness ``w1`` with ``w1 p = -p``
        and its sign. A sign of ``-1`` means ``f_p`` is ``i`` times a real
        sine sum.
    """
    mats, signs = weight.datum.weyl_group()
    imgs = mats @ weight.p
    hit = np.flatnonzero(np.all(np.abs(imgs + weight.p) < _TOL, axis=1))
    if len(hit) == 0:
        return RealnessWitness(False)
    i = hit[0]
    return RealnessWitness(True, mats[i], int(signs[i]))


def real_form(weight, x, kind="f"):
    """Real trigonometric form of ``f_p`` or ``g_p`` for a real weight.

    ``f_p`` equals ``sum_w eps(w) cos(2 pi <x, w p>)`` when the witness has
    sign +1, and ``i`` times the sine sum when it has sign -1; ``g_p`` is
    always the cosine sum.
    """
    wit = is_real(weight)
    if not wit:
        raise DomainError("weight is not real")
    x = np.asarray(x, dtype=float)
    imgs, signs = weight.orbit()
    phase = 2.0 * math.pi * (x @ imgs.T)
    if kind == "g":
        return np.cos(phase).sum(axis=-1)
    if wit.sign > 0:
        return np.cos(phase) @ signs
    return np.sin(phase) @ signs


def H(x, datum):
    """Product ``prod_{alpha > 0} sin(pi <x, alpha>)``."""
    return np.prod(np.sin(math.pi * datum.pairings(np.asarray(x, dtype=float))), axis=-1)


def eigenvalue(weight):
    """Laplacian eigenvalue ``-4 pi^2 <p, p>`` of ``f_p`` and ``g_p``."""
    return -4.0 * math.pi ** 2 * float(weight.p @ weight.p)


def product_eigenvalue_A(k):
    """Eigenvalue of ``H`` for the type A alcove in ``R^k``."""
    return -math.pi ** 2 * k * (k - 1) * (k + 1) / 3.0


def laplacian_fd(fun, x, h=1e-3):
    """Central-difference Laplacian of a scalar function on ``R^n``."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    f0 = fun(x)
    acc = -2.0 * n * f0
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        acc = acc + fun(x + e) + fun(x - e)
    return acc / (h * h)


@dataclass(frozen=True)
class HotSpotsReport:
    passed: bool
    interior_max: float
    boundary_sup: float
    margin: float

    def __bool__(self):
        return self.passed


def hot_spots_check(weight, samples=10_000, seed=0):
    """Check that the real Neumann eigenfunction peaks on the boundary.

    Samples ``samples`` uniform interior points and ten times as many
    boundary points (spread evenly over the facets, plus the vertices),
    and compares the interior maximum of the cosine form of ``g_p`` with
    the boundary supremum.
    """
    if not np.any(np.abs(weight.p) > _TOL):
        raise DomainError("p = 0 gives a constant function")
    if not weight.dominant:
        raise DomainError("hot spots check needs a dominant weight")
    if not is_real(weight):
        raise DomainError("weight is not real")
    datum = weight.datum
    rng = np.random.default_rng(seed)
    inner = datum.sample_alcove(samples, rng)
    nfacet = len(datum.alcove_vertices)
    bnd = np.concatenate([datum.sample_facets(-(-10 * samples // nfacet), rng),
                          datum.alcove_vertices])
    gi = real_form(weight, inner, "g")
    gb = real_form(weight, bnd, "g")
    imax, bsup = float(gi.max()), float(gb.max())
    return HotSpotsReport(imax < bsup, imax, bsup, bsup - imax)
