"""Survival probabilities by the method of images.

For an alcove ``A`` of an affine reflection group ``W_a`` in dimension 1
or 2, the killed heat kernel is the signed sum of free Gaussian kernels
over the group images, so that

    P_x(T > t) = sum_{w in W_a} eps(w) int_A p_t(x, w y) dy.

The group is enumerated breadth first from the wall reflections and
truncated once image alcoves lie farther than ``diam(A) + c sqrt(t)``
from ``x``; the neglected terms are bounded by the Gaussian mass outside
that radius because the images tile the plane.
"""
import math
from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .errors import DomainError
from .quadrature import adaptive_simplex
from .rootsys import AffineRoot, RootDatum, coroot

TAIL_C = 8.0
ELEMENT_CAP = 1_000_000


@dataclass(frozen=True, eq=False)
class AlcoveSpec2D:
    """An alcove of dimension 1 or 2 presented by its walls.

    Attributes
    ----------
    generators : tuple of AffineRoot
        Walls, oriented positive on the alcove.
    vertices : ndarray, shape (d + 1, n)
        Simplex vertices in ambient coordinates.
    basis : ndarray, shape (n, d)
        Orthonormal basis of the affine span directions.
    datum : RootDatum or None
    """

    generators: tuple
    vertices: np.ndarray
    basis: np.ndarray
    datum: RootDatum = None

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        b = np.asarray(self.basis, dtype=float)
        if b.shape != (v.shape[1], v.shape[0] - 1):
            raise ValueError("basis shape does not match vertices")
        if v.shape[0] not in (2, 3):
            raise ValueError("only rank 1 and rank 2 alcoves are supported")
        e = (v[1:] - v[0]) @ b
        if abs(np.linalg.det(e)) < 1e-12:
            raise ValueError("degenerate simplex")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "generators", tuple(self.generators))

    @property
    def dim(self):
        return self.basis.shape[1]

    def local(self, x):
        """Coordinates of ``x`` in the orthonormal basis."""
        return np.asarray(x, dtype=float) @ self.basis

    def contains(self, x):
        return all(g(x) > 0 for g in self.generators)


def strip_spec():
    """The unit interval as a rank-1 alcove."""
    gens = (AffineRoot([1.0], 0), AffineRoot([-1.0], -1))
    return AlcoveSpec2D(gens, np.array([[0.0], [1.0]]), np.eye(1))


def _plane_basis(n):
    # orthonormal basis of the sum-zero plane in R^3
    a = np.array([[1.0, -1.0, 0.0], [1.0, 1.0, -2.0]]).T
    return a / np.linalg.norm(a, axis=0)


def spec_from_datum(datum):
    """Planar alcove description for a rank-2 root datum (A with k=3, B2, C2, G2)."""
    if datum.rank != 2:
        raise ValueError("image sums are offered for rank 2 only")
    basis = _plane_basis(3) if datum.projects else np.eye(2)
    return AlcoveSpec2D(datum.walls, datum.alcove_vertices, basis, datum)


def c2_block_spec():
    """Triangle ``{1/2 > u > v > 0}``."""
    gens = (AffineRoot([1.0, -1.0], 0), AffineRoot([0.0, 2.0], 0), AffineRoot([-2.0, 0.0], -1))
    verts = np.array([[0.0, 0.0], [0.5, 0.0], [0.5, 0.5]])
    return AlcoveSpec2D(gens, verts, np.eye(2))


def b2_block_spec():
    """Triangle ``{1 - v > u > v > 0}``."""
    gens = (AffineRoot([1.0, -1.0], 0), AffineRoot([0.0, 1.0], 0), AffineRoot([-1.0, -1.0], -1))
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.5]])
    return AlcoveSpec2D(gens, verts, np.eye(2))


def group_key(m, b, q=1e-9):
    """Quantized key of the isometry ``y -> m y + b``."""
    return tuple(np.rint(np.concatenate([np.ravel(m), np.ravel(b)]) / q).astype(np.int64))


def _local_reflections(spec):
    refl = []
    for g in spec.generators:
        a = spec.basis.T @ g.alpha
        av = spec.basis.T @ coroot(g.alpha)
        refl.append((np.eye(spec.dim) - np.outer(av, a), g.level * av))
    return refl


def enumerate_images(spec, center, radius, cap=ELEMENT_CAP):
    """Group elements whose image alcove comes within ``radius`` of ``center``.

    Elements act on local coordinates as ``y -> m y + b``.

    Returns
    -------
    mats : ndarray, shape (N, d, d)
    shifts : ndarray, shape (N, d)
    signs : ndarray, shape (N,)
    """
    verts = spec.local(spec.vertices)
    cen = verts.mean(axis=0)
    diam = max(np.linalg.norm(p - q) for p in verts for q in verts)
    reach = radius + 2.0 * diam
    refl = _local_reflections(spec)
    d = spec.dim
    start = (np.eye(d), np.zeros(d), 1)
    seen = {group_key(start[0], start[1])}
    out = [start]
    queue = deque([start])
    while queue:
        m, b, s = queue.popleft()
        for rm, rb in refl:
            m2 = m @ rm
            b2 = m @ rb + b
            key = group_key(m2, b2)
            if key in seen:
                continue
            seen.add(key)
            if np.linalg.norm(m2 @ cen + b2 - center) > reach:
                continue
            elem = (m2, b2, -s)
            out.append(elem)
            queue.append(elem)
            if len(out) > cap:
                raise RuntimeError("group enumeration exceeded the element cap")
    mats = np.array([e[0] for e in out])
    shifts = np.array([e[1] for e in out])
    signs = np.array([e[2] for e in out], dtype=float)
    return mats, shifts, signs


def survival_via_images(spec, x, t, tol=1e-9, c=TAIL_C, return_info=False):
    """Survival probability of standard Brownian motion in an alcove.

    Parameters
    ----------
    spec : AlcoveSpec2D
    x : array_like
        Start point in ambient coordinates, strictly inside the alcove.
    t : float
        Positive time.
    tol : float
        Absolute tolerance of the quadrature.
    c : float
        Truncation radius in units of ``sqrt(t)``.
    return_info : bool
        Also return a dict with the image count and error estimates.
    """
    x = np.asarray(x, dtype=float)
    if spec.datum is not None:
        x = spec.datum.project(x)
    if not spec.contains(x):
        raise DomainError("x not in alcove")
    if not t > 0:
        raise DomainError("t must be positive")
    y0 = spec.local(x)
    radius = c * math.sqrt(t)
    mats, shifts, signs = enumerate_images(spec, y0, radius)
    # p_t(x, w y) = p_t(w^{-1} x, y)
    pre = np.einsum("nji,nj->ni", mats, y0 - shifts)
    verts = spec.local(spec.vertices)
    near = _distance_to_simplex(pre, verts) <= radius
    pre, sg = pre[near], signs[near]
    tail = _gauss_tail(spec.dim, c)
    if spec.dim == 1:
        value, qerr = _interval_sum(pre[:, 0], sg, verts[:, 0], t), 0.0
    else:
        norm = 1.0 / (2.0 * math.pi * t)

        def kernel(pts):
            out = np.zeros(len(pts))
            for lo in range(0, len(pre), 512):
                p = pre[lo:lo + 512]
                d2 = ((pts[:, None, :] - p[None, :, :]) ** 2).sum(-1)
                out += np.exp(-d2 / (2.0 * t)) @ sg[lo:lo + 512]
            return norm * out

        value, qerr, _ = adaptive_simplex(kernel, verts, tol, n=5, min_level=2,
                                             h_max=2.0 * math.sqrt(t))
    if return_info:
        return value, {"images": int(len(pre)), "quad_error": qerr, "tail_bound": tail + qerr}
    return value


def _gauss_tail(d, c):
    # mass of a d-dimensional standard Gaussian beyond radius c
    if d == 1:
        return math.erfc(c / math.sqrt(2.0))
    return math.exp(-0.5 * c * c)


def _interval_sum(pre, signs, ends, t):
    lo, hi = min(ends), max(ends)
    s = math.sqrt(2.0 * t)
    # P(B_t in (lo, hi)) from each pre-image, written via erfc differences
    mass = 0.5 * (erfc((lo - pre) / s) - erfc((hi - pre) / s))
    return math.fsum(mass * signs)


def _distance_to_simplex(pts, verts):
    """Lower bound on the distance from each point to the simplex."""
    cen = verts.mean(axis=0)
    rad = max(np.linalg.norm(v - cen) for v in verts)
    return np.maximum(np.linalg.norm(pts - cen, axis=1) - rad, 0.0)


def block_survival_C2(u, v, t, tol=1e-9):
    """Survival of planar Brownian motion in ``{1/2 > u > v > 0}``."""
    if not 0.5 > u > v > 0:
        raise DomainError("start outside {1/2 > u > v > 0}")
    if t == 0:
        return 1.0
    return survival_via_images(c2_block_spec(), [u, v], t, tol)


def block_survival_B2(u, v, t, tol=1e-9):
    """Survival of planar Brownian motion in ``{1 - v > u > v > 0}``."""
    if not (1 - v > u > v > 0):
        raise DomainError("start outside {1 - v > u > v > 0}")
    if t == 0:
        return 1.0
    return survival_via_images(b2_block_spec(), [u, v], t, tol)
