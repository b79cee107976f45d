"""Root systems of types A, B, C, D, G2 and the geometry of their alcoves.

Vectors live in the coordinate space R^n with n = ``ambient_dim``. For the
families A and G2 the root span is the sum-zero hyperplane; points are
projected onto it before use, which leaves every root pairing unchanged.
"""
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import DomainError

FAMILIES = ("A", "B", "C", "D", "G2")

# |W| caps for explicit group enumeration
_MAX_K_A = 8
_MAX_K_BCD = 6


def _unit(n, i):
    v = np.zeros(n)
    v[i] = 1.0
    return v


def coroot(alpha):
    """Return the coroot ``2 alpha / <alpha, alpha>``."""
    alpha = np.asarray(alpha, dtype=float)
    nrm = alpha @ alpha
    if nrm == 0:
        raise ValueError("zero root vector")
    return 2.0 * alpha / nrm


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class RootDatum:
    """A crystallographic root system with its affine alcove.

    Parameters
    ----------
    family : {"A", "B", "C", "D", "G2"}
        Cartan type. ``A`` with parameter ``k`` is A_{k-1} acting on R^k.
    k : int
        Rank parameter. Ignored for ``G2`` (fixed at 2).

    Notes
    -----
    Positive roots are ordered lexicographically by their index pattern
    ``(i, j)``, so matrices indexed by coordinates are reproducible.
    """

    family: str
    k: int = 2

    def __post_init__(self):
        fam = str(self.family).upper()
        if fam not in FAMILIES:
            raise ValueError(f"unsupported family {self.family!r}; expected one of {FAMILIES}")
        object.__setattr__(self, "family", fam)
        if fam == "G2":
            object.__setattr__(self, "k", 2)
            return
        k = int(self.k)
        object.__setattr__(self, "k", k)
        if k < 2:
            raise ValueError(f"{fam} requires k >= 2, got {k}")
        if fam == "D" and k < 3:
            # D_2 is reducible and has no highest root
            raise ValueError("D requires k >= 3")

    # ------------------------------------------------------------------
    @property
    def ambient_dim(self):
        return 3 if self.family == "G2" else self.k

    @property
    def rank(self):
        if self.family == "A":
            return self.k - 1
        return 2 if self.family == "G2" else self.k

    @property
    def projects(self):
        """Whether points are projected onto the sum-zero hyperplane."""
        return self.family in ("A", "G2")

    @cached_property
    def positive_roots(self):
        n, fam = self.ambient_dim, self.family
        e = [_unit(n, i) for i in range(n)]
        roots = []
        if fam == "G2":
            e1, e2, e3 = e
            roots = [e3 - e1, e3 - e2, e1 - e2,
                     -2 * e1 + e2 + e3, -2 * e2 + e1 + e3, 2 * e3 - e1 - e2]
        else:
            for i, j in itertools.combinations(range(n), 2):
                roots.append(e[i] - e[j])
                if fam != "A":
                    roots.append(e[i] + e[j])
            if fam == "B":
                roots.extend(e)
            elif fam == "C":
                roots.extend(2 * v for v in e)
        return _frozen(roots)

    @cached_property
    def simple_roots(self):
        n, fam = self.ambient_dim, self.family
        e = [_unit(n, i) for i in range(n)]
        if fam == "G2":
            return _frozen([e[0] - e[1], -2 * e[0] + e[1] + e[2]])
        base = [e[i] - e[i + 1] for i in range(n - 1)]
        if fam == "B":
            base.append(e[-1])
        elif fam == "C":
            base.append(2 * e[-1])
        elif fam == "D":
            base.append(e[-2] + e[-1])
        return _frozen(base)

    @cached_property
    def highest_root(self):
        n, fam = self.ambient_dim, self.family
        e = [_unit(n, i) for i in range(n)]
        if fam == "A":
            return _frozen(e[0] - e[-1])
        if fam == "C":
            return _frozen(2 * e[0])
        if fam == "G2":
            return _frozen(2 * e[2] - e[0] - e[1])
        return _frozen(e[0] + e[1])

    @cached_property
    def rho(self):
        """Half the sum of the positive roots."""
        return _frozen(0.5 * self.positive_roots.sum(axis=0))

    # ------------------------------------------------------------------
    def project(self, x):
        """Project onto the root span (sum-zero plane for A and G2)."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.ambient_dim:
            raise DomainError(
                f"expected {self.ambient_dim} coordinates for {self.label}, got {x.shape[-1]}")
        if self.projects:
            return x - x.mean(axis=-1, keepdims=True)
        return x

    @property
    def label(self):
        return "G2" if self.family == "G2" else f"{self.family}{self.rank}"

    def pairings(self, x):
        """Values <x, alpha> for all positive roots (last axis)."""
        return np.asarray(x, dtype=float) @ self.positive_roots.T

    def alcove_contains(self, X):
        """Vectorized strict membership in the alcove for rows of ``X``."""
        p = self.pairings(X)
        return np.all((p > 0) & (p < 1), axis=-1)

    def chamber_contains(self, X):
        """Vectorized strict membership in the fundamental chamber."""
        p = np.asarray(X, dtype=float) @ self.simple_roots.T
        return np.all(p > 0, axis=-1)

    @cached_property
    def walls(self):
        """Affine roots whose zero sets bound the alcove, positive inside."""
        w = [AffineRoot(a, 0) for a in self.simple_roots]
        w.append(AffineRoot(-self.highest_root, -1))
        return tuple(w)

    @cached_property
    def alcove_vertices(self):
        """Vertices of the alcove simplex, one per omitted wall."""
        n = self.ambient_dim
        rows = np.array([w.alpha for w in self.walls])
        rhs = np.array([float(w.level) for w in self.walls])
        verts = []
        for skip in range(len(rows)):
            a = np.delete(rows, skip, axis=0)
            b = np.delete(rhs, skip)
            if self.projects:
                a = np.vstack([a, np.ones(n)])
                b = np.append(b, 0.0)
            verts.append(np.linalg.solve(a, b))
        # order so that the origin comes first
        verts = verts[-1:] + verts[:-1]
        return _frozen(verts)

    @cached_property
    def barycenter(self):
        return _frozen(self.alcove_vertices.mean(axis=0))

    def in_coroot_lattice(self, d, atol=1e-9):
        """Whether ``d`` lies in the coroot lattice (translation subgroup)."""
        d = np.asarray(d, dtype=float)
        if self.family == "G2":
            return bool(abs(d.sum()) < atol and np.allclose(3 * d, np.round(3 * d), atol=atol))
        if not np.allclose(d, np.round(d), atol=atol):
            return False
        s = int(np.round(d).sum())
        if self.family == "A":
            return s == 0
        if self.family in ("B", "D"):
            return s % 2 == 0
        return True

    # ------------------------------------------------------------------
    def weyl_group(self):
        """Finite Weyl group as explicit matrices.

        Returns
        -------
        mats : ndarray, shape (|W|, n, n)
        signs : ndarray of int, shape (|W|,)
            ``det(w)`` for each element.
        """
        return _weyl_group(self.family, self.k)

    def sample_alcove(self, n, rng):
        """Uniform samples from the alcove simplex."""
        lam = rng.dirichlet(np.ones(len(self.alcove_vertices)), size=n)
        return lam @ self.alcove_vertices

    def sample_facets(self, n_per_facet, rng):
        """Uniform samples on each facet of the alcove simplex."""
        verts = self.alcove_vertices
        out = []
        for skip in range(len(verts)):
            face = np.delete(verts, skip, axis=0)
            lam = rng.dirichlet(np.ones(len(face)), size=n_per_facet)
            out.append(lam @ face)
        return np.concatenate(out)


def _perm_sign(perm):
    perm = list(perm)
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _weyl_group_cached():
    cache = {}

    def build(family, k):
        key = (family, k)
        if key in cache:
            return cache[key]
        if family == "G2":
            datum = RootDatum("G2")
            gens = [AffineRoot(a, 0).reflection().w for a in datum.simple_roots]
            mats = _closure(gens)
        else:
            cap = _MAX_K_A if family == "A" else _MAX_K_BCD
            if k > cap:
                raise ValueError(f"Weyl group enumeration capped at k <= {cap} for {family}")
            mats = []
            eye = np.eye(k)
            if family == "A":
                sign_sets = [np.ones(k)]
            else:
                sign_sets = [np.array(s) for s in itertools.product((1.0, -1.0), repeat=k)
                             if family != "D" or np.prod(s) > 0]
            for perm in itertools.permutations(range(k)):
                p = eye[list(perm)]
                for s in sign_sets:
                    mats.append(s[:, None] * p)
            mats = np.array(mats)
        signs = np.rint(np.linalg.det(mats)).astype(int)
        mats.setflags(write=False)
        signs.setflags(write=False)
        cache[key] = (mats, signs)
        return cache[key]

    return build


_weyl_group = _weyl_group_cached()


def _closure(gens, cap=100000):
    elems = [np.eye(len(gens[0]))]
    keys = {_matkey(elems[0])}
    frontier = list(elems)
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = g @ s
                key = _matkey(h)
                if key not in keys:
                    keys.add(key)
                    elems.append(h)
                    nxt.append(h)
                    if len(elems) > cap:
                        raise ValueError("group closure exceeds cap")
        frontier = nxt
    return np.array(elems)


def _matkey(m, q=1e-9):
    return tuple(np.rint(np.asarray(m).ravel() / q).astype(np.int64))


@dataclass(frozen=True, eq=False)
class AffineRoot:
    """The affine functional ``x -> <alpha, x> - level``."""

    alpha: np.ndarray
    level: int = 0

    def __post_init__(self):
        a = _frozen(self.alpha)
        if not np.any(a):
            raise ValueError("zero root vector")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "level", int(self.level))

    def __call__(self, x):
        return np.asarray(x, dtype=float) @ self.alpha - self.level

    def reflection(self):
        """The affine reflection fixing the zero set, as an isometry."""
        av = coroot(self.alpha)
        w = np.eye(len(self.alpha)) - np.outer(av, self.alpha)
        return AffineIsometry(w, self.level * av)


def reflect_affine(lam, x):
    """Reflect ``x`` in the hyperplane ``lam(x) = 0``."""
    x = np.asarray(x, dtype=float)
    return x - np.multiply.outer(lam(x), coroot(lam.alpha))


@dataclass(frozen=True, eq=False)
class AffineIsometry:
    """The map ``x -> w x + shift`` with ``w`` orthogonal."""

    w: np.ndarray
    shift: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "w", _frozen(self.w))
        object.__setattr__(self, "shift", _frozen(self.shift))

    def __call__(self, x):
        return np.asarray(x, dtype=float) @ self.w.T + self.shift

    def __matmul__(self, other):
        """Composition ``self o other``."""
        return AffineIsometry(self.w @ other.w, self.w @ other.shift + self.shift)

    def inverse(self):
        wt = self.w.T
        return AffineIsometry(wt, -wt @ self.shift)

    @property
    def sign(self):
        return int(np.rint(np.linalg.det(self.w)))

    def key(self, q=1e-9):
        return _matkey(np.concatenate([self.w.ravel(), self.shift]), q)


def positive_roots(datum):
    """Positive roots of ``datum`` as rows, in deterministic order."""
    return datum.positive_roots


def in_alcove(datum, x):
    """Strict membership ``0 < <x, alpha> < 1`` for all positive roots."""
    return bool(datum.alcove_contains(datum.project(x)))


def in_chamber(datum, x):
    """Strict membership ``<x, alpha> > 0`` for all simple roots."""
    return bool(datum.chamber_contains(datum.project(x)))


def lattice_shell_sum(A, shell):
    """Signed count of lattice points on a shell of the lattice spanned by ``A``.

    The lattice is ``{v in span(A) : <v, beta> in Z for beta in A}`` with
    norm ``max |<v, beta>|`` and sign ``(-1)^#{beta : <v, beta> > 0}``.

    Parameters
    ----------
    A : sequence of integer vectors
        Pairwise orthogonal roots.
    shell : int
        Norm of the shell, at least 1.

    Returns
    -------
    int
        The exact signed sum.
    """
    shell = int(shell)
    if shell < 1:
        raise ValueError("shell must be >= 1")
    roots = [[Fraction(int(round(c))) for c in b] for b in A]
    for b in A:
        if not np.allclose(b, np.round(b)):
            raise ValueError("roots must have integer coordinates")
    dot = lambda u, v: sum(a * b for a, b in zip(u, v))
    for i, j in itertools.combinations(range(len(roots)), 2):
        if dot(roots[i], roots[j]) != 0:
            raise ValueError("roots are not pairwise orthogonal")
    if not roots:
        return 0
    norms = [dot(b, b) for b in roots]
    total = 0
    rng = range(-shell, shell + 1)
    for ks in itertools.product(rng, repeat=len(roots)):
        if max(abs(c) for c in ks) != shell:
            continue
        # v = sum_i (k_i / |b_i|^2) b_i is the unique lattice point with these pairings
        v = [sum(Fraction(c) / n * b[m] for c, n, b in zip(ks, norms, roots))
             for m in range(len(roots[0]))]
        pair = [dot(v, b) for b in roots]
        assert all(p.denominator == 1 for p in pair)
        total += (-1) ** sum(1 for p in pair if p > 0)
    return total
