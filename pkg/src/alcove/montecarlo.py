"""Monte Carlo first-exit simulation of Brownian motion.

Paths are grouped in fixed blocks of ``BLOCK`` paths. Block ``b`` draws
from a Philox counter-based generator keyed by ``(seed, b)``, so results
do not depend on how blocks are distributed over workers.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError
from .rootsys import RootDatum

BLOCK = 1024
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings.

    Attributes
    ----------
    paths : int
    dt : float
        Euler step.
    horizon : float
        Longest simulated time; paths alive at the horizon are censored.
    seed : int
    workers : int
        Thread count; does not affect results.
    bridge : bool
        Also kill a path between steps with the probability that a
        Brownian bridge crosses some facet. Off by default (plain Euler).
    """

    paths: int = 100_000
    dt: float = 1e-4
    horizon: float = 1.0
    seed: int = 0
    workers: int = 1
    bridge: bool = False

    def __post_init__(self):
        if int(self.paths) < 1:
            raise ValueError("paths must be >= 1")
        if not 0 < self.dt < self.horizon:
            raise ValueError("need 0 < dt < horizon")
        if int(self.workers) < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    paths: int
    exited_fraction: float


@dataclass(frozen=True)
class Strip:
    """The interval ``(lo, hi)`` as a one-dimensional domain."""

    lo: float = 0.0
    hi: float = 1.0
    dim: int = 1

    def contains(self, X):
        X = np.asarray(X, dtype=float)
        return np.all((X > self.lo) & (X < self.hi), axis=-1)

    def facets(self):
        return np.array([[1.0], [-1.0]]), np.array([self.lo, -self.hi])


@dataclass(frozen=True)
class AlcoveDomain:
    datum: RootDatum

    @property
    def dim(self):
        return self.datum.ambient_dim

    def contains(self, X):
        return self.datum.alcove_contains(X)

    def facets(self):
        w = self.datum.walls
        return np.array([a.alpha for a in w]), np.array([float(a.level) for a in w])


@dataclass(frozen=True)
class ChamberDomain:
    datum: RootDatum

    @property
    def dim(self):
        return self.datum.ambient_dim

    def contains(self, X):
        return self.datum.chamber_contains(X)

    def facets(self):
        a = np.array(self.datum.simple_roots)
        return a, np.zeros(len(a))


@dataclass(frozen=True, eq=False)
class MovedDomain:
    """Image ``g(D)`` of a domain under an affine isometry ``g``."""

    domain: object
    g: object

    @property
    def dim(self):
        return self.domain.dim

    def contains(self, X):
        return self.domain.contains(self.g.inverse()(X))

    def facets(self):
        # <a, g^{-1} y> - n = <w a, y> - (<w a, s> + n)
        a, n = self.domain.facets()
        wa = a @ self.g.w.T
        return wa, n + wa @ self.g.shift


def _as_domain(domain, region):
    if isinstance(domain, RootDatum):
        return ChamberDomain(domain) if region == "chamber" else AlcoveDomain(domain)
    return domain


def block_rng(seed, block):
    """Counter-based generator for one block of paths."""
    key = np.array([int(seed) & _MASK64, int(block) & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _run_block(contains, x, n, dt, nsteps, rng, facets=None):
    """Exit step index per path (``nsteps + 1`` when alive at the end)."""
    d = len(x)
    pos = np.tile(x, (n, 1))
    alive = np.arange(n)
    exit_step = np.full(n, nsteps + 1, dtype=np.int64)
    sd = math.sqrt(dt)
    if facets is not None:
        fa, fn = facets
        fvar = np.sum(fa * fa, axis=1) * dt
    for step in range(1, nsteps + 1):
        if not len(alive):
            break
        if facets is not None:
            before = pos @ fa.T - fn
        pos += sd * rng.standard_normal((len(alive), d))
        inside = contains(pos)
        if facets is not None:
            after = pos @ fa.T - fn
            # bridge crossing probability exp(-2ab/var) per facet
            cross = np.exp(-2.0 * np.maximum(before, 0) * np.maximum(after, 0) / fvar)
            keep = np.prod(1.0 - cross, axis=1)
            inside &= rng.random(len(alive)) < keep
        if not np.all(inside):
            out = ~inside
            exit_step[alive[out]] = step
            alive = alive[inside]
            pos = pos[inside]
    return exit_step


def simulate_exit_steps(contains, x, cfg, nsteps, facets=None):
    """Exit step of every path, deterministic in ``(seed, paths, dt)``."""
    x = np.asarray(x, dtype=float)
    nblocks = -(-cfg.paths // BLOCK)
    sizes = [min(BLOCK, cfg.paths - b * BLOCK) for b in range(nblocks)]

    def job(b):
        return _run_block(contains, x, sizes[b], cfg.dt, nsteps, block_rng(cfg.seed, b),
                          facets if cfg.bridge else None)

    if cfg.workers == 1:
        parts = [job(b) for b in range(nblocks)]
    else:
        with ThreadPoolExecutor(max_workers=int(cfg.workers)) as pool:
            parts = list(pool.map(job, range(nblocks)))
    return np.concatenate(parts)


def _estimate(samples, exited):
    n = len(samples)
    mean = float(np.mean(samples))
    sd = float(np.std(samples, ddof=1)) if n > 1 else 0.0
    return MCEstimate(mean, sd / math.sqrt(n), n, float(exited))


def _steps(t, dt):
    return int(math.floor(t / dt + 1e-9))


def mc_survival(domain, x, t, cfg=None, region="alcove"):
    """Estimate ``P_x(T > t)`` with an Euler walk.

    Parameters
    ----------
    domain : RootDatum or domain object
        A root datum (alcove or chamber per ``region``) or any object with
        ``contains(X)`` and ``dim``.
    x : array_like
    t : float
        At most ``cfg.horizon``.
    cfg : SimConfig, optional
    region : {"alcove", "chamber"}

    Returns
    -------
    MCEstimate
        ``mean`` is the fraction of paths still inside after ``t``.
    """
    cfg = cfg or SimConfig()
    dom = _as_domain(domain, region)
    x = np.asarray(x, dtype=float)
    if isinstance(dom, (AlcoveDomain, ChamberDomain)):
        x = dom.datum.project(x)
    if not bool(dom.contains(x[None])[0]):
        raise DomainError("start point not in domain")
    if t > cfg.horizon:
        raise DomainError("t exceeds the simulation horizon")
    nsteps = _steps(t, cfg.dt)
    if nsteps == 0:
        return MCEstimate(1.0, 0.0, cfg.paths, 0.0)
    steps = simulate_exit_steps(dom.contains, x, cfg, nsteps, _facets(dom, cfg))
    alive = (steps > nsteps).astype(float)
    return _estimate(alive, 1.0 - alive.mean())


def _facets(dom, cfg):
    if not cfg.bridge:
        return None
    if not hasattr(dom, "facets"):
        raise ValueError("bridge correction needs a domain with planar facets")
    return dom.facets()


def mc_expected_exit(domain, x, cfg=None, region="alcove"):
    """Estimate the mean exit time; censored paths count at the horizon.

    ``exited_fraction`` reports the share of paths that exited before the
    horizon, so ``1 - exited_fraction`` is the censored share.
    """
    cfg = cfg or SimConfig()
    dom = _as_domain(domain, region)
    x = np.asarray(x, dtype=float)
    if isinstance(dom, (AlcoveDomain, ChamberDomain)):
        x = dom.datum.project(x)
    if not bool(dom.contains(x[None])[0]):
        raise DomainError("start point not in domain")
    nsteps = _steps(cfg.horizon, cfg.dt)
    steps = simulate_exit_steps(dom.contains, x, cfg, nsteps, _facets(dom, cfg))
    exited = steps <= nsteps
    times = np.where(exited, steps, nsteps) * cfg.dt
    return _estimate(times, exited.mean())


@dataclass(frozen=True)
class _CircleCollision:
    start_floor: np.ndarray
    iu: tuple
    dim: int

    def contains(self, X):
        diff = X[:, self.iu[0]] - X[:, self.iu[1]]
        return np.all(np.floor(diff) == self.start_floor, axis=-1)

    def facets(self):
        # each difference stays in [m, m + 1): walls at m and m + 1
        npair = len(self.start_floor)
        a = np.zeros((npair, self.dim))
        a[np.arange(npair), self.iu[0]] = 1.0
        a[np.arange(npair), self.iu[1]] = -1.0
        return np.concatenate([a, -a]), np.concatenate([self.start_floor,
                                                        -(self.start_floor + 1.0)])


def circle_representative(x):
    """Alcove point for particles at ``x`` on the circle ``R/Z``."""
    y = np.sort(np.mod(np.asarray(x, dtype=float), 1.0))[::-1]
    return y


def mc_circle_collision(k, x, t, cfg=None):
    """Estimate the probability that ``k`` walkers on the circle avoid collision.

    Independent standard Brownian motions start at ``x``; a collision of
    the projections onto ``R/Z`` is the first time some difference
    ``B_i - B_j`` crosses an integer. With ``cfg.bridge`` the crossing
    correction uses the two integer walls around each difference.
    """
    cfg = cfg or SimConfig()
    x = np.asarray(x, dtype=float)
    if len(x) != k:
        raise DomainError("x must have k coordinates")
    frac = np.mod(x, 1.0)
    if len(np.unique(frac)) < k:
        raise DomainError("coincident starting points on the circle")
    iu = np.triu_indices(k, 1)
    diff = x[iu[0]] - x[iu[1]]
    dom = _CircleCollision(np.floor(diff), iu, k)
    nsteps = _steps(t, cfg.dt)
    if nsteps == 0:
        return MCEstimate(1.0, 0.0, cfg.paths, 0.0)
    steps = simulate_exit_steps(dom.contains, x, cfg, nsteps, _facets(dom, cfg))
    alive = (steps > nsteps).astype(float)
    return _estimate(alive, 1.0 - alive.mean())


def with_workers(cfg, workers):
    return replace(cfg, workers=workers)
