"""Pair partitions with crossing numbers, and Pfaffians."""
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

K_MAX = 12
PARTITION_SUM_MAX_N = 10


@dataclass(frozen=True)
class PairPartition:
    """A partition of ``{1..k}`` into pairs plus an optional singlet.

    Indices are 1-based. For odd ``k`` the crossing number counts the
    auxiliary pair ``{0, singlet}`` with label 0 placed left of label 1.
    """

    pairs: tuple
    singlet: int = None

    @property
    def k(self):
        return 2 * len(self.pairs) + (self.singlet is not None)

    @property
    def crossings(self):
        return crossing_number(self)

    @property
    def sign(self):
        return -1 if self.crossings % 2 else 1


def crossing_number(pi):
    """Number of interleaved pairs ``a < c < b < d``."""
    pairs = list(pi.pairs)
    if pi.singlet is not None:
        pairs.append((0, pi.singlet))
    c = 0
    for i, (a, b) in enumerate(pairs):
        for cc, d in pairs[i + 1:]:
            if a < cc < b < d or cc < a < d < b:
                c += 1
    return c


def _matchings(items):
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for i, other in enumerate(rest):
        for m in _matchings(rest[:i] + rest[i + 1:]):
            yield ((first, other),) + m


@lru_cache(maxsize=None)
def enumerate_pair_partitions(k):
    """All pair partitions of ``{1..k}`` in a deterministic order.

    Parameters
    ----------
    k : int
        Between 2 and 12.

    Returns
    -------
    tuple of PairPartition
        ``(k-1)!!`` partitions for even ``k``; ``k!!`` for odd ``k``, the
        singlet running over ``1..k``.
    """
    k = int(k)
    if not 2 <= k <= K_MAX:
        raise ValueError(f"k must lie in [2, {K_MAX}], got {k}")
    labels = tuple(range(1, k + 1))
    if k % 2 == 0:
        return tuple(PairPartition(m) for m in _matchings(labels))
    out = []
    for s in labels:
        rest = tuple(i for i in labels if i != s)
        out.extend(PairPartition(m, s) for m in _matchings(rest))
    return tuple(out)


def sign_sum(k):
    """Sum of ``(-1)^c(pi)`` over all pair partitions of ``{1..k}``."""
    return sum(pi.sign for pi in enumerate_pair_partitions(k))


def partition_sum(k, pair_value, singlet_value=None):
    """Signed sum over pair partitions of products of pair factors.

    Computes ``sum_pi (-1)^c(pi) * s(singlet) * prod_{(i, j) in pi} a(i, j)``
    with 1-based labels. Summation is compensated (``math.fsum``).

    Parameters
    ----------
    k : int
    pair_value : callable
        ``pair_value(i, j)`` for ``i < j``.
    singlet_value : callable, optional
        Factor for the singlet (odd ``k``); omitted means 1.
    """
    cache = {}

    def a(i, j):
        if (i, j) not in cache:
            cache[(i, j)] = pair_value(i, j)
        return cache[(i, j)]

    terms = []
    for pi in enumerate_pair_partitions(k):
        prod = float(pi.sign)
        for i, j in pi.pairs:
            prod *= a(i, j)
        if pi.singlet is not None and singlet_value is not None:
            prod *= singlet_value(pi.singlet)
        terms.append(prod)
    return math.fsum(terms)


def _as_skew(m):
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("Pfaffian needs a square matrix")
    if not np.all(np.isfinite(m)):
        raise ValueError("non-finite matrix entries")
    # only the upper triangle is read
    return np.triu(m, 1) - np.triu(m, 1).T


def pfaffian(m, method="auto"):
    """Pfaffian of a skew-symmetric matrix.

    Parameters
    ----------
    m : array_like, shape (n, n)
        Only the strict upper triangle is used.
    method : {"auto", "partitions", "expansion"}
        ``partitions`` sums over pair partitions; ``expansion`` recurses
        along the first row with memoisation over index subsets. ``auto``
        uses partitions for ``n <= 10``.

    Returns
    -------
    float
        Zero for odd ``n``; one for ``n = 0``.
    """
    a = _as_skew(m)
    n = a.shape[0]
    if n % 2:
        return 0.0
    if n == 0:
        return 1.0
    if method == "auto":
        method = "partitions" if n <= PARTITION_SUM_MAX_N else "expansion"
    if method == "partitions":
        if n > K_MAX:
            raise ValueError(f"partition sum limited to n <= {K_MAX}")
        return partition_sum(n, lambda i, j: a[i - 1, j - 1])
    if method == "expansion":
        return _pf_expand(a)
    raise ValueError(f"unknown method {method!r}")


def _pf_expand(a):
    n = a.shape[0]

    @lru_cache(maxsize=None)
    def pf(mask):
        if mask == 0:
            return 1.0
        idx = [i for i in range(n) if mask >> i & 1]
        i = idx[0]
        total = []
        for pos, j in enumerate(idx[1:]):
            sub = mask & ~(1 << i) & ~(1 << j)
            term = a[i, j] * pf(sub)
            total.append(term if pos % 2 == 0 else -term)
        return math.fsum(total)

    return pf((1 << n) - 1)


def pfaffian_minor(m, drop, method="auto"):
    """Pfaffian of ``m`` with 0-based row/column ``drop`` removed."""
    a = np.asarray(m, dtype=float)
    keep = [i for i in range(a.shape[0]) if i != drop]
    return pfaffian(a[np.ix_(keep, keep)], method=method)


def singlet_expansion(m, singlet=None, method="auto"):
    """Odd-size expansion ``sum_l (-1)^(l+1) s_l Pf(m without l)``.

    Labels ``l`` run from 1; ``singlet`` holds the factors ``s_l`` (all
    ones when omitted).
    """
    a = np.asarray(m, dtype=float)
    n = a.shape[0]
    if n % 2 == 0:
        raise ValueError("singlet expansion needs odd size")
    s = np.ones(n) if singlet is None else np.asarray(singlet, dtype=float)
    terms = [(-1) ** l * s[l] * pfaffian_minor(a, l, method) for l in range(n)]
    return math.fsum(terms)
