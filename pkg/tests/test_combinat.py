import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alcove.combinat import (PairPartition, crossing_number, enumerate_pair_partitions,
                             partition_sum, pfaffian, pfaffian_minor, sign_sum,
                             singlet_expansion)


def _skew(n, rng):
    a = rng.uniform(-1, 1, size=(n, n))
    return np.triu(a, 1) - np.triu(a, 1).T


def test_k4_partitions_and_signs():
    parts = {pi.pairs: pi.crossings for pi in enumerate_pair_partitions(4)}
    assert parts == {((1, 4), (2, 3)): 0, ((1, 3), (2, 4)): 1, ((1, 2), (3, 4)): 0}


def test_small_cases():
    p2 = enumerate_pair_partitions(2)
    assert len(p2) == 1 and p2[0].crossings == 0
    assert len(enumerate_pair_partitions(3)) == 3


def _brute_force(k):
    """All set partitions of {1..k} into blocks of size 2 (plus one singlet for odd k)."""
    out = set()
    for perm in itertools.permutations(range(1, k + 1)):
        pairs = tuple(sorted(tuple(sorted(perm[i:i + 2])) for i in range(0, k - k % 2, 2)))
        single = perm[-1] if k % 2 else None
        out.add((pairs, single))
    return out


@pytest.mark.parametrize("k,count", [(2, 1), (3, 3), (4, 3), (5, 15), (6, 15), (7, 105)])
def test_partition_counts(k, count):
    parts = enumerate_pair_partitions(k)
    assert len(parts) == count
    assert {(tuple(sorted(p.pairs)), p.singlet) for p in parts} == _brute_force(k)
    for p in parts:
        labels = sorted([i for pr in p.pairs for i in pr] + ([p.singlet] if p.singlet else []))
        assert labels == list(range(1, k + 1))


def test_crossing_examples():
    assert crossing_number(PairPartition(((1, 3), (2, 4)))) == 1
    assert crossing_number(PairPartition(((1, 2), (3, 4)))) == 0
    assert crossing_number(PairPartition(((2, 4), (3, 5)), singlet=1)) == 1
    # auxiliary {0, 3} crosses both pairs, which also cross each other
    assert crossing_number(PairPartition(((1, 4), (2, 5)), singlet=3)) == 3


@pytest.mark.parametrize("k", range(2, 11))
def test_sign_sum_is_one(k):
    assert sign_sum(k) == 1


def test_range_guard():
    with pytest.raises(ValueError):
        enumerate_pair_partitions(1)
    with pytest.raises(ValueError):
        enumerate_pair_partitions(13)


def test_pfaffian_examples():
    J = np.array([[0.0, 1.0], [-1.0, 0.0]])
    for m in range(1, 6):
        blk = np.kron(np.eye(m), J)
        assert pfaffian(blk) == 1.0
        assert pfaffian(blk, method="expansion") == 1.0
    assert pfaffian([[0, 2.5], [-2.5, 0]]) == 2.5
    a = _skew(4, np.random.default_rng(3))
    expect = a[0, 1] * a[2, 3] - a[0, 2] * a[1, 3] + a[0, 3] * a[1, 2]
    assert pfaffian(a) == pytest.approx(expect, abs=1e-15)
    assert pfaffian(_skew(5, np.random.default_rng(1))) == 0.0


def test_pfaffian_reads_upper_triangle_only():
    a = _skew(4, np.random.default_rng(4))
    b = a.copy()
    b[np.tril_indices(4, -1)] = 99.0
    assert pfaffian(b) == pfaffian(a)


def test_pfaffian_rejects_nonfinite():
    a = _skew(4, np.random.default_rng(5))
    a[0, 1] = np.nan
    with pytest.raises(ValueError):
        pfaffian(a)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_pf_squared_is_det(n):
    rng = np.random.default_rng(n)
    for _ in range(50):
        a = _skew(n, rng)
        d = np.linalg.det(a)
        assert pfaffian(a) ** 2 == pytest.approx(d, rel=1e-9, abs=1e-14)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_methods_agree(n):
    rng = np.random.default_rng(10 + n)
    for _ in range(10):
        a = _skew(n, rng)
        assert abs(pfaffian(a, "partitions") - pfaffian(a, "expansion")) < 1e-12


def test_large_uses_expansion():
    a = _skew(14, np.random.default_rng(0))
    assert pfaffian(a) ** 2 == pytest.approx(np.linalg.det(a), rel=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2 ** 31))
def test_pfaffian_transform_rule(half, seed):
    # Pf(B A B^T) = det(B) Pf(A)
    n = 2 * half
    rng = np.random.default_rng(seed)
    a = _skew(n, rng)
    b = rng.uniform(-1, 1, size=(n, n))
    lhs = pfaffian(b @ a @ b.T)
    rhs = np.linalg.det(b) * pfaffian(a)
    assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-12)


def test_partition_sum_matches_pfaffian():
    rng = np.random.default_rng(7)
    for n in (2, 4, 6):
        a = _skew(n, rng)
        assert partition_sum(n, lambda i, j: a[i - 1, j - 1]) == pytest.approx(pfaffian(a),
                                                                               abs=1e-14)


@pytest.mark.parametrize("n", [3, 5, 7])
def test_singlet_expansion_matches_partition_sum(n):
    rng = np.random.default_rng(n)
    a = _skew(n, rng)
    s = rng.uniform(-1, 1, n)
    direct = partition_sum(n, lambda i, j: a[i - 1, j - 1], lambda l: s[l - 1])
    assert singlet_expansion(a, s) == pytest.approx(direct, abs=1e-13)
    # bordering by the singlet row gives the same number
    big = np.zeros((n + 1, n + 1))
    big[0, 1:] = s
    big[1:, 1:] = a
    big = big - np.tril(big)
    assert pfaffian(big - big.T) == pytest.approx(direct, abs=1e-13)


def test_minor():
    a = _skew(5, np.random.default_rng(2))
    keep = [0, 1, 3, 4]
    assert pfaffian_minor(a, 2) == pfaffian(a[np.ix_(keep, keep)])
