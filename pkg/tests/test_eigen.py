import math

import numpy as np
import pytest

from alcove.eigen import (H, Weight, eigenvalue, f_p, fundamental_weights, g_p, hot_spots_check,
                          is_real, laplacian_fd, product_eigenvalue_A, real_form)
from alcove.errors import DomainError
from alcove.rootsys import RootDatum

FAMILIES = [("A", 3), ("A", 4), ("B", 2), ("B", 3), ("C", 2), ("C", 3), ("D", 4), ("D", 5),
            ("G2", 2)]


def _rho(d):
    return Weight(d, d.rho)


def _part(v):
    # the nonzero component when the value has a fixed phase, else the real part
    re, im = np.asarray(v.re), np.asarray(v.im)
    return im if np.max(np.abs(re)) < 1e-9 else re


def test_fundamental_weights_dual_to_coroots():
    for fam, k in FAMILIES:
        d = RootDatum(fam, k)
        om = fundamental_weights(d)
        cor = np.array([2 * a / (a @ a) for a in d.simple_roots])
        assert np.allclose(cor @ om.T, np.eye(len(cor)), atol=1e-12)


@pytest.mark.parametrize("fam,k", FAMILIES)
def test_dirichlet_vanishes_on_walls(fam, k):
    d = RootDatum(fam, k)
    w = _rho(d)
    pts = d.sample_facets(20, np.random.default_rng(0))
    v = f_p(w, pts)
    assert np.max(np.abs(v.complex)) < 1e-9


@pytest.mark.parametrize("fam,k", FAMILIES)
def test_antisymmetry_under_wall_reflections(fam, k):
    d = RootDatum(fam, k)
    w = Weight(d, 2 * d.rho)
    x = d.sample_alcove(10, np.random.default_rng(1))
    fx = f_p(w, x).complex
    for wall in d.walls:
        y = np.array([wall.reflection()(p) for p in x])
        assert np.allclose(f_p(w, y).complex, -fx, atol=1e-9)


@pytest.mark.parametrize("fam,k", FAMILIES)
def test_neumann_at_origin_is_group_order(fam, k):
    d = RootDatum(fam, k)
    w = Weight(d, d.rho)
    v = g_p(w, np.zeros(d.ambient_dim))
    assert v.re == pytest.approx(len(d.weyl_group()[0]))
    assert abs(v.im) < 1e-12


@pytest.mark.parametrize("fam,k", FAMILIES)
def test_product_is_lowest_dirichlet_mode(fam, k):
    d = RootDatum(fam, k)
    x = d.sample_alcove(50, np.random.default_rng(2))
    f, h = _part(f_p(_rho(d), x)), H(x, d)
    c = (f @ h) / (h @ h)
    # pointwise ratio is ill-conditioned near walls, so compare on the function scale
    assert np.max(np.abs(f - c * h)) < 1e-9 * np.max(np.abs(f))


@pytest.mark.parametrize("fam,k", FAMILIES)
def test_eigenvalue_by_finite_differences(fam, k):
    d = RootDatum(fam, k)
    w = Weight(d, d.rho + fundamental_weights(d)[0])
    x = d.sample_alcove(3, np.random.default_rng(3))
    lam = eigenvalue(w)
    for fn in (f_p, g_p):
        val = _part(fn(w, x))
        lap = _part_of(fn, w, x, val)
        ok = np.abs(val) > 1e-2 * np.max(np.abs(val))
        assert np.all(np.abs(lap[ok] / val[ok] - lam) < 1e-4 * abs(lam))


def _part_of(fn, w, x, val):
    re = np.max(np.abs(fn(w, x).re)) >= 1e-9
    pick = (lambda v: v.re) if re else (lambda v: v.im)
    return laplacian_fd(lambda y: pick(fn(w, y)), x, h=1e-3)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_product_eigenvalue_type_A(k):
    d = RootDatum("A", k)
    x = d.sample_alcove(5, np.random.default_rng(k))
    lap = laplacian_fd(lambda y: H(y, d), x, h=1e-4)
    assert np.all(np.abs(lap / H(x, d) - product_eigenvalue_A(k)) < 1e-5 * abs(product_eigenvalue_A(k)))
    assert eigenvalue(_rho(d)) == pytest.approx(product_eigenvalue_A(k), rel=1e-12)


def test_eigenvalue_examples():
    d = RootDatum("A", 3)
    assert eigenvalue(Weight(d, np.zeros(3))) == 0.0
    assert eigenvalue(_rho(d)) == pytest.approx(-8 * math.pi ** 2)


def _random_coeffs(rng, r):
    return rng.integers(0, 4, size=r)


@pytest.mark.parametrize("fam,k", FAMILIES)
def test_realness_rule(fam, k):
    d = RootDatum(fam, k)
    rng = np.random.default_rng(4)
    for _ in range(20):
        c = _random_coeffs(rng, len(d.simple_roots))
        w = Weight.from_coefficients(d, c)
        got = bool(is_real(w))
        if fam == "A":
            assert got == bool(np.array_equal(c, c[::-1]))
        elif fam == "D" and k % 2:
            assert got == bool(c[-1] == c[-2])
        else:
            assert got


@pytest.mark.parametrize("fam,k", FAMILIES)
def test_realness_means_fixed_phase(fam, k):
    d = RootDatum(fam, k)
    rng = np.random.default_rng(5)
    x = d.sample_alcove(30, rng)
    for _ in range(10):
        c = 1 + _random_coeffs(rng, len(d.simple_roots))
        w = Weight.from_coefficients(d, c)
        v = f_p(w, x)
        wit = is_real(w)
        if wit:
            off = v.im if wit.sign > 0 else v.re
            assert np.max(np.abs(off)) < 1e-10
            assert np.allclose(real_form(w, x), v.re if wit.sign > 0 else v.im, atol=1e-10)
            assert np.allclose(real_form(w, x, "g"), g_p(w, x).re, atol=1e-10)
            assert np.max(np.abs(g_p(w, x).im)) < 1e-10
        else:
            assert np.max(np.abs(v.im)) > 1e-6 and np.max(np.abs(v.re)) > 1e-6


def test_witness_sign_examples():
    # A in R^3 with rho: the witness is an odd permutation, so f is a pure sine sum
    assert is_real(_rho(RootDatum("A", 3))).sign == -1
    assert is_real(_rho(RootDatum("A", 4))).sign == 1
    assert not is_real(Weight.from_coefficients(RootDatum("A", 3), [1, 0]))


def test_weight_validation():
    d = RootDatum("A", 3)
    with pytest.raises(DomainError):
        Weight(d, [0.25, 0.0, -0.25])
    w = Weight.from_coefficients(d, [1, 0])
    assert w.dominant and not w.strictly_dominant
    with pytest.raises(DomainError):
        f_p(w, [0.6, 0.3, 0.1])
    with pytest.raises(DomainError):
        g_p(Weight.from_coefficients(d, [-1, 2]), [0.6, 0.3, 0.1])
    with pytest.raises(ValueError):
        w.p[0] = 1.0


@pytest.mark.parametrize("fam,k,coeffs", [
    ("C", 2, [1, 0]), ("C", 2, [0, 1]), ("C", 2, [1, 1]), ("C", 2, [2, 1]),
    ("B", 2, [1, 0]), ("B", 2, [0, 1]), ("B", 2, [1, 1]),
    ("G2", 2, [1, 0]), ("G2", 2, [0, 1]), ("G2", 2, [1, 1]),
    ("A", 3, [1, 1]), ("A", 3, [2, 2]), ("A", 3, [3, 3]),
])
def test_hot_spots(fam, k, coeffs):
    w = Weight.from_coefficients(RootDatum(fam, k), coeffs)
    rep = hot_spots_check(w, samples=10_000, seed=0)
    assert rep.passed and rep.margin > 0
    assert rep.interior_max < rep.boundary_sup


def test_hot_spots_rejections():
    d = RootDatum("A", 3)
    with pytest.raises(DomainError):
        hot_spots_check(Weight(d, np.zeros(3)))
    with pytest.raises(DomainError):
        hot_spots_check(Weight.from_coefficients(d, [1, 0]))
    with pytest.raises(DomainError):
        hot_spots_check(Weight.from_coefficients(d, [-1, 1]))
