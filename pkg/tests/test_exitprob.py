import math

import numpy as np
import pytest

from alcove.errors import DomainError, UnsupportedFormulaError
from alcove.exitprob import (SurvivalQuery, chamber_survival_A, survival, survival_A,
                             survival_A_lattice, survival_B, survival_C, survival_D,
                             survival_F4, survival_G2, survival_images)
from alcove.imagesum import block_survival_B2, block_survival_C2
from alcove.kernels1d import SeriesControl, phi
from alcove.rootsys import RootDatum

# arbitrary-precision evaluations of the pair-partition forms
A3_T01 = 0.023366332491206329
A4_T005 = 0.010862671152022897

POINTS = {
    ("A", 3): [0.6, 0.3, 0.1],
    ("A", 4): [0.7, 0.5, 0.3, 0.1],
    ("A", 5): [0.8, 0.6, 0.45, 0.3, 0.1],
    ("B", 2): [0.6, 0.3],
    ("B", 3): [0.6, 0.3, 0.1],
    ("C", 2): [0.4, 0.1],
    ("C", 3): [0.4, 0.25, 0.1],
    ("D", 3): [0.6, 0.3, 0.1],
    ("D", 4): [0.55, 0.35, 0.2, 0.05],
}


def _run(fam, k, x, t):
    return survival(SurvivalQuery(RootDatum(fam, k), tuple(x), t))


def test_k2_is_single_strip():
    for d in (0.2, 0.5, 0.9):
        for t in (0.01, 0.1, 1.0):
            assert survival_A([d, 0.0], t).value == pytest.approx(phi(d, 2 * t).value,
                                                                  abs=1e-15)


def test_reference_values():
    r3 = survival_A([0.6, 0.3, 0.1], 0.1)
    assert r3.method == "partition-sum"
    assert r3.value == pytest.approx(A3_T01, abs=1e-13)
    assert survival_A([0.7, 0.5, 0.3, 0.1], 0.05).value == pytest.approx(A4_T005, abs=1e-13)


def test_projection_invariance():
    a = survival_A([0.6, 0.3, 0.1], 0.07).value
    b = survival_A([1.6, 1.3, 1.1], 0.07).value
    assert a == pytest.approx(b, abs=1e-15)


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6, 7, 8])
def test_pfaffian_and_partition_paths_agree(k):
    rng = np.random.default_rng(k)
    d = RootDatum("A", k)
    x = d.sample_alcove(1, rng)[0]
    for t in (0.005, 0.05, 0.3):
        a = survival_A(x, t, method="pfaffian").value
        b = survival_A(x, t, method="partition-sum").value
        assert abs(a - b) <= 1e-12


@pytest.mark.parametrize("k", [3, 5])
def test_odd_lattice_form(k):
    x = RootDatum("A", k).barycenter
    for t in (0.02, 0.1):
        assert survival_A_lattice(x, t) == pytest.approx(survival_A(x, t).value, abs=1e-12)


def test_chamber_formula():
    x = [0.9, 0.2]
    assert chamber_survival_A(x, 0.3).value == pytest.approx(math.erf(0.7 / (2 * math.sqrt(0.3))))
    assert chamber_survival_A([3.0, 2.0, 1.0], 0.0).value == 1.0
    with pytest.raises(DomainError):
        chamber_survival_A([0.1, 0.5], 0.1)


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_alcove_below_chamber(k):
    rng = np.random.default_rng(k)
    d = RootDatum("A", k)
    for x in d.sample_alcove(5, rng):
        for t in (0.01, 0.1, 0.5):
            xs = np.sort(x)[::-1]
            assert survival_A(xs, t).value <= chamber_survival_A(xs, t).value + 1e-12


@pytest.mark.parametrize("key", sorted(POINTS))
def test_monotone_limits_and_range(key):
    fam, k = key
    x = POINTS[key]
    ts = [1e-4, 0.001, 0.01, 0.05, 0.2, 1.0, 5.0]
    vals = [_run(fam, k, x, t) for t in ts]
    for r in vals:
        assert -r.tail_bound <= r.value <= 1 + r.tail_bound
    v = [r.value for r in vals]
    assert all(b <= a + 1e-8 for a, b in zip(v, v[1:]))
    assert v[0] > 0.99
    assert v[-1] < 1e-6
    assert _run(fam, k, x, 0.0).value == 1.0


def test_c2_is_block():
    assert survival_C([0.4, 0.1], 0.03).value == pytest.approx(
        block_survival_C2(0.4, 0.1, 0.03), abs=1e-15)


def test_b3_singlet_expansion():
    # k = 3: sum over the singlet l of (-1)^(l+1) phi(x_l, t) times the remaining pair block
    x, t = [0.5, 0.3, 0.1], 0.02
    p = lambda i, j: block_survival_B2(x[i], x[j], t)
    s = [phi(v, t).value for v in x]
    expect = s[0] * p(1, 2) - s[1] * p(0, 2) + s[2] * p(0, 1)
    assert survival_B(x, t).value == pytest.approx(expect, abs=1e-14)
    assert s[0] == phi(0.5, t).value


def test_d_entry_vanishes_at_wall():
    near = survival_D([0.5, 0.49999999, 0.1], 0.01).value
    assert near < 1e-5


def test_g2_values():
    d = RootDatum("G2")
    x = d.barycenter
    assert survival_G2(x, 0.0).value == 1.0
    r = survival_G2(x, 0.05)
    assert r.value == pytest.approx(survival_images(d, x, 0.05).value, abs=1e-6)
    # close to a wall the survival collapses
    wall = d.alcove_vertices[[0, 1]].mean(axis=0)
    inner = 0.999 * wall + 0.001 * x
    assert survival_G2(inner, 0.01).value < 0.01


def test_errors():
    with pytest.raises(DomainError, match="not in alcove"):
        survival_A([0.0, 0.3, 0.6], 0.1)
    with pytest.raises(DomainError):
        survival_A([0.6, 0.3, 0.1], -1.0)
    with pytest.raises(UnsupportedFormulaError):
        survival_F4([0.1] * 4, 0.1)
    with pytest.raises(DomainError, match="not in alcove"):
        survival_C([0.6, 0.1], 0.1)


def test_tighter_tolerance_respected():
    ctl = SeriesControl(tol=1e-14)
    r = survival_A([0.7, 0.5, 0.3, 0.1], 0.05, ctl)
    assert r.tail_bound < 1e-12
