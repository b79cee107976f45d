import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from alcove.errors import DomainError
from alcove.kernels1d import (SeriesControl, first_hit_one_survival, hit_survival, phi, psi,
                              late_upper_exit)

XS = [0.1 * i for i in range(1, 10)]
TS = [0.05, 0.1, 0.25, 0.5, 1.0, 2.0]

# 40-digit evaluations of the theta series (independent arbitrary-precision run)
PHI_HALF_HALF = 0.10797704444410901
PSI_03_02 = 0.61168314030588551
LATE_EXIT_05_01 = 0.23724373018987452


def test_phi_boundary_and_start():
    for t in (0.01, 1.0):
        assert phi(0.0, t).value == 0.0
        assert phi(1.0, t).value == 0.0
    assert phi(0.3, 0.0).value == 1.0


def test_phi_reference_value():
    v = phi(0.5, 0.5)
    assert v.value == pytest.approx(PHI_HALF_HALF, abs=1e-13)
    # three-decimal agreement with the leading-term estimate 0.10794
    assert round(v.value, 3) == round(0.10794, 3)
    assert v.tail_bound <= 1e-12


def test_psi_limits():
    assert psi(0.3, 0.0).value == 1.0
    for x in (0.2, 0.7):
        assert psi(x, 50.0).value == pytest.approx(2 * x, abs=1e-14)
    assert psi(0.3, 0.2).value == pytest.approx(PSI_03_02, abs=1e-13)


@pytest.mark.parametrize("fn", [phi, psi])
def test_dual_representations(fn):
    worst = 0.0
    for x in XS:
        for t in TS:
            a = fn(x, t, method="theta")
            b = fn(x, t, method="image")
            worst = max(worst, abs(a.value - b.value))
    assert worst <= 1e-10


def test_psi_decomposition_identity():
    # psi = strip survival + 2 P(hit 1 first, by time t)
    for x in XS:
        for t in TS:
            lhs = psi(x, t, method="theta").value
            rhs = phi(x, t).value + 2.0 * first_hit_one_survival(x, t).value
            assert abs(lhs - rhs) <= 1e-10


def test_psi_reference_via_identity():
    x, t = 0.3, 0.2
    via = phi(x, t).value + 2.0 * (x - late_upper_exit(x, t / 2).value)
    assert via == pytest.approx(PSI_03_02, abs=1e-12)


def test_late_upper_exit_values():
    assert late_upper_exit(0.5, 0.1).value == pytest.approx(LATE_EXIT_05_01, abs=1e-13)
    assert late_upper_exit(1e-9, 0.1).value == pytest.approx(0.0, abs=1e-8)
    for x in (0.2, 0.6):
        for t in (0.01, 0.05, 0.3):
            a = late_upper_exit(x, t, method="theta").value
            b = late_upper_exit(x, t, method="image").value
            assert abs(a - b) < 1e-11


@pytest.mark.parametrize("x", [0.2, 0.5, 0.8])
def test_late_upper_exit_time_integral(x):
    val, err = quad(lambda t: late_upper_exit(x, t).value, 0.0, 40.0, limit=200,
                    points=[0.01, 0.1, 1.0])
    assert abs(val - x * (1 - x * x) / 6) < 1e-8


def test_hit_survival():
    assert hit_survival(0.3, 0.3, 0.1) == 0.0
    assert hit_survival(0.3, 0.0, 0.0) == 1.0
    assert hit_survival(0.5, 0.0, 0.125) == pytest.approx(math.erf(1.0), abs=1e-15)
    assert hit_survival(0.5, 0.0, 0.125) == pytest.approx(0.8427007929497149, abs=1e-15)


def test_domain_errors():
    with pytest.raises(DomainError):
        phi(1.2, 0.1)
    with pytest.raises(DomainError):
        psi(0.5, -1.0)
    with pytest.raises(DomainError):
        late_upper_exit(0.0, 0.1)
    with pytest.raises(ValueError):
        SeriesControl(tol=0)


def test_tail_bound_within_tol():
    ctl = SeriesControl(tol=1e-10)
    for t in (0.01, 0.3, 3.0):
        v = phi(0.4, t, ctl)
        assert v.tail_bound <= ctl.tol


@settings(max_examples=60, deadline=None)
@given(st.floats(0.001, 0.999), st.floats(1e-4, 5.0), st.floats(1e-4, 5.0))
def test_phi_monotone_and_bounded(x, t1, t2):
    lo, hi = sorted((t1, t2))
    a, b = phi(x, lo).value, phi(x, hi).value
    assert -1e-12 <= b <= a + 1e-12 <= 1 + 2e-12
    p = psi(x, hi).value
    assert -1e-12 <= p <= max(1.0, 2 * x) + 1e-12


def test_no_jump_at_representation_switch():
    x = 0.37
    below = phi(x, 0.25 - 1e-12).value
    above = phi(x, 0.25).value
    assert abs(below - above) < 1e-11
    assert np.isfinite([phi(x, t).value for t in np.geomspace(1e-6, 100, 50)]).all()
