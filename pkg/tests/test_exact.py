import math
from fractions import Fraction as F

import pytest

from dilatlab.exact import LOG2, LOG_INV_A, Exact, log2_interval


def test_log2_interval_encloses_and_tightens():
    lo, hi = log2_interval(10)
    assert lo < F(math.log(2)).limit_denominator(10**15) < hi
    assert float(lo) < math.log(2) < float(hi)
    lo2, hi2 = log2_interval(25)
    assert hi2 - lo2 < hi - lo
    assert hi2 - lo2 < F(1, 10**25)


def test_ring_arithmetic():
    x = Exact.rational(F(5)) - 12 * LOG2
    y = Exact.rational(F(-28)) + 48 * LOG2
    assert x + y == Exact.rational(-23) + 36 * LOG2
    assert x - x == Exact()
    assert (x * 0).is_zero
    z = x * y  # degree-2 term appears
    assert z.coeff(2, 0) == -12 * 48
    assert z.coeff(0, 0) == 5 * -28
    assert (x / 2).coeff(1, 0) == F(-6)
    with pytest.raises(TypeError):
        x / LOG2


def test_equality_against_rationals():
    assert Exact.rational(F(1, 2)) == F(1, 2)
    assert Exact.rational(3) == 3
    assert not (LOG2 == 1)


def test_sign_decisions():
    assert (Exact.rational(5) - 12 * LOG2).sign() == -1  # 5 - 8.317...
    assert (Exact.rational(-28) + 48 * LOG2).sign() == 1
    assert (Exact.rational(40) - 64 * LOG2).sign() == -1
    assert Exact().sign() == 0
    assert (LOG2 * LOG2 - Exact.rational(F(48, 100))).sign() == 1  # 0.4804... > 0.48
    with pytest.raises(ValueError):
        LOG_INV_A.sign()


def test_sign_near_zero_still_resolves():
    # log 2 agrees with 0.6931471805599453 to ~1e-17; the difference is tiny
    # but nonzero and the interval refinement must still decide it
    approx = F(6931471805599453, 10**16)
    val = LOG2 - Exact.rational(approx)
    assert val.sign() == 1  # log 2 = 0.69314718055994530941...


def test_evalf_and_linear_parts():
    c = LOG_INV_A + LOG2 + Exact.rational(F(1, 2))
    assert c.evalf(0.01) == pytest.approx(math.log(100) + math.log(2) + 0.5, abs=1e-15)
    q0, ql, qm = c.linear_parts()
    assert (q0, ql, qm) == (F(1, 2), F(1), F(1))
    with pytest.raises(ValueError):
        c.evalf()  # needs a
    with pytest.raises(ValueError):
        (LOG2 * LOG2).linear_parts()


def test_repr_is_readable():
    assert repr(Exact.rational(5) - 12 * LOG2) == "5 - 12*log2"
    assert "log(1/a)" in repr(LOG_INV_A)
