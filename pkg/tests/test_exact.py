from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from carletlab.exact import (
    DyadicInterval, Ordering, cmp_pow_13_3, decimal_render, escalate, floor_root, iroot,
    ln_bounds, pow_13_3_bounds, rational, render_pow_13_3, root_bounds,
)

mpmath.mp.prec = 2048

pos_fracs = st.fractions(min_value=Fraction(1, 10 ** 6), max_value=10 ** 6)


def test_rational_parsing():
    assert rational("199/100") == Fraction(199, 100)
    assert rational("1.99") == Fraction(199, 100)
    assert rational(" 2.043 ") == Fraction(2043, 1000)
    assert rational(7) == 7
    with pytest.raises((TypeError, ValueError)):
        rational(1.99)
    with pytest.raises(ValueError):
        rational("abc")


@given(st.integers(min_value=0, max_value=10 ** 60), st.integers(min_value=1, max_value=7))
def test_iroot_is_floor(n, k):
    r = iroot(n, k)
    assert r ** k <= n < (r + 1) ** k


@given(pos_fracs, st.integers(min_value=2, max_value=5))
def test_root_bounds_enclose(x, k):
    lo, hi = root_bounds(x, k, 96)
    assert lo ** k <= x <= hi ** k
    assert hi - lo <= Fraction(1, 2 ** 80) * max(1, hi)


def test_root_bounds_exact_on_perfect_powers():
    assert root_bounds(Fraction(27, 8), 3) == (Fraction(3, 2), Fraction(3, 2))


@given(st.integers(min_value=1, max_value=10 ** 5))
def test_floor_root_matches_cbrt(d):
    r = floor_root(Fraction(2 * d, 3), 3)
    assert r ** 3 * 3 <= 2 * d < (r + 1) ** 3 * 3


@given(st.integers(min_value=2, max_value=3000))
def test_pow_13_3_enclosure_vs_mpmath(d):
    lo, hi = pow_13_3_bounds(d, 128)
    assert lo ** 3 <= d ** 13 <= hi ** 3
    ref = mpmath.mpf(d) ** (mpmath.mpf(13) / 3)
    slack = mpmath.mpf(2) ** -1500 * ref
    assert mpmath.mpf(lo.numerator) / lo.denominator <= ref + slack
    assert ref - slack <= mpmath.mpf(hi.numerator) / hi.denominator


@given(st.fractions(min_value=0, max_value=10 ** 9), st.integers(min_value=2, max_value=200))
def test_cmp_pow_13_3_consistent_with_bounds(x, d):
    c = Fraction(199, 100)
    lo, hi = pow_13_3_bounds(d, 160)
    o = cmp_pow_13_3(x, c, d)
    if x < c * lo:
        assert o == Ordering.LESS
    elif x > c * hi:
        assert o == Ordering.GREATER


def test_cmp_pow_13_3_equality():
    # 8^(13/3) = 2^13
    assert cmp_pow_13_3(Fraction(2 ** 13), 1, 8) == Ordering.EQUAL


def test_decimal_render_modes():
    x = Fraction(-7, 3)
    assert decimal_render(Fraction(22, 7), 3) == "3.142"
    assert decimal_render(Fraction(22, 7), 3, "ceil") == "3.143"
    assert decimal_render(Fraction(1, 8), 2, "round") in ("0.12", "0.13")
    assert decimal_render(x, 2, "ceil") == "-2.33"
    assert decimal_render(x, 2) == "-2.33"
    assert decimal_render(x, 2, "floor") == "-2.34"
    assert decimal_render(Fraction(22, 7), 3, "floor") == "3.142"
    assert decimal_render(Fraction(-1, 1000), 2, "ceil") == "0.00"


def test_render_threshold_examples():
    assert render_pow_13_3(Fraction(199, 100), 8) == "16302.080"
    assert render_pow_13_3(Fraction(199, 100), 37) == "12427789.273"


@given(pos_fracs)
@settings(max_examples=60)
def test_ln_bounds(x):
    lo, hi = ln_bounds(x, 128)
    ref = mpmath.log(mpmath.mpf(x.numerator) / x.denominator)
    assert mpmath.mpf(lo.numerator) / lo.denominator <= ref <= mpmath.mpf(hi.numerator) / hi.denominator
    assert hi - lo < Fraction(1, 2 ** 100)


@given(pos_fracs, pos_fracs)
@settings(max_examples=60)
def test_interval_arithmetic_contains_exact(a, b):
    A = DyadicInterval.exact(a, 64)
    B = DyadicInterval.exact(b, 64)
    assert (A + B).contains(a + b)
    assert (A - B).contains(a - b)
    assert (A * B).contains(a * b)
    assert (A / B).contains(a / b)
    assert (A ** 3).contains(a ** 3)
    assert (-A).contains(-a)


@given(pos_fracs)
@settings(max_examples=40)
def test_interval_roots_and_logs_vs_mpmath(a):
    A = DyadicInterval.exact(a, 128)
    ref = mpmath.mpf(a.numerator) / a.denominator
    for iv, val in ((A.cbrt(), mpmath.cbrt(ref)), (A.sqrt(), mpmath.sqrt(ref)),
                    (A.log(), mpmath.log(ref)), (A.log2(), mpmath.log(ref, 2))):
        assert mpmath.mpf(iv.lo.numerator) / iv.lo.denominator <= val
        assert val <= mpmath.mpf(iv.hi.numerator) / iv.hi.denominator


def test_interval_rejects_inverted_and_zero_division():
    with pytest.raises(ValueError):
        DyadicInterval.from_bounds(2, 1)
    with pytest.raises(ZeroDivisionError):
        DyadicInterval.exact(1) / DyadicInterval.from_bounds(-1, 1)


def test_escalate_doubles_until_decided():
    seen = []

    def fn(prec):
        seen.append(prec)
        return "ok" if prec >= 512 else None

    assert escalate(fn, 128, 1024) == "ok"
    assert seen == [128, 256, 512]
