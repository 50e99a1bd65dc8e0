from fractions import Fraction

import mpmath
import pytest

from carletlab import asymptotic as asy
from carletlab import planes

mpmath.mp.prec = 2048


def _f(x: Fraction) -> mpmath.mpf:
    return mpmath.mpf(x.numerator) / x.denominator


def test_lambda_encloses_cbrt_two_thirds():
    lam = asy.lambda_optimum()
    ref = mpmath.cbrt(mpmath.mpf(2) / 3)
    assert _f(lam.lo) <= ref <= _f(lam.hi)
    assert lam.width < Fraction(1, 10 ** 6)


def test_leading_and_limit_coefficients():
    lead = asy.leading_coefficient(asy.TAIL_START)
    assert abs(lead.mid - Fraction(198855, 100000)) <= Fraction(1, 10 ** 4)
    limit = asy.limit_coefficient()
    assert abs(limit.mid - Fraction(196555, 100000)) <= Fraction(5, 10 ** 5)
    # at lam^3 = 2/3, 1/(2 lam^2) = 3 lam / 4, so the minimum is 9 lam / 4
    ref = mpmath.mpf(9) / 4 * mpmath.cbrt(mpmath.mpf(2) / 3)
    assert _f(limit.lo) <= ref <= _f(limit.hi)


def test_beta_gamma_ranges():
    p = asy.AsymptoticParams.at(asy.TAIL_START)
    assert p.beta.hi < 1 + Fraction(4, 10 ** 6)
    assert p.gamma.hi < Fraction(102, 100)


def test_projected_constant():
    assert Fraction(asy.projected_constant(4 * 10 ** 7)) < Fraction(197, 100)
    with pytest.raises(ValueError):
        asy.projected_constant(1000)


def test_tail_certified():
    rep = asy.verify_tail("199/100", asy.TAIL_START)
    assert rep.verdict == "Certified"
    assert rep.margin is not None and rep.margin > 0
    assert '"verdict": "Certified"' in rep.dumps()


def test_tail_not_certified_below_limit():
    # 1.96 is below the limit coefficient, so no finite start can certify it
    rep = asy.verify_tail("196/100", asy.TAIL_START, steps=8)
    assert rep.verdict in ("Failed", "Inconclusive")


def test_gold_rhs_domain():
    with pytest.raises(ValueError):
        asy.gold_rhs(1000)


@pytest.mark.parametrize("delta", [300_000, 450_001, 10 ** 6])
def test_gold_rhs_dominates_exact_f(delta):
    # the closed form must upper-bound min_r F at the split r = floor(lam delta^(1/3))
    r = asy.r_floor(delta)
    pre = planes._Prefix(planes.SWEEP_BITS)
    pre.advance_to(delta - 1)
    small = pre.at(r)
    _, hi = planes._scaled_f_bounds(delta, r, pre.lo, pre.hi, small[0], small[1], planes.SWEEP_BITS)
    f_upper = Fraction(hi, 4 << planes.SWEEP_BITS)
    assert f_upper <= asy.gold_rhs(delta).lo


@pytest.mark.parametrize("delta", [300_000, 999_999])
def test_integral_bounds_dominate_sums(delta):
    r = asy.r_floor(delta)
    b1, b2, b3, b4 = asy.integral_upper_bounds(delta, r)
    pre = planes._Prefix(64)
    pre.advance_to(delta - 1)
    small = pre.at(r)
    scale = Fraction(1, 1 << 64)
    c_hi = [(pre.hi[i] - small[0][i]) * scale for i in range(4)]
    c_lo4 = (pre.lo[3] - small[1][3]) * scale
    assert delta ** 5 * c_hi[0] <= b1.hi
    assert 3 * delta ** 4 * c_hi[1] <= b2.hi
    assert delta ** 3 * c_hi[2] <= b3.hi
    assert -Fraction(3, 4) * delta ** 2 * c_lo4 <= b4.hi


def test_log_term_negative():
    assert asy.log_term_negativity(asy.TAIL_START)
    assert asy.r_floor(asy.TAIL_START) == 58
