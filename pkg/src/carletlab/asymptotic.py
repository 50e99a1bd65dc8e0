"""Large-degree regime: integral bounds on the tail sums and the closed-form
upper bound on F with the split r = lambda * delta^(1/3).

Everything here is evaluated in :class:`DyadicInterval` arithmetic; a claim is
certified when the upper endpoint clears the inequality.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .exact import DyadicInterval, decimal_render, floor_root, format_rational, rational

PRECISION = 256
TAIL_START = 300_000
GRID_STEPS = 64


def _iv(x, precision: int = PRECISION) -> DyadicInterval:
    return DyadicInterval.exact(Fraction(x), precision)


def lambda_interval(precision: int = PRECISION) -> DyadicInterval:
    """(2/3)^(1/3), the minimiser of 1/(2 lam^2) + 3 lam / 2."""
    return _iv(Fraction(2, 3), precision).cbrt()


def g_of_lambda(lam: DyadicInterval) -> DyadicInterval:
    return 1 / (2 * lam ** 2) + Fraction(3, 2) * lam


@dataclass(frozen=True)
class AsymptoticParams:
    delta: int
    lam: DyadicInterval
    r: DyadicInterval
    beta: DyadicInterval
    gamma: DyadicInterval

    @classmethod
    def at(cls, delta, precision: int = PRECISION) -> "AsymptoticParams":
        lam = lambda_interval(precision)
        d = _iv(delta, precision)
        r = lam * d.cbrt()
        return cls(delta, lam, r, d / (d - 1), r / (r - 1))


def integral_upper_bounds(delta: int, r_floor: int, precision: int = PRECISION):
    """Upper bounds b1..b4 on delta^5 c1, 3 delta^4 c2, delta^3 c3 and -3/4 delta^2 c4.

    Each tail sum over ``j = r_floor+1 .. delta-1`` of a decreasing summand is
    bounded by the integral from ``r_floor`` to ``delta-1``; ``c4`` is bounded
    below by the integral of ``1/x`` from ``r_floor+1`` to ``delta``.
    """
    if not 1 <= r_floor <= delta - 2:
        raise ValueError("need 1 <= r_floor <= delta - 2")
    d = _iv(delta, precision)
    R = _iv(r_floor, precision)
    beta = d / (d - 1)
    b1 = -(d ** 3) / 2 + beta ** 3 * d ** 2 / 24 + d ** 5 / (2 * R ** 2) - d ** 5 / (24 * R ** 3)
    b2 = -3 * d ** 3 + 3 * beta ** 3 * d ** 2 / 8 + 3 * d ** 4 / R + 3 * d ** 4 / (8 * R ** 2)
    b3 = 2 * d ** 3 * ((d - 1) / R).log() + 11 * beta * d ** 2 / 8 - 11 * d ** 3 / (8 * R)
    b4 = -Fraction(3, 4) * d ** 2 * (d / (R + 1)).log()
    return b1, b2, b3, b4


def lambda_optimum(precision: int = PRECISION) -> DyadicInterval:
    """Enclosure of the optimal lambda, checked against lambda +- 1e-3."""
    lam = lambda_interval(precision)
    g = g_of_lambda(lam)
    step = Fraction(1, 1000)
    for shifted in (lam - step, lam + step):
        if not g.hi <= g_of_lambda(shifted).lo:
            raise AssertionError("lambda enclosure is not a certified minimiser")
    return lam


def leading_coefficient(delta, precision: int = PRECISION) -> DyadicInterval:
    """gamma^2 / (2 lam^2) + 3 lam / 2 at the given delta."""
    p = AsymptoticParams.at(delta, precision)
    return p.gamma ** 2 / (2 * p.lam ** 2) + Fraction(3, 2) * p.lam


def limit_coefficient(precision: int = PRECISION) -> DyadicInterval:
    return g_of_lambda(lambda_interval(precision))


def gold_rhs(delta: int, precision: int = PRECISION) -> DyadicInterval:
    """Closed-form upper bound on F(delta, r) for delta >= 3e5."""
    if delta < TAIL_START:
        raise ValueError(f"closed form only valid for delta >= {TAIL_START}")
    p = AsymptoticParams.at(delta, precision)
    lam, gam, beta = p.lam, p.gamma, p.beta
    d = _iv(delta, precision)
    c = d.cbrt()                      # delta^(1/3)
    d3 = d ** 3
    terms = [
        (gam ** 2 / (2 * lam ** 2) + Fraction(3, 2) * lam) * d3 * c * d,      # delta^(13/3)
        -(gam ** 3) / (24 * lam ** 3) * d ** 4,
        3 * gam / lam * d3 * c * c,                                            # delta^(11/3)
        (Fraction(5, 2) - 3 * gam ** 2 / (8 * lam ** 2) - 2 * lam) * d3 * c,   # delta^(10/3)
        2 * ((gam * (d - 1) / (lam * c)).log() - Fraction(7, 4)) * d3,
        -11 * gam / (8 * lam) * d ** 2 * c * c,                                 # delta^(8/3)
        Fraction(5, 2) * lam * d ** 2 * c,                                      # delta^(7/3)
        (beta ** 3 / 24 + 3 * beta ** 2 / 8 + 11 * beta / 8 + 2) * d ** 2,
    ]
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    return total


def gold_ratio(delta: int, precision: int = PRECISION) -> DyadicInterval:
    d = _iv(delta, precision)
    return gold_rhs(delta, precision) / (d ** 4 * d.cbrt())


def _sup_normalized(a: int, b: Optional[int], lam: DyadicInterval, precision: int) -> Optional[Fraction]:
    """Upper bound on gold_rhs(delta) / delta^(13/3) over a <= delta <= b (b=None: infinity).

    Every normalised term is monotone in delta or a product of monotone
    nonnegative factors, so its supremum is bounded by endpoint values.
    Returns None when the log-term monotonicity premise cannot be certified.
    """
    A = _iv(a, precision)
    ca = A.cbrt()
    gam_a = AsymptoticParams.at(a, precision).gamma
    beta_a = A / (A - 1)
    total = gam_a ** 2 / (2 * lam ** 2) + Fraction(3, 2) * lam
    total = total + 3 * gam_a / lam / (ca * ca)
    if b is not None:
        B = _iv(b, precision)
        cb = B.cbrt()
        gam_b = AsymptoticParams.at(b, precision).gamma
        total = total - gam_b ** 3 / (24 * lam ** 3) / cb
        total = total - 11 * gam_b / (8 * lam) / (B * B / cb)
    else:
        gam_b = _iv(1, precision)
    coef3 = Fraction(5, 2) - 3 * gam_b ** 2 / (8 * lam ** 2) - 2 * lam
    if coef3.lo >= 0:
        total = total + coef3.hi / A
    elif b is not None:
        total = total + coef3.hi / B
    # log term: 2 (log(gamma (d-1) / (lam d^(1/3))) - 7/4) d^(-4/3)
    #        <= 2 (log(gamma_a / lam) + 2/3 log d - 7/4) d^(-4/3), decreasing once the bracket > 1/2
    bracket = (gam_a / lam).log() + Fraction(2, 3) * A.log() - Fraction(7, 4)
    if bracket.lo <= Fraction(1, 2):
        return None
    total = total + 2 * bracket / (A * ca)
    total = total + Fraction(5, 2) * lam / (A * A)
    total = total + (beta_a ** 3 / 24 + 3 * beta_a ** 2 / 8 + 11 * beta_a / 8 + 2) / (A * A * ca)
    return total.hi


@dataclass
class TailReport:
    delta_start: int
    constant: Fraction
    verdict: str
    grid: list[dict] = field(default_factory=list)
    margin: Optional[Fraction] = None

    def to_json(self) -> dict:
        return {
            "delta_start": self.delta_start,
            "constant": format_rational(self.constant),
            "grid": self.grid,
            "verdict": self.verdict,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def verify_tail(constant, delta_start: int = TAIL_START, steps: int = GRID_STEPS,
                precision: int = PRECISION) -> TailReport:
    """Certify gold_rhs(delta) <= constant * delta^(13/3) for every delta >= delta_start.

    Checks the ratio at ``delta_start * 2^i`` (i <= steps), bounds the
    supremum on each doubling interval by endpoint values of monotone terms,
    and closes the range with a final interval to infinity.
    """
    constant = rational(constant)
    if delta_start < TAIL_START:
        raise ValueError(f"delta_start must be >= {TAIL_START}")
    lam = lambda_interval(precision)
    report = TailReport(delta_start, constant, "Certified")
    margin = None
    points = [delta_start << i for i in range(steps + 1)]
    for i, a in enumerate(points):
        ratio = gold_ratio(a, precision)
        report.grid.append({"delta": a, "ratio_hi": decimal_render(ratio.hi, 8, "ceil")})
        if ratio.lo > constant:
            report.verdict = "Failed"
            return report
        if ratio.hi > constant:
            report.verdict = "Inconclusive"
            return report
        b = points[i + 1] if i + 1 < len(points) else None
        sup = _sup_normalized(a, b, lam, precision)
        if sup is None or sup > constant:
            report.verdict = "Inconclusive"
            return report
        gap = constant - sup
        margin = gap if margin is None else min(margin, gap)
    report.margin = margin
    return report


def projected_constant(sweep_limit: int, places: int = 6, precision: int = PRECISION) -> str:
    """Decimal upper bound on the leading coefficient if the finite check reached M."""
    if sweep_limit < TAIL_START:
        raise ValueError(f"sweep limit must be >= {TAIL_START}")
    return decimal_render(leading_coefficient(sweep_limit, precision).hi, places, "ceil")


def log_term_negativity(delta: int) -> bool:
    """True iff delta / (floor(lam delta^(1/3)) + 1) > 1, so -3/4 log(...) <= 0."""
    if delta < TAIL_START:
        raise ValueError(f"delta must be >= {TAIL_START}")
    r_floor = floor_root(Fraction(2 * delta, 3), 3)   # floor(cbrt(2/3) * delta^(1/3))
    return delta > r_floor + 1


def r_floor(delta: int) -> int:
    return floor_root(Fraction(2 * delta, 3), 3)
