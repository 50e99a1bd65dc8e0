"""Point-count error constants for absolutely irreducible hypersurfaces.

Given a planes-bound constant ``b`` (so that the weighted plane count is at
most ``b * delta^(13/3)`` times the usual q-factor), the error term of the
point count has the shape

    (delta-1)(delta-2) q^(n-3/2) + G * delta^(13/3) q^(n-2),

and ``G`` must dominate ``(4/3) b + (2 delta^2 + delta + 7/3) / delta^(13/3)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .exact import decimal_render, pow_13_3_bounds, rational, root_bounds

B_MAIN = Fraction(199, 100)
B_UNIFORM = Fraction(2043, 1000)

PUBLISHED_G = {
    "g286": Fraction(286, 100),
    "g2924": Fraction(2924, 1000),
    "g2741": Fraction(2741, 1000),
    "delta2": Fraction(1803, 1000),
}

# (b, delta_min, excluded interval) behind each published G
DERIVATIONS = {
    "g286": (B_MAIN, 3, (6, 37)),
    "g2924": (B_UNIFORM, 3, None),
    "g2741": (B_UNIFORM, 8, None),
}


@dataclass(frozen=True)
class GDerivation:
    b: Fraction
    delta_min: int
    excluded: Optional[tuple[int, int]]
    g_minimal: Fraction
    g_claimed: Optional[Fraction]

    @property
    def verdict(self) -> str:
        if self.g_claimed is None:
            return "n/a"
        return "Pass" if self.g_minimal <= self.g_claimed else "Fail"


@dataclass(frozen=True)
class EstimateBound:
    delta: int
    n: int
    q: int
    mode: str
    error_bound: Fraction    # certified upper bound

    @property
    def main_term(self) -> int:
        return self.q ** (self.n - 1)

    def to_json(self) -> dict:
        return {
            "delta": self.delta,
            "n": self.n,
            "q": self.q,
            "mode": self.mode,
            "main": f"{self.q}^({self.n - 1})",
            "error_bound": decimal_render(self.error_bound, 6, "ceil"),
        }


def residual_ratio(b, delta: int, precision: int = 128) -> Fraction:
    """Upper bound on (4/3) b + (2 delta^2 + delta + 7/3) / delta^(13/3)."""
    if delta < 3:
        raise ValueError("delta must be >= 3")
    b = rational(b)
    lo, _ = pow_13_3_bounds(delta, precision)
    return Fraction(4, 3) * b + (2 * delta ** 2 + delta + Fraction(7, 3)) / lo


def residual_is_decreasing(b, deltas) -> bool:
    """Exact check that the excess over (4/3) b strictly decreases along ``deltas``.

    (2d^2 + d + 7/3) / d^(13/3) > (2e^2 + e + 7/3) / e^(13/3) for d < e is
    compared after cubing: num_d^3 e^13 > num_e^3 d^13.
    """
    deltas = sorted(deltas)
    for d, e in zip(deltas, deltas[1:]):
        num_d = 2 * d * d + d + Fraction(7, 3)
        num_e = 2 * e * e + e + Fraction(7, 3)
        if not num_d ** 3 * e ** 13 > num_e ** 3 * d ** 13:
            return False
    return True


def derive_g(b, delta_min: int, g_claimed=None, excluded=None) -> GDerivation:
    b = rational(b)
    if delta_min < 3:
        raise ValueError("delta_min must be >= 3")
    sample = sorted({delta_min + i * i for i in range(100)})
    if not residual_is_decreasing(b, sample):
        raise AssertionError("residual ratio is not decreasing on the sample grid")
    return GDerivation(b, delta_min, excluded, residual_ratio(b, delta_min),
                       None if g_claimed is None else rational(g_claimed))


def published_derivations() -> dict[str, GDerivation]:
    return {mode: derive_g(b, dmin, PUBLISHED_G[mode], excl) for mode, (b, dmin, excl) in DERIVATIONS.items()}


def delta2_numerator() -> Fraction:
    """Coefficient of q^(n-2) at delta = 2 (the q^(1/2) term vanishes)."""
    d = 2
    p = Fraction(3, 2) * d ** 4 - 2 * d ** 3 + Fraction(5, 2) * d ** 2
    return (d - 1) * (d - 2) + d + 1 + d ** 2 + Fraction(4, 3) * p + d ** 2 + Fraction(4, 3)


def delta2_constant(precision: int = 128) -> tuple[Fraction, Fraction]:
    """Enclosure of delta2_numerator / 2^(13/3)."""
    lo, hi = pow_13_3_bounds(2, precision)
    num = delta2_numerator()
    return num / hi, num / lo


def _is_prime_power(q: int) -> bool:
    if q < 2:
        return False
    p = 2
    while p * p <= q and q % p:
        p += 1
    if p * p > q:
        p = q
    while q % p == 0:
        q //= p
    return q == 1


def mode_for(delta: int) -> str:
    if delta == 2:
        return "delta2"
    if delta >= 8:
        return "g2741"
    return "g2924"


def estimate_bound(delta: int, n: int, q: int, mode: str, precision: int = 128) -> EstimateBound:
    """Certified upper bound on |#(H cap F_q^n) - q^(n-1)|."""
    if mode not in PUBLISHED_G:
        raise ValueError(f"unknown mode {mode!r}")
    if delta < 2:
        raise ValueError("delta must be >= 2")
    if mode == "g286" and 6 <= delta <= 37:
        raise ValueError("g286 excludes delta in [6, 37]")
    if mode == "g2741" and delta < 8:
        raise ValueError("g2741 requires delta >= 8")
    if mode == "delta2" and delta != 2:
        raise ValueError("delta2 mode requires delta == 2")
    if not _is_prime_power(q):
        raise ValueError(f"q={q} is not a prime power")
    if n < 2 or q ** (n - 1) < 4:
        raise ValueError("need q^(n-1) >= 4")
    g = PUBLISHED_G[mode]
    _, p13 = pow_13_3_bounds(delta, precision)
    # q^(n-3/2) = q^(n-2) * sqrt(q)
    _, sq = root_bounds(Fraction(q), 2, precision)
    qn2 = Fraction(q) ** (n - 2)
    bound = (delta - 1) * (delta - 2) * qn2 * sq + g * p13 * qn2
    return EstimateBound(delta, n, q, mode, bound)


def dumps_estimate(est: EstimateBound) -> str:
    return json.dumps(est.to_json())
