"""Bounds on the weighted count of planes whose restriction splits.

For a degree-``delta`` polynomial the quantity to bound is

    F(delta, r) = r * P(delta) + delta^5 c1 + 3 delta^4 c2 + delta^3 c3
                  - 3/4 delta^2 c4 + 2 delta^2,

with ``P(delta) = 3/2 delta^4 - 2 delta^3 + 5/2 delta^2`` and ``c1..c4``
tail sums over ``j = r+1 .. delta-1``.  This module evaluates ``F`` exactly
for small ``delta``, searches the optimal integer split ``r`` and sweeps
large ``delta`` ranges with fixed-point interval sums, checking
``min_r F <= C * delta**(13/3)``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .exact import (
    Ordering,
    cmp_pow_13_3,
    decimal_render,
    floor_times_pow_13_3,
    format_rational,
    icbrt,
    rational,
    render_pow_13_3,
    root_bounds,
)

SWEEP_BITS = 128
EXACT_LIMIT = 5000          # largest delta for which exact-rational confirmation is cheap
CLOSE_MARGIN = 1e-3         # relative margin below which an interval verdict is re-checked
PREFIX_CAP = 4096           # small-r prefix sums kept in memory during a sweep
EXCEPTIONAL = tuple(range(6, 38))

MAIN_CONSTANT = Fraction(199, 100)
UNIFORM_CONSTANT = Fraction(2043, 1000)
DELTA2_CONSTANT = Fraction(893, 1000)


class CheckpointError(RuntimeError):
    """A checkpoint file exists but cannot be trusted."""


@dataclass(frozen=True)
class CSums:
    delta: int
    r: int
    c1: Fraction
    c2: Fraction
    c3: Fraction
    c4: Fraction


@dataclass(frozen=True)
class BoundRow:
    delta: int
    r_opt: int
    f_value: Fraction
    threshold_constant: Fraction
    verdict: str
    ratio_upper: str

    @property
    def computed_bound(self) -> str:
        return decimal_render(self.f_value, 3, "truncate")

    @property
    def threshold(self) -> str:
        return render_pow_13_3(self.threshold_constant, self.delta, 3)


@dataclass
class SweepReport:
    delta_min: int
    delta_max: int
    constant: Fraction
    failures: list[int] = field(default_factory=list)
    elapsed: float = 0.0
    checkpoint: Optional[str] = None
    escalations: int = 0

    @property
    def range(self) -> tuple[int, int]:
        return self.delta_min, self.delta_max

    def to_json(self) -> dict:
        return {
            "delta_min": self.delta_min,
            "delta_max": self.delta_max,
            "constant": format_rational(self.constant),
            "failures": self.failures,
            "elapsed": round(self.elapsed, 3),
            "checkpoint": self.checkpoint,
            "escalations": self.escalations,
        }


# -- exact evaluation --------------------------------------------------------

def p_term(delta: int) -> Fraction:
    if delta < 2:
        raise ValueError("delta must be >= 2")
    return Fraction(3, 2) * delta ** 4 - 2 * delta ** 3 + Fraction(5, 2) * delta ** 2


def _summands(j: int) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    return (
        Fraction(8 * j - 1, 8 * j ** 4),
        Fraction(4 * j - 1, 4 * j ** 3),
        Fraction(16 * j - 11, 8 * j ** 2),
        Fraction(1, j),
    )


def _check_r(delta: int, r: int) -> None:
    if delta < 3:
        raise ValueError("delta must be >= 3")
    if not 1 <= r <= delta - 2:
        raise ValueError(f"r={r} outside [1, {delta - 2}] for delta={delta}")


def compute_csums(delta: int, r: int) -> CSums:
    _check_r(delta, r)
    c = [Fraction(0)] * 4
    for j in range(r + 1, delta):
        for i, t in enumerate(_summands(j)):
            c[i] += t
    return CSums(delta, r, *c)


def _combine(delta: int, r: int, c1, c2, c3, c4) -> Fraction:
    return (r * p_term(delta) + delta ** 5 * c1 + 3 * delta ** 4 * c2 + delta ** 3 * c3
            - Fraction(3, 4) * delta ** 2 * c4 + 2 * delta ** 2)


def f_value(delta: int, r: int) -> Fraction:
    s = compute_csums(delta, r)
    return _combine(delta, r, s.c1, s.c2, s.c3, s.c4)


def exact_prefix_sums(m_max: int) -> list[tuple[Fraction, Fraction, Fraction, Fraction]]:
    """``out[m]`` holds the four sums over ``j = 1..m`` (``out[0]`` is all zero)."""
    out = [(Fraction(0),) * 4]
    acc = [Fraction(0)] * 4
    for j in range(1, m_max + 1):
        for i, t in enumerate(_summands(j)):
            acc[i] += t
        out.append(tuple(acc))
    return out


def f_value_from_prefix(delta: int, r: int, prefix) -> Fraction:
    _check_r(delta, r)
    hi, lo = prefix[delta - 1], prefix[r]
    return _combine(delta, r, *(hi[i] - lo[i] for i in range(4)))


# -- optimal r -----------------------------------------------------------------

def first_difference_sign(delta: int, r: int) -> int:
    """Sign of F(delta, r+1) - F(delta, r), decided on integers."""
    j = r + 1
    # (F(r+1) - F(r)) * 8 j^4 / delta^2, both sides integral
    gain = 4 * j ** 4 * (3 * delta ** 2 - 4 * delta + 5)
    loss = (delta ** 3 * (8 * j - 1) + 6 * delta ** 2 * j * (4 * j - 1)
            + delta * j ** 2 * (16 * j - 11) - 6 * j ** 3)
    return (gain > loss) - (gain < loss)


def optimal_r_index(delta: int) -> int:
    """Smallest r in [1, delta-2] at which the first difference turns nonnegative.

    Walks from the asymptotic estimate (2 delta / 3)^(1/3); relies on the
    first difference being nondecreasing in r (checked exhaustively in tests).
    """
    if delta < 3:
        raise ValueError("delta must be >= 3")
    top = delta - 2
    r = min(top, max(1, round((2 * delta / 3) ** (1 / 3))))
    while r > 1 and first_difference_sign(delta, r - 1) >= 0:
        r -= 1
    while r < top and first_difference_sign(delta, r) < 0:
        r += 1
    return r


def optimal_r_exhaustive(delta: int) -> tuple[int, Fraction]:
    """Minimum of F over every r in [1, delta-2]; tail sums grow as r decreases."""
    _check_r(delta, 1)
    c = [Fraction(0)] * 4
    best_r, best = None, None
    for r in range(delta - 2, 0, -1):
        for i, t in enumerate(_summands(r + 1)):
            c[i] += t
        v = _combine(delta, r, *c)
        if best is None or v <= best:
            best_r, best = r, v
    return best_r, best


def optimal_r(delta: int) -> tuple[int, Fraction]:
    """Optimal split and the exact minimum of F; ties go to the smaller r."""
    r = optimal_r_index(delta)
    return r, f_value(delta, r)


def f_min(delta: int) -> tuple[int, Fraction]:
    """Like :func:`optimal_r` but also covers delta = 2 (bound P(2), no split, r = 0)."""
    if delta == 2:
        return 0, p_term(2)
    return optimal_r(delta)


# -- fixed-point interval sums -------------------------------------------------

def _scaled_summands(j: int, bits: int) -> tuple[int, int, int, int, int]:
    """floor(2^bits * t_i(j)) for the four summands, plus a bitmask of inexact ones."""
    j2 = j * j
    j3 = j2 * j
    one = 1 << bits
    a, ra = divmod((8 * j - 1) << bits, 8 * j3 * j)
    b, rb = divmod((4 * j - 1) << bits, 4 * j3)
    c, rc = divmod((16 * j - 11) << bits, 8 * j2)
    d, rd = divmod(one, j)
    return a, b, c, d, (ra != 0) | (rb != 0) << 1 | (rc != 0) << 2 | (rd != 0) << 3


class _Prefix:
    """Running fixed-point prefix sums; lo/hi bounds at scale 2^bits."""

    def __init__(self, bits: int):
        self.bits = bits
        self.m = 0
        self.lo = [0, 0, 0, 0]
        self.hi = [0, 0, 0, 0]
        self.small = [((0, 0, 0, 0), (0, 0, 0, 0))]

    def advance_to(self, m: int) -> None:
        lo, hi, bits = self.lo, self.hi, self.bits
        for j in range(self.m + 1, m + 1):
            a, b, c, d, inexact = _scaled_summands(j, bits)
            lo[0] += a
            lo[1] += b
            lo[2] += c
            lo[3] += d
            hi[0] += a + (inexact & 1)
            hi[1] += b + (inexact >> 1 & 1)
            hi[2] += c + (inexact >> 2 & 1)
            hi[3] += d + (inexact >> 3 & 1)
            if j < PREFIX_CAP:
                self.small.append((tuple(lo), tuple(hi)))
        self.m = max(self.m, m)

    def at(self, m: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        if m < len(self.small):
            return self.small[m]
        if m == self.m:
            return tuple(self.lo), tuple(self.hi)
        fresh = _Prefix(self.bits)
        fresh.advance_to(m)
        return tuple(fresh.lo), tuple(fresh.hi)


def _scaled_f_bounds(delta: int, r: int, big_lo, big_hi, small_lo, small_hi, bits: int) -> tuple[int, int]:
    """Integer bounds L <= 4 * 2^bits * F(delta, r) <= U."""
    d2 = delta * delta
    d3 = d2 * delta
    d4 = d3 * delta
    base = (2 * r * (3 * d4 - 4 * d3 + 5 * d2) + 8 * d2) << bits
    c_hi = [big_hi[i] - small_lo[i] for i in range(4)]
    c_lo = [big_lo[i] - small_hi[i] for i in range(4)]
    upper = base + 4 * d4 * delta * c_hi[0] + 12 * d4 * c_hi[1] + 4 * d3 * c_hi[2] - 3 * d2 * c_lo[3]
    lower = base + 4 * d4 * delta * c_lo[0] + 12 * d4 * c_lo[1] + 4 * d3 * c_lo[2] - 3 * d2 * c_hi[3]
    return lower, upper


def _direct_f_bounds(delta: int, r: int, bits: int) -> tuple[int, int]:
    lo = [0] * 4
    hi = [0] * 4
    for j in range(r + 1, delta):
        *vals, inexact = _scaled_summands(j, bits)
        for i in range(4):
            lo[i] += vals[i]
            hi[i] += vals[i] + (inexact >> i & 1)
    zero = (0, 0, 0, 0)
    return _scaled_f_bounds(delta, r, lo, hi, zero, zero, bits)


def _verdict_from_bounds(lower: int, upper: int, constant: Fraction, delta: int, bits: int) -> Optional[Ordering]:
    """Decide F vs constant * delta^(13/3) from scaled bounds; None when undecided."""
    p, q = constant.numerator, constant.denominator
    rhs = p ** 3 * delta ** 13 << (3 * bits + 6)     # (4 * 2^bits)^3 = 2^(3 bits + 6)
    q3 = q ** 3
    if upper ** 3 * q3 < rhs:
        return Ordering.LESS
    if lower ** 3 * q3 > rhs:
        return Ordering.GREATER
    if lower == upper and lower ** 3 * q3 == rhs:
        return Ordering.EQUAL
    return None


def _relative_gap(value: int, constant: Fraction, delta: int, bits: int) -> float:
    p, q = constant.numerator, constant.denominator
    rhs = p ** 3 * delta ** 13 << (3 * bits + 6)
    return abs(float(Fraction(value ** 3 * q ** 3, rhs)) ** (1 / 3) - 1.0)


def certified_compare(delta: int, r: int, constant: Fraction, bounds=None, bits: int = SWEEP_BITS) -> tuple[Ordering, bool]:
    """Compare F(delta, r) with constant * delta^(13/3).

    Returns the ordering and whether escalation beyond the first interval was
    needed.  Precision doubles up to 1024 bits, then exact rationals decide.
    """
    if bounds is None:
        bounds = _direct_f_bounds(delta, r, bits)
    verdict = _verdict_from_bounds(*bounds, constant, delta, bits)
    close = verdict is not None and _relative_gap(bounds[1], constant, delta, bits) < CLOSE_MARGIN
    if verdict is not None and not (close and delta <= EXACT_LIMIT):
        return verdict, False
    if verdict is not None:
        exact = cmp_pow_13_3(f_value(delta, r), constant, delta)
        if (exact == Ordering.GREATER) != (verdict == Ordering.GREATER):
            raise AssertionError(f"interval and exact verdicts disagree at delta={delta}")
        return exact, True
    b = bits * 2
    while b <= 1024:
        v = _verdict_from_bounds(*_direct_f_bounds(delta, r, b), constant, delta, b)
        if v is not None:
            return v, True
        b *= 2
    return cmp_pow_13_3(f_value(delta, r), constant, delta), True


# -- sweeps ----------------------------------------------------------------------

def _sweep_chunk(args) -> tuple[list[int], int]:
    lo_delta, hi_delta, constant = args
    constant = Fraction(constant)
    prefix = _Prefix(SWEEP_BITS)
    failures = []
    escalations = 0
    for delta in range(lo_delta, hi_delta + 1):
        prefix.advance_to(delta - 1)
        r = optimal_r_index(delta)
        small = prefix.at(r)
        bounds = _scaled_f_bounds(delta, r, prefix.lo, prefix.hi, small[0], small[1], SWEEP_BITS)
        verdict, escalated = certified_compare(delta, r, constant, bounds)
        escalations += escalated
        if verdict == Ordering.GREATER:
            failures.append(delta)
    return failures, escalations


def _load_checkpoint(path: str, constant: Fraction, delta_min: int, delta_max: int):
    try:
        with open(path) as fh:
            data = json.load(fh)
        saved = rational(data["constant"])
        last = data["last_delta"]
        failures = data["failures"]
        if not isinstance(last, int) or not all(isinstance(x, int) for x in failures):
            raise TypeError("bad field types")
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise CheckpointError(f"corrupt checkpoint {path}: {exc}") from exc
    if saved != constant:
        raise CheckpointError(f"checkpoint {path} is for constant {data['constant']}")
    if not delta_min - 1 <= last <= delta_max:
        raise CheckpointError(f"checkpoint {path} last_delta={last} outside the requested range")
    if failures != sorted(set(failures)) or any(not delta_min <= x <= last for x in failures):
        raise CheckpointError(f"checkpoint {path} has an inconsistent failure list")
    return last, failures


def write_checkpoint(path: str, constant: Fraction, last_delta: int, failures: list[int]) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".ckpt-")
    with os.fdopen(fd, "w") as fh:
        json.dump({"constant": format_rational(constant), "last_delta": last_delta,
                   "failures": failures}, fh)
    os.replace(tmp, path)


def _chunks(lo: int, hi: int, size: int) -> list[tuple[int, int]]:
    return [(a, min(hi, a + size - 1)) for a in range(lo, hi + 1, size)]


def verify_range(delta_min: int, delta_max: int, constant, checkpoint: Optional[str] = None,
                 workers: int = 1, checkpoint_every: int = 10_000) -> SweepReport:
    """Find every delta in range with min_r F(delta, r) > constant * delta^(13/3)."""
    constant = rational(constant)
    if not 3 <= delta_min <= delta_max:
        raise ValueError("need 3 <= delta_min <= delta_max")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    started = time.perf_counter()
    failures: list[int] = []
    start = delta_min
    if checkpoint and os.path.exists(checkpoint):
        last, failures = _load_checkpoint(checkpoint, constant, delta_min, delta_max)
        start = last + 1
    report = SweepReport(delta_min, delta_max, constant, list(failures), checkpoint=checkpoint)
    if start <= delta_max:
        if workers == 1:
            # one running prefix across the whole range; checkpoints between blocks
            prefix = _Prefix(SWEEP_BITS)
            for a, b in _chunks(start, delta_max, checkpoint_every):
                for delta in range(a, b + 1):
                    prefix.advance_to(delta - 1)
                    r = optimal_r_index(delta)
                    small = prefix.at(r)
                    bounds = _scaled_f_bounds(delta, r, prefix.lo, prefix.hi, small[0], small[1], SWEEP_BITS)
                    verdict, escalated = certified_compare(delta, r, constant, bounds)
                    report.escalations += escalated
                    if verdict == Ordering.GREATER:
                        report.failures.append(delta)
                if checkpoint:
                    write_checkpoint(checkpoint, constant, b, report.failures)
        else:
            size = min(checkpoint_every, max(1, math.ceil((delta_max - start + 1) / workers)))
            jobs = [(a, b, format_rational(constant)) for a, b in _chunks(start, delta_max, size)]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for (a, b, _), (fails, esc) in zip(jobs, pool.map(_sweep_chunk, jobs)):
                    report.failures.extend(fails)
                    report.escalations += esc
                    if checkpoint:
                        write_checkpoint(checkpoint, constant, b, report.failures)
    report.failures = sorted(set(report.failures))
    report.elapsed = time.perf_counter() - started
    return report


# -- tables and ratios ---------------------------------------------------------

def ratio_upper(value: Fraction, delta: int, places: int = 6) -> str:
    """Smallest decimal with ``places`` digits that is >= value / delta^(13/3)."""
    # floor(10^places * value / delta^(13/3)) from cubes, then round up unless exact
    scaled = Fraction(10 ** places) ** 3 * value ** 3 / delta ** 13
    base = icbrt(scaled.numerator // scaled.denominator)
    if Fraction(base) ** 3 != scaled:
        base += 1
    return decimal_render(Fraction(base, 10 ** places), places)


def bound_row(delta: int, constant=MAIN_CONSTANT) -> BoundRow:
    constant = rational(constant)
    r, value = f_min(delta)
    order = cmp_pow_13_3(value, constant, delta)
    return BoundRow(delta, r, value, constant, "Fail" if order == Ordering.GREATER else "Pass",
                    ratio_upper(value, delta))


def exceptional_table(constant=MAIN_CONSTANT) -> list[BoundRow]:
    return [bound_row(d, constant) for d in EXCEPTIONAL]


def rows_to_csv(rows: Iterable[BoundRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["delta", "r_opt", "computed_bound", "threshold", "verdict"])
    for row in rows:
        writer.writerow([row.delta, row.r_opt, row.computed_bound, row.threshold, row.verdict])
    return buf.getvalue()


def _scaled_bounds_for(delta: int, prefix: _Prefix) -> tuple[int, int, int]:
    if delta == 2:
        v = 4 * 18 << prefix.bits
        return 0, v, v
    prefix.advance_to(delta - 1)
    r = optimal_r_index(delta)
    small = prefix.at(r)
    lo, hi = _scaled_f_bounds(delta, r, prefix.lo, prefix.hi, small[0], small[1], prefix.bits)
    return r, lo, hi


def max_ratio(delta_min: int, delta_max: int) -> tuple[int, str]:
    """Delta maximising min_r F / delta^(13/3), with a certified decimal upper bound.

    The argmax is certified by cross-multiplied cube comparisons against every
    other delta in range.
    """
    if not 2 <= delta_min <= delta_max:
        raise ValueError("need 2 <= delta_min <= delta_max")
    prefix = _Prefix(SWEEP_BITS)
    entries = []
    for delta in range(delta_min, delta_max + 1):
        _, lo, hi = _scaled_bounds_for(delta, prefix)
        entries.append((delta, lo, hi))
    best = max(entries, key=lambda e: (e[2] / 2.0 ** 64) / delta_pow(e[0]))
    d_star, lo_star, _ = best
    lo3 = lo_star ** 3
    for delta, _, hi in entries:
        if delta == d_star:
            continue
        # hi/delta^(13/3) <= lo_star/d_star^(13/3)  <=>  hi^3 d_star^13 <= lo_star^3 delta^13
        if hi ** 3 * d_star ** 13 > lo3 * delta ** 13:
            raise AssertionError(f"argmax not certified: delta={delta} vs {d_star}")
    _, value = f_min(d_star) if d_star <= EXACT_LIMIT else (None, Fraction(best[2], 4 << SWEEP_BITS))
    return d_star, ratio_upper(value, d_star)


def delta_pow(delta: int) -> float:
    return float(delta) ** (13 / 3)


def baseline_constant(delta: int, precision: int = 128) -> Fraction:
    """Upper bound on 2 delta^(13/3) + 3 delta^(11/3), the earlier planes coefficient."""
    if delta < 2:
        raise ValueError("delta must be >= 2")
    _, p13 = root_bounds(Fraction(delta) ** 13, 3, precision)
    _, p11 = root_bounds(Fraction(delta) ** 11, 3, precision)
    return 2 * p13 + 3 * p11


def baseline_exceeds(delta: int, constant=UNIFORM_CONSTANT) -> bool:
    """True iff 2 delta^(13/3) + 3 delta^(11/3) > constant * delta^(13/3), i.e.
    3 > (constant - 2) delta^(2/3), decided by cubing."""
    excess = rational(constant) - 2
    if excess <= 0:
        return True
    return 27 > excess ** 3 * delta ** 2


def delta2_check() -> bool:
    """P(2) = 18 <= 0.893 * 2^(13/3)."""
    return cmp_pow_13_3(p_term(2), DELTA2_CONSTANT, 2) != Ordering.GREATER


def floor_threshold(constant, delta: int) -> int:
    return floor_times_pow_13_3(rational(constant), delta)


__all__ = [
    "BoundRow", "CSums", "CheckpointError", "SweepReport", "exceptional_table", "baseline_constant",
    "bound_row", "compute_csums", "f_value", "max_ratio", "optimal_r", "p_term", "verify_range",
]
