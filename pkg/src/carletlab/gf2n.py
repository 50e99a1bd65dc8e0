"""Brute-force GF(2^n) oracle.

Elements are ints in the polynomial basis (bit i is the coefficient of X^i).
Scalar operations use carry-less multiplication; the exhaustive counts use
numpy log/antilog tables.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterator, Optional, Sequence

import numpy as np

FLATS_BUDGET = 2 ** 30
VARIETY_BUDGET = 2 ** 24
MAX_N = 16


class BudgetExceeded(RuntimeError):
    """Exhaustive enumeration refused: the instance is larger than the work budget."""


# -- GF(2)[X] helpers ------------------------------------------------------------

def _degree(p: int) -> int:
    return p.bit_length() - 1


def poly_mod(a: int, m: int) -> int:
    dm = _degree(m)
    while a and _degree(a) >= dm:
        a ^= m << (_degree(a) - dm)
    return a


def clmul(a: int, b: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def is_irreducible(p: int) -> bool:
    """Trial division by every polynomial of degree 1 .. deg(p)//2."""
    d = _degree(p)
    if d < 1:
        return False
    for q in range(2, 1 << (d // 2 + 1)):
        if poly_mod(p, q) == 0:
            return False
    return True


@lru_cache(maxsize=None)
def irreducibles(n: int) -> tuple[int, ...]:
    return tuple(p for p in range(1 << n, 1 << (n + 1)) if is_irreducible(p))


def default_modulus(n: int, largest: bool = False) -> int:
    table = irreducibles(n)
    return table[-1] if largest else table[0]


# -- field context -----------------------------------------------------------------

@dataclass(frozen=True)
class FieldCtx:
    n: int
    modulus: int = 0

    def __post_init__(self):
        if not 2 <= self.n <= MAX_N:
            raise ValueError(f"n must be in [2, {MAX_N}]")
        if self.modulus == 0:
            object.__setattr__(self, "modulus", default_modulus(self.n))
        if _degree(self.modulus) != self.n or not is_irreducible(self.modulus):
            raise ValueError(f"modulus {self.modulus:#x} is not irreducible of degree {self.n}")

    @classmethod
    def alternate(cls, n: int) -> "FieldCtx":
        """Same field size, lexicographically largest irreducible modulus."""
        return cls(n, default_modulus(n, largest=True))

    @property
    def q(self) -> int:
        return 1 << self.n

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        return poly_mod(clmul(a, b), self.modulus)

    def pow(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def f_inv(self, x: int) -> int:
        """x^(2^n - 2): the inverse for x != 0 and 0 at 0."""
        return self.pow(x, self.q - 2)

    @cached_property
    def _tables(self) -> tuple[np.ndarray, np.ndarray]:
        q = self.q
        for g in range(2, q):
            exp = [1]
            x = 1
            for _ in range(q - 2):
                x = self.mul(x, g)
                if x == 1:
                    break
                exp.append(x)
            if len(exp) == q - 1:
                break
        else:
            g, exp = 1, [1]   # q == 2 cannot happen (n >= 2)
        exp_tab = np.array(exp + exp, dtype=np.int64)
        log_tab = np.zeros(q, dtype=np.int64)
        log_tab[np.array(exp)] = np.arange(q - 1)
        return exp_tab, log_tab

    @property
    def exp_table(self) -> np.ndarray:
        return self._tables[0]

    @property
    def log_table(self) -> np.ndarray:
        return self._tables[1]

    @cached_property
    def inv_table(self) -> np.ndarray:
        q = self.q
        out = np.zeros(q, dtype=np.int64)
        logs = self.log_table[1:]
        out[1:] = self.exp_table[(q - 1 - logs) % (q - 1)]
        return out

    def mul_array(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        la, lb = self.log_table[a], self.log_table[b]
        out = self.exp_table[la + lb]
        return np.where((a == 0) | (b == 0), 0, out)

    def power_array(self, a: np.ndarray, e: int) -> np.ndarray:
        if e == 0:
            return np.ones_like(a)
        out = self.exp_table[(self.log_table[a] * e) % (self.q - 1)]
        return np.where(a == 0, 0, out)


# -- affine flats ------------------------------------------------------------------

def gaussian_binomial(n: int, k: int, base: int = 2) -> int:
    if not 0 <= k <= n:
        return 0
    num = den = 1
    for i in range(k):
        num *= base ** (n - i) - 1
        den *= base ** (i + 1) - 1
    return num // den


@dataclass(frozen=True)
class Flat:
    """k-flat ``offset + span(basis)``; basis in reduced echelon form (pivot = top bit,
    rows in decreasing pivot order), offset zero on every pivot bit."""

    k: int
    basis: tuple[int, ...]
    offset: int

    def points(self) -> list[int]:
        pts = [self.offset]
        for b in self.basis:
            pts += [p ^ b for p in pts]
        return pts

    def to_json(self, n: int) -> dict:
        width = (n + 3) // 4
        return {"basis": [f"{b:0{width}x}" for b in self.basis], "offset": f"{self.offset:0{width}x}"}


def canonical_flat(n: int, vectors: Sequence[int], point: int) -> Flat:
    """Canonical encoding of ``point + span(vectors)``."""
    rows: list[int] = []
    for v in vectors:
        for r in rows:
            if v ^ r < v:
                v ^= r
        if v:
            # clear the new pivot from existing rows
            top = 1 << _degree(v)
            rows = [r ^ v if r & top else r for r in rows]
            rows.append(v)
    rows.sort(reverse=True)
    # full reduction: each pivot appears in exactly one row
    for i, r in enumerate(rows):
        top = 1 << _degree(r)
        for j in range(len(rows)):
            if j != i and rows[j] & top:
                rows[j] ^= r
    rows.sort(reverse=True)
    for r in rows:
        if point & (1 << _degree(r)):
            point ^= r
    return Flat(len(rows), tuple(rows), point)


def enumerate_subspaces(n: int, k: int) -> Iterator[tuple[tuple[int, ...], int]]:
    """Every k-dim subspace of F_2^n as (RREF basis, pivot mask), each exactly once."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    for pivots in itertools.combinations(range(n - 1, -1, -1), k):
        pivmask = sum(1 << p for p in pivots)
        free_slots = [[b for b in range(p) if not pivmask >> b & 1] for p in pivots]
        sizes = [len(f) for f in free_slots]
        for choice in itertools.product(*(range(1 << s) for s in sizes)):
            rows = []
            for p, slots, bits in zip(pivots, free_slots, choice):
                row = 1 << p
                for i, b in enumerate(slots):
                    if bits >> i & 1:
                        row |= 1 << b
                rows.append(row)
            yield tuple(rows), pivmask


def enumerate_flats(ctx: FieldCtx, k: int) -> Iterator[Flat]:
    n = ctx.n
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    for rows, pivmask in enumerate_subspaces(n, k):
        for offset in range(ctx.q):
            if offset & pivmask == 0:
                yield Flat(k, rows, offset)


def flat_count(n: int, k: int) -> int:
    return (1 << (n - k)) * gaussian_binomial(n, k)


def flat_sum(ctx: FieldCtx, flat: Flat, func=None) -> int:
    func = func or ctx.f_inv
    total = 0
    for x in flat.points():
        total ^= func(x)
    return total


@dataclass
class SumFreeResult:
    n: int
    k: int
    sum_free: bool
    zero_sum_flats: int
    witness: Optional[Flat] = None

    def to_json(self) -> dict:
        out = {"n": self.n, "k": self.k, "sum_free": self.sum_free, "zero_sum_flats": self.zero_sum_flats}
        if self.witness is not None:
            out["witness"] = self.witness.to_json(self.n)
        return out


def _check_flats_budget(n: int, k: int, budget: int) -> None:
    work = flat_count(n, k) << k
    if work > budget:
        raise BudgetExceeded(f"n={n}, k={k}: {work} element operations exceed budget {budget}")


def is_sum_free(ctx: FieldCtx, k: int, table: Optional[np.ndarray] = None,
                budget: int = FLATS_BUDGET, batch: int = 2048) -> SumFreeResult:
    """Exhaustive check that no k-flat has zero value-sum under ``table`` (default f_inv).

    For each subspace U the sums over all cosets come from k XOR-shuffles of
    the value table: S <- S xor S[v xor b]; then S[v] is the sum over v + U.
    """
    n, q = ctx.n, ctx.q
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    _check_flats_budget(n, k, budget)
    values = ctx.inv_table if table is None else np.asarray(table, dtype=np.int64)
    idx = np.arange(q, dtype=np.int64)
    zero_cosets = 0
    witness = None
    subspaces = enumerate_subspaces(n, k)
    while True:
        chunk = list(itertools.islice(subspaces, batch))
        if not chunk:
            break
        basis = np.array([rows for rows, _ in chunk], dtype=np.int64)
        pivmask = np.array([m for _, m in chunk], dtype=np.int64)
        rows_idx = np.arange(len(chunk))[:, None]
        sums = np.broadcast_to(values, (len(chunk), q)).copy()
        for i in range(k):
            sums = sums ^ sums[rows_idx, idx[None, :] ^ basis[:, i:i + 1]]
        canonical = (idx[None, :] & pivmask[:, None]) == 0
        hits = (sums == 0) & canonical
        zero_cosets += int(hits.sum())
        if witness is None and hits.any():
            s = int(np.argmax(hits.any(axis=1)))
            offset = int(np.argmax(hits[s]))
            witness = Flat(k, tuple(int(b) for b in basis[s]), offset)
    return SumFreeResult(n, k, zero_cosets == 0, zero_cosets, witness)


def sum_free_set(ctx: FieldCtx, budget: int = FLATS_BUDGET) -> set[int]:
    return {k for k in range(1, ctx.n + 1) if is_sum_free(ctx, k, budget=budget).sum_free}


def expected_sum_free_set(n: int) -> set[int]:
    """The conjectured set of k for which x^-1 is k-th order sum-free."""
    if n % 2 == 0:
        return {1, n - 1}
    return {1, 2, n - 2, n - 1}


# -- partitions, Theta_k and the Moore determinant ----------------------------------

@dataclass(frozen=True)
class DyadicPartition:
    parts: tuple[int, ...]
    target: int


def gen_partitions(k: int) -> list[DyadicPartition]:
    """Partitions of 2^(k-1) into powers of two with at most k parts, in
    decreasing lexicographic order."""
    if not 1 <= k <= 8:
        raise ValueError("k must be in [1, 8]")
    target = 1 << (k - 1)
    out: list[tuple[int, ...]] = []

    def extend(prefix: list[int], remaining: int, largest: int) -> None:
        if remaining == 0:
            out.append(tuple(prefix))
            return
        if len(prefix) == k:
            return
        part = largest
        while part >= 1:
            if part <= remaining:
                extend(prefix + [part], remaining - part, part)
            part //= 2

    extend([], target, target)
    return [DyadicPartition(p, target) for p in out]


@lru_cache(maxsize=None)
def theta_monomials(k: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of Theta_k: distinct permutations of each padded partition."""
    monos = []
    for lam in gen_partitions(k):
        padded = lam.parts + (0,) * (k - len(lam.parts))
        monos.extend(sorted(set(itertools.permutations(padded))))
    return tuple(monos)


def theta_eval(ctx: FieldCtx, k: int, point: Sequence[int]) -> int:
    if len(point) != k:
        raise ValueError("point must have k coordinates")
    total = 0
    for exps in theta_monomials(k):
        term = 1
        for x, e in zip(point, exps):
            if e:
                term = ctx.mul(term, ctx.pow(x, e))
        total ^= term
    return total


def moore_det(ctx: FieldCtx, k: int, point: Sequence[int]) -> int:
    """det(x_i^(2^(j-1))) by Gaussian elimination over GF(2^n)."""
    if len(point) != k or not 1 <= k <= 8:
        raise ValueError("need k in [1, 8] and k coordinates")
    m = [[ctx.pow(x, 1 << j) for j in range(k)] for x in point]
    det = 1
    for col in range(k):
        pivot = next((r for r in range(col, k) if m[r][col]), None)
        if pivot is None:
            return 0
        m[col], m[pivot] = m[pivot], m[col]    # row swap: sign is irrelevant in char 2
        p = m[col][col]
        det = ctx.mul(det, p)
        p_inv = ctx.f_inv(p)
        for r in range(col + 1, k):
            if m[r][col]:
                factor = ctx.mul(m[r][col], p_inv)
                m[r] = [a ^ ctx.mul(factor, b) for a, b in zip(m[r], m[col])]
    return det


def f2_independent(vectors: Sequence[int]) -> bool:
    basis: list[int] = []
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v == 0:
            return False
        basis.append(v)
    return True


def _monomial_batch(ctx: FieldCtx, pts: np.ndarray, zero: np.ndarray, logs: np.ndarray,
                    exps: Sequence[Sequence[int]]) -> np.ndarray:
    order = ctx.q - 1
    acc = np.zeros(pts.shape[0], dtype=np.int64)
    for e in exps:
        s = np.zeros(pts.shape[0], dtype=np.int64)
        dead = np.zeros(pts.shape[0], dtype=bool)
        for i, ei in enumerate(e):
            if ei:
                s += logs[:, i] * ei
                dead |= zero[:, i]
        val = ctx.exp_table[s % order]
        val[dead] = 0
        acc ^= val
    return acc


def theta_batch(ctx: FieldCtx, k: int, pts: np.ndarray) -> np.ndarray:
    return _monomial_batch(ctx, pts, pts == 0, ctx.log_table[pts], theta_monomials(k))


def moore_batch(ctx: FieldCtx, k: int, pts: np.ndarray) -> np.ndarray:
    """In characteristic 2 the determinant equals the permanent: sum over permutations."""
    exps = [tuple(1 << sigma[i] for i in range(k)) for sigma in itertools.permutations(range(k))]
    return _monomial_batch(ctx, pts, pts == 0, ctx.log_table[pts], exps)


@dataclass
class VarietyCounts:
    n: int
    k: int
    theta_zeros: int
    intersection: int
    difference: int = field(init=False)

    def __post_init__(self):
        self.difference = self.theta_zeros - self.intersection

    @property
    def intersection_bound(self) -> int:
        """(2^(k-1))^2 q^(k-2): the bound on points where both vanish."""
        return (1 << (2 * (self.k - 1))) * (1 << (self.n * (self.k - 2))) if self.k >= 2 else 1 << (2 * (self.k - 1))

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "theta_zeros": self.theta_zeros,
                "intersection": self.intersection, "difference": self.difference}


def _point_blocks(q: int, k: int, block: int) -> Iterator[np.ndarray]:
    total = q ** k
    for start in range(0, total, block):
        flat_idx = np.arange(start, min(total, start + block), dtype=np.int64)
        cols = []
        for _ in range(k):
            cols.append(flat_idx % q)
            flat_idx = flat_idx // q
        yield np.stack(cols[::-1], axis=1)


def variety_counts(ctx: FieldCtx, k: int, budget: int = VARIETY_BUDGET, block: int = 1 << 18) -> VarietyCounts:
    """Exhaustive counts of Theta_k = 0 and Theta_k = Delta = 0 over F_q^k."""
    if not 1 <= k <= 8:
        raise ValueError("k must be in [1, 8]")
    if ctx.q ** k > budget:
        raise BudgetExceeded(f"q^k = 2^{ctx.n * k} exceeds the variety budget {budget}")
    zeros = inter = 0
    for pts in _point_blocks(ctx.q, k, block):
        on_theta = theta_batch(ctx, k, pts) == 0
        zeros += int(on_theta.sum())
        sub = pts[on_theta]
        if len(sub):
            inter += int((moore_batch(ctx, k, sub) == 0).sum())
    counts = VarietyCounts(ctx.n, k, zeros, inter)
    if k >= 2 and counts.intersection > counts.intersection_bound:
        raise AssertionError(f"intersection {counts.intersection} exceeds {counts.intersection_bound}")
    return counts


@dataclass
class CrossCheck:
    n: int
    k: int
    difference: int
    sum_free: bool
    implication_holds: bool
    converse_observed: bool

    def to_json(self) -> dict:
        return self.__dict__.copy()


def cross_check(ctx: FieldCtx, k: int, flats_budget: int = FLATS_BUDGET,
                variety_budget: int = VARIETY_BUDGET) -> CrossCheck:
    """A positive count off the Moore locus must imply a zero-sum k-flat."""
    counts = variety_counts(ctx, k, variety_budget)
    sf = is_sum_free(ctx, k, budget=flats_budget)
    implication = not (counts.difference > 0 and sf.sum_free)
    converse = (counts.difference > 0) == (not sf.sum_free)
    report = CrossCheck(ctx.n, k, counts.difference, sf.sum_free, implication, converse)
    if not implication:
        raise AssertionError(f"positive variety count but sum-free at n={ctx.n}, k={k}")
    return report


def report_json(ctx: FieldCtx, k: int, budget_flats: int = FLATS_BUDGET,
                budget_variety: int = VARIETY_BUDGET) -> str:
    sf = is_sum_free(ctx, k, budget=budget_flats)
    vc = variety_counts(ctx, k, budget_variety)
    out = sf.to_json()
    out.update(theta_zeros=vc.theta_zeros, intersection=vc.intersection, difference=vc.difference)
    return json.dumps(out)
