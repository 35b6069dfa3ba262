"""Weighted lattice-point counts on the quadric pair and on four binary linear forms.

S(B) sums r(Q1(x)) W(x/B) over x in Z^6 with Q2(x) = 0 and Q1(x) odd.  The
weights used here only see x through u = x1^2 + x2^2, v = x3^2 + x4^2,
t = x5^2 + x6^2 and Q1(x), so the default engine runs over (u, v) and counts
lattice points with r(u) r(v) r(t).  Two oracles sit next to it: a loop over
(x1, ..., x4) and a naive loop over (x1, ..., x5) that solves for x6.

T(B; L) sums r(L1) r(L2) r(L3) r(L4) omega(x/B, y/B) over (x, y) with x odd.
With L1 L2 of resultant 1 the substitution u = L1, v = L2 turns T(B; L) into
S(sqrt B) for the pair built by ``reduce_to_pair``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numba
import numpy as np

from .arith import r2, r2_table
from .errors import BudgetExceeded, DegeneratePair, UnsupportedWeight, ValidationError
from .forms import QuadPair

# the bundled TBB is too old for numba; skip it instead of warning on first use
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

DEFAULT_BUDGET = 5 * 10**9
# u values per chunk; chunk sums are reduced in index order, so the result
# does not depend on how many threads run the chunks
CHUNK = 64


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Bump:
    center: float
    halfwidth: float
    role: str = "w0"

    def __post_init__(self):
        if self.role not in ("w0", "w1"):
            raise UnsupportedWeight(f"bump role must be w0 or w1, got {self.role!r}")
        if not (math.isfinite(self.center) and math.isfinite(self.halfwidth)) or self.halfwidth <= 0:
            raise UnsupportedWeight(f"bad bump center/halfwidth ({self.center}, {self.halfwidth})")
        if self.role == "w1" and self.center - self.halfwidth <= 0:
            raise UnsupportedWeight("a w1 bump must be supported away from 0")

    @property
    def support(self) -> tuple[float, float]:
        return (self.center - self.halfwidth, self.center + self.halfwidth)

    def __call__(self, x: float) -> float:
        return _bump(x, self.center, self.halfwidth)


def _default_w1() -> Bump:
    return Bump(1.5, 1.0, "w1")


def _default_w0() -> Bump:
    return Bump(1.0, 1.0, "w0")


@dataclass(frozen=True)
class WeightSpec:
    """W(x) = scale * b12(x1^2+x2^2) b34(x3^2+x4^2) b56(x5^2+x6^2) bq(Q1(x)).

    For T the same four bumps act on L1, L2, L3, L4 in that order.
    """

    b12: Bump = field(default_factory=_default_w1)
    b34: Bump = field(default_factory=_default_w0)
    b56: Bump = field(default_factory=_default_w0)
    bq: Bump = field(default_factory=_default_w1)
    scale: float = 1.0

    def __post_init__(self):
        for b in self.bumps:
            if not isinstance(b, Bump):
                raise UnsupportedWeight("weights must be built from Bump descriptors")
        if not math.isfinite(self.scale) or self.scale < 0:
            raise UnsupportedWeight(f"scale must be finite and >= 0, got {self.scale}")

    @property
    def bumps(self) -> tuple[Bump, Bump, Bump, Bump]:
        return (self.b12, self.b34, self.b56, self.bq)

    def params(self) -> np.ndarray:
        return np.array([[b.center, b.halfwidth] for b in self.bumps], dtype=np.float64)

    def radial(self, u: int, v: int, t: int, q1: int, B2: float) -> float:
        """W at a lattice point with radii (u, v, t) and Q1 = q1, scaled by B^2."""
        return (
            self.scale
            * self.b12(u / B2)
            * self.b34(v / B2)
            * self.b56(t / B2)
            * self.bq(q1 / B2)
        )

    def scaled(self, lam: float) -> "WeightSpec":
        return WeightSpec(*self.bumps, scale=self.scale * lam)

    @classmethod
    def from_dict(cls, d: dict) -> "WeightSpec":
        kw = {}
        for key in ("b12", "b34", "b56", "bq"):
            if key in d:
                kw[key] = Bump(**d[key])
        if "scale" in d:
            kw["scale"] = float(d["scale"])
        return cls(**kw)


@numba.njit(cache=True)
def _bump(x, c, h):
    z = (x - c) / h
    if z <= -1.0 or z >= 1.0:
        return 0.0
    return math.exp(-1.0 / (1.0 - z * z))


def _as_weight(W) -> WeightSpec:
    if W is None:
        return WeightSpec()
    if not isinstance(W, WeightSpec):
        raise UnsupportedWeight("the engines need a WeightSpec (radial bump weights); got " + type(W).__name__)
    return W


# ---------------------------------------------------------------------------
# linear systems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearSystem:
    """L_i(x, y) = a_i x + b_i y for i = 1..4."""

    a: tuple[int, int, int, int]
    b: tuple[int, int, int, int]

    def __post_init__(self):
        if len(self.a) != 4 or len(self.b) != 4:
            raise ValidationError("a linear system has exactly four forms")
        for i in range(4):
            for j in range(i + 1, 4):
                if self.delta(i + 1, j + 1) == 0:
                    raise DegeneratePair(f"L{i + 1} and L{j + 1} are proportional")
        if self.delta(1, 2) != 1:
            raise ValidationError(f"need a1 b2 - a2 b1 = 1, got {self.delta(1, 2)}")
        if self.a[3] % 2 == 0 or self.b[3] % 2:
            raise ValidationError("L4 must be congruent to x mod 2 (a4 odd, b4 even)")

    @classmethod
    def from_flat(cls, coeffs: Sequence[int]) -> "LinearSystem":
        """From a1, b1, a2, b2, a3, b3, a4, b4."""
        if len(coeffs) != 8:
            raise ValidationError(f"expected 8 coefficients, got {len(coeffs)}")
        c = [int(x) for x in coeffs]
        return cls(tuple(c[0::2]), tuple(c[1::2]))  # type: ignore[arg-type]

    def delta(self, i: int, j: int) -> int:
        """a_i b_j - a_j b_i (1-based)."""
        return self.a[i - 1] * self.b[j - 1] - self.a[j - 1] * self.b[i - 1]

    def __call__(self, x: int, y: int) -> tuple[int, ...]:
        return tuple(a * x + b * y for a, b in zip(self.a, self.b))


def reduce_to_pair(L: LinearSystem) -> QuadPair:
    P = QuadPair(-L.delta(2, 4), L.delta(1, 4), L.delta(2, 3), -L.delta(1, 3), 1)
    # Plucker: D12 D34 - D13 D24 + D14 D23 = 0, and D12 = 1
    assert P.det == L.delta(3, 4), (P.det, L.delta(3, 4))
    return P


# ---------------------------------------------------------------------------
# numba engines
# ---------------------------------------------------------------------------


@numba.njit(cache=True, parallel=True)
def _radial_chunks(al, alp, be, bep, bepp, B2, wp, scale, r2t, u0, u1, v0, v1, tmax, qmax):
    nchunks = (u1 - u0 + CHUNK) // CHUNK
    out = np.zeros(nchunks)
    for c in numba.prange(nchunks):
        s = 0.0
        comp = 0.0
        for u in range(u0 + c * CHUNK, min(u1 + 1, u0 + (c + 1) * CHUNK)):
            ru = r2t[u]
            if ru == 0:
                continue
            wu = _bump(u / B2, wp[0, 0], wp[0, 1])
            if wu == 0.0:
                continue
            for v in range(v0, v1 + 1):
                rv = r2t[v]
                if rv == 0:
                    continue
                num = -(be * u + bep * v)
                if num % bepp != 0:
                    continue
                t = num // bepp
                if t < 0 or t > tmax:
                    continue
                rt = r2t[t]
                if rt == 0:
                    continue
                q1 = al * u + alp * v
                if q1 <= 0 or q1 > qmax or q1 % 2 == 0:
                    continue
                rq = r2t[q1]
                if rq == 0:
                    continue
                w = (
                    scale
                    * wu
                    * _bump(v / B2, wp[1, 0], wp[1, 1])
                    * _bump(t / B2, wp[2, 0], wp[2, 1])
                    * _bump(q1 / B2, wp[3, 0], wp[3, 1])
                )
                if w == 0.0:
                    continue
                term = (ru * rv * rt) * (rq * w)
                # Neumaier
                tot = s + term
                if abs(s) >= abs(term):
                    comp += (s - tot) + term
                else:
                    comp += (term - tot) + s
                s = tot
        out[c] = s + comp
    return out


@numba.njit(cache=True)
def _box_sum(al, alp, be, bep, bepp, B2, wp, scale, r2t, R12, R34, tmax, qmax):
    s = 0.0
    comp = 0.0
    for x1 in range(-R12, R12 + 1):
        for x2 in range(-R12, R12 + 1):
            u = x1 * x1 + x2 * x2
            wu = _bump(u / B2, wp[0, 0], wp[0, 1])
            if wu == 0.0:
                continue
            for x3 in range(-R34, R34 + 1):
                for x4 in range(-R34, R34 + 1):
                    v = x3 * x3 + x4 * x4
                    num = -(be * u + bep * v)
                    if num % bepp != 0:
                        continue
                    t = num // bepp
                    if t < 0 or t > tmax:
                        continue
                    q1 = al * u + alp * v
                    if q1 <= 0 or q1 > qmax or q1 % 2 == 0:
                        continue
                    w = (
                        scale
                        * wu
                        * _bump(v / B2, wp[1, 0], wp[1, 1])
                        * _bump(t / B2, wp[2, 0], wp[2, 1])
                        * _bump(q1 / B2, wp[3, 0], wp[3, 1])
                    )
                    if w == 0.0:
                        continue
                    term = r2t[t] * (r2t[q1] * w)
                    tot = s + term
                    if abs(s) >= abs(term):
                        comp += (s - tot) + term
                    else:
                        comp += (term - tot) + s
                    s = tot
    return s + comp


@numba.njit(cache=True)
def _naive_hist(al, alp, be, bep, bepp, R12, R34, R56, umin, umax, vmax):
    """hist[u, v] = #{(x1..x6) in the box : Q2 = 0, Q1 odd and positive}."""
    hist = np.zeros((umax + 1, vmax + 1), dtype=np.int64)
    for x1 in range(-R12, R12 + 1):
        for x2 in range(-R12, R12 + 1):
            u = x1 * x1 + x2 * x2
            if u < umin or u > umax:
                continue
            for x3 in range(-R34, R34 + 1):
                for x4 in range(-R34, R34 + 1):
                    v = x3 * x3 + x4 * x4
                    if v > vmax:
                        continue
                    q1 = al * u + alp * v
                    if q1 <= 0 or q1 % 2 == 0:
                        continue
                    for x5 in range(-R56, R56 + 1):
                        num = -(be * u + bep * v + bepp * x5 * x5)
                        if num % bepp != 0:
                            continue
                        x6sq = num // bepp
                        if x6sq < 0:
                            continue
                        x6 = int(math.sqrt(x6sq))
                        while x6 * x6 > x6sq:
                            x6 -= 1
                        while (x6 + 1) * (x6 + 1) <= x6sq:
                            x6 += 1
                        if x6 * x6 != x6sq or x6 > R56:
                            continue
                        hist[u, v] += 1 if x6 == 0 else 2
    return hist


@numba.njit(cache=True, parallel=True)
def _linear_chunks(a, b, B, wp, scale, r2t, x0, x1, y0, y1, Lmax):
    nchunks = (x1 - x0 + CHUNK) // CHUNK
    out = np.zeros(nchunks)
    for c in numba.prange(nchunks):
        s = 0.0
        comp = 0.0
        for x in range(x0 + c * CHUNK, min(x1 + 1, x0 + (c + 1) * CHUNK)):
            if x % 2 == 0:
                continue
            for y in range(y0, y1 + 1):
                prod = 1
                w = scale
                for i in range(4):
                    L = a[i] * x + b[i] * y
                    if L < 0 or L > Lmax[i]:
                        prod = 0
                        break
                    prod *= r2t[L]
                    if prod == 0:
                        break
                    w *= _bump(L / B, wp[i, 0], wp[i, 1])
                if prod == 0 or w == 0.0:
                    continue
                term = prod * w
                tot = s + term
                if abs(s) >= abs(term):
                    comp += (s - tot) + term
                else:
                    comp += (term - tot) + s
                s = tot
        out[c] = s + comp
    return out


# ---------------------------------------------------------------------------
# drivers
# ---------------------------------------------------------------------------


def _set_workers(workers: int) -> None:
    if workers < 1:
        raise ValidationError("workers must be >= 1")
    numba.set_num_threads(min(workers, numba.config.NUMBA_NUM_THREADS))


def _int_range(b: Bump, scale2: float) -> tuple[int, int]:
    """Integers inside the open support of b, stretched by scale2."""
    lo, hi = b.support
    return max(0, math.floor(lo * scale2)), max(0, math.ceil(hi * scale2))


def _check_B(B: float) -> float:
    B = float(B)
    if not math.isfinite(B) or B < 1:
        raise ValidationError(f"B must be >= 1, got {B}")
    return B


def _radial_bounds(W: WeightSpec, B2: float):
    u0, u1 = _int_range(W.b12, B2)
    v0, v1 = _int_range(W.b34, B2)
    _, tmax = _int_range(W.b56, B2)
    _, qmax = _int_range(W.bq, B2)
    return u0, u1, v0, v1, tmax, qmax


def count_S(
    P: QuadPair,
    W: WeightSpec | None = None,
    B: float = 1.0,
    workers: int = 1,
    engine: str = "radial",
    exact: bool = False,
    budget: int = DEFAULT_BUDGET,
) -> float:
    """S(B) for the pair P.

    ``engine`` is "radial" (loop over u, v) or "box" (loop over x1..x4).
    ``exact=True`` sums every summand exactly and rounds once at the end.
    """
    W = _as_weight(W)
    B = _check_B(B)
    B2 = B * B
    u0, u1, v0, v1, tmax, qmax = _radial_bounds(W, B2)
    if exact:
        return _count_S_exact(P, W, B2)
    table = r2_table(max(u1, v1, tmax, qmax, 1))
    args = (P.alpha, P.alpha_p, P.beta, P.beta_p, P.beta_pp, B2, W.params(), W.scale, table)
    if engine == "radial":
        if (u1 - u0 + 1) * (v1 - v0 + 1) > budget:
            raise BudgetExceeded(f"radial loop of {(u1 - u0 + 1) * (v1 - v0 + 1)} pairs exceeds budget {budget}")
        _set_workers(workers)
        chunks = _radial_chunks(*args, u0, u1, v0, v1, tmax, qmax)
        return math.fsum(chunks.tolist())
    if engine == "box":
        R12, R34 = math.isqrt(u1), math.isqrt(v1)
        if (2 * R12 + 1) ** 2 * (2 * R34 + 1) ** 2 > budget:
            raise BudgetExceeded("box loop exceeds budget")
        return float(_box_sum(*args, R12, R34, tmax, qmax))
    raise ValidationError(f"unknown engine {engine!r}")


def _count_S_exact(P: QuadPair, W: WeightSpec, B2: float) -> float:
    u0, u1, v0, v1, tmax, qmax = _radial_bounds(W, B2)
    table = r2_table(max(u1, v1, tmax, qmax, 1))
    total = Fraction(0)
    for u in range(u0, u1 + 1):
        if table[u] == 0 or W.b12(u / B2) == 0.0:
            continue
        for v in range(v0, v1 + 1):
            num = -(P.beta * u + P.beta_p * v)
            if table[v] == 0 or num % P.beta_pp:
                continue
            t = num // P.beta_pp
            q1 = P.alpha * u + P.alpha_p * v
            if t < 0 or t > tmax or q1 <= 0 or q1 > qmax or q1 % 2 == 0:
                continue
            mult = int(table[u]) * int(table[v]) * int(table[t])
            if mult:
                total += mult * Fraction(_summand(W, u, v, t, q1, B2, int(table[q1])))
    return float(total)


def _summand(W: WeightSpec, u: int, v: int, t: int, q1: int, B2: float, rq: int) -> float:
    return rq * W.radial(u, v, t, q1, B2)


def count_S_naive(P: QuadPair, W: WeightSpec | None, B: float) -> float:
    """Lattice-point oracle for count_S: every x in the box, summed exactly."""
    W = _as_weight(W)
    B2 = _check_B(B) ** 2
    u0, u1, v0, v1, tmax, _ = _radial_bounds(W, B2)
    R12, R34, R56 = math.isqrt(u1), math.isqrt(v1), math.isqrt(tmax)
    hist = _naive_hist(P.alpha, P.alpha_p, P.beta, P.beta_p, P.beta_pp, R12, R34, R56, u0, u1, v1)
    total = Fraction(0)
    for u, v in zip(*np.nonzero(hist)):
        u, v = int(u), int(v)
        t = -(P.beta * u + P.beta_p * v) // P.beta_pp
        q1 = P.alpha * u + P.alpha_p * v
        total += int(hist[u, v]) * Fraction(_summand(W, u, v, t, q1, B2, r2(q1)))
    return float(total)


def count_T(
    L: LinearSystem,
    W: WeightSpec | None = None,
    B: float = 1.0,
    workers: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> float:
    """T(B; L) with omega(x, y) = b12(L1) b34(L2) b56(L3) bq(L4)."""
    W = _as_weight(W)
    B = _check_B(B)
    # L1 = u, L2 = v pin down (x, y) since the resultant of L1, L2 is 1
    u0, u1 = _int_range(W.b12, B)
    v0, v1 = _int_range(W.b34, B)
    a1, a2 = L.a[0], L.a[1]
    b1, b2 = L.b[0], L.b[1]
    xs = [b2 * u - b1 * v for u in (u0, u1) for v in (v0, v1)]
    ys = [a1 * v - a2 * u for u in (u0, u1) for v in (v0, v1)]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    if (x1 - x0 + 1) * (y1 - y0 + 1) > budget:
        raise BudgetExceeded("(x, y) box exceeds budget")
    Lmax = np.array([_int_range(b, B)[1] for b in W.bumps], dtype=np.int64)
    table = r2_table(int(Lmax.max()))
    _set_workers(workers)
    chunks = _linear_chunks(
        np.array(L.a, dtype=np.int64),
        np.array(L.b, dtype=np.int64),
        B,
        W.params(),
        W.scale,
        table,
        x0,
        x1,
        y0,
        y1,
        Lmax,
    )
    return math.fsum(chunks.tolist())


@dataclass(frozen=True)
class RatioRow:
    B: float
    value: float
    ratio: float
    delta: float | None


def ratio_diagnostic(
    P: QuadPair,
    W: WeightSpec | None,
    B_list: Iterable[float],
    workers: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> list[RatioRow]:
    """S(B)/B^4 along B_list with |ratio_k - ratio_{k-1}|."""
    B_list = [float(b) for b in B_list]
    if any(b2 <= b1 for b1, b2 in zip(B_list, B_list[1:])):
        raise ValidationError("B_list must be increasing")
    rows: list[RatioRow] = []
    prev = None
    for B in B_list:
        val = count_S(P, W, B, workers=workers, budget=budget)
        ratio = val / B**4
        rows.append(RatioRow(B, val, ratio, None if prev is None else abs(ratio - prev)))
        prev = ratio
    return rows


def ratio_diagnostic_T(
    L: LinearSystem,
    W: WeightSpec | None,
    B_list: Iterable[float],
    workers: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> list[RatioRow]:
    """T(B; L)/B^2 along B_list."""
    rows: list[RatioRow] = []
    prev = None
    for B in B_list:
        val = count_T(L, W, B, workers=workers, budget=budget)
        ratio = val / float(B) ** 2
        rows.append(RatioRow(float(B), val, ratio, None if prev is None else abs(ratio - prev)))
        prev = ratio
    return rows
