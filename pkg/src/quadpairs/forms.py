"""The diagonal quadric pair and the polynomial invariants of a frequency vector.

A pair is

    Q1(x) = alpha (x1^2 + x2^2) + alpha' (x3^2 + x4^2)
    Q2(x) = beta (x1^2 + x2^2) + beta' (x3^2 + x4^2) + beta'' (x5^2 + x6^2)

and almost everything attached to m = (m1, ..., m6) depends on m only
through the three radii xi_1 = m1^2 + m2^2, xi_3 = m3^2 + m4^2 and
xi_5 = m5^2 + m6^2. The box counts below exploit that.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .arith import QuadCongruence, check_int, is_square
from .errors import BoxTooLarge, DegeneratePair

MVec = tuple[int, int, int, int, int, int]

# default cap on the half-width of the box scans in count_class / count_delta_level
BOX_CAP = 12


@dataclass(frozen=True)
class QuadPair:
    alpha: int
    alpha_p: int
    beta: int
    beta_p: int
    beta_pp: int

    def __post_init__(self):
        c = self.coeffs
        if any(x == 0 for x in c):
            raise DegeneratePair(f"all coefficients must be nonzero: {c}")
        if self.alpha * self.beta_p - self.alpha_p * self.beta == 0:
            raise DegeneratePair(f"alpha*beta' - alpha'*beta vanishes for {c}")

    @property
    def coeffs(self) -> tuple[int, int, int, int, int]:
        return (self.alpha, self.alpha_p, self.beta, self.beta_p, self.beta_pp)

    @property
    def det(self) -> int:
        """alpha beta' - alpha' beta."""
        return self.alpha * self.beta_p - self.alpha_p * self.beta

    @property
    def delta_v(self) -> int:
        return 2 * self.alpha * self.alpha_p * self.beta * self.beta_p * self.beta_pp * self.det

    @property
    def q1_diag(self) -> tuple[int, ...]:
        a, ap = self.alpha, self.alpha_p
        return (a, a, ap, ap, 0, 0)

    @property
    def q2_diag(self) -> tuple[int, ...]:
        b, bp, bpp = self.beta, self.beta_p, self.beta_pp
        return (b, b, bp, bp, bpp, bpp)

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.coeffs)


def new_quad_pair(coeffs: Sequence[int]) -> QuadPair:
    if len(coeffs) != 5:
        raise DegeneratePair(f"a quadric pair needs 5 coefficients, got {len(coeffs)}")
    return QuadPair(*(int(c) for c in coeffs))


def as_mvec(m: Sequence[int]) -> MVec:
    if len(m) != 6:
        raise ValueError(f"frequency vectors have 6 coordinates, got {len(m)}")
    return tuple(int(x) for x in m)  # type: ignore[return-value]


def radii(m: Sequence[int]) -> tuple[int, int, int]:
    return (m[0] ** 2 + m[1] ** 2, m[2] ** 2 + m[3] ** 2, m[4] ** 2 + m[5] ** 2)


def eval_Q1(P: QuadPair, x: Sequence[int]) -> int:
    u, v, _ = radii(x)
    return check_int(P.alpha * u + P.alpha_p * v)


def eval_Q2(P: QuadPair, x: Sequence[int]) -> int:
    u, v, w = radii(x)
    return check_int(P.beta * u + P.beta_p * v + P.beta_pp * w)


# ---------------------------------------------------------------------------
# invariants of m
# ---------------------------------------------------------------------------


class MClass(enum.Enum):
    M1 = 1
    M2 = 2
    M3 = 3
    M4 = 4

    def __str__(self) -> str:
        return self.name


def c_coeffs(P: QuadPair, xi1: int, xi3: int, xi5: int) -> tuple[int, int, int]:
    a, ap, b, bp, bpp = P.coeffs
    c0 = a * ap * xi5
    c1 = ap * bpp * xi1 + a * bpp * xi3 + (a * bp + ap * b) * xi5
    c2 = bp * bpp * xi1 + b * bpp * xi3 + b * bp * xi5
    return c0, c1, c2


def _classify(delta: int, q2s: int, H: int) -> MClass:
    if H != 0:
        if q2s != 0 and not is_square(delta):
            return MClass.M1
        return MClass.M2
    return MClass.M3 if delta * q2s != 0 else MClass.M4


@dataclass(frozen=True)
class MProfile:
    c0: int
    c1: int
    c2: int
    delta: int
    sigma: int
    H: int
    q2_star: int
    N: int
    mclass: MClass


def profile(P: QuadPair, m: Sequence[int]) -> MProfile:
    xi1, xi3, xi5 = radii(m)
    c0, c1, c2 = (check_int(c) for c in c_coeffs(P, xi1, xi3, xi5))
    delta = check_int(c1 * c1 - 4 * c0 * c2)
    a, ap, _, _, bpp = P.coeffs
    sigma = check_int(ap * bpp * xi1 + a * bpp * xi3 + P.det * xi5)
    H = check_int(xi1 * xi3 * xi5)
    if delta != 0 and H != 0:
        N = check_int(delta * H)
    elif H != 0:
        N = H
    elif delta != 0:
        N = delta
    else:
        N = 1
    return MProfile(c0, c1, c2, delta, sigma, H, c2, N, _classify(delta, c2, H))


def delta_of(P: QuadPair, m: Sequence[int]) -> int:
    c0, c1, c2 = c_coeffs(P, *radii(m))
    return c1 * c1 - 4 * c0 * c2


def classify_m(P: QuadPair, m: Sequence[int]) -> MClass:
    return profile(P, m).mclass


def q_poly(P: QuadPair, m: Sequence[int]) -> QuadCongruence:
    c0, c1, c2 = c_coeffs(P, *radii(m))
    return QuadCongruence(c0, c1, c2)


def g_of_b(P: QuadPair, b1: int, b2: int) -> tuple[int, int, int, int]:
    L = check_int(P.alpha * b1 + P.beta * b2)
    Lp = check_int(P.alpha_p * b1 + P.beta_p * b2)
    Lpp = check_int(P.beta_pp * b2)
    return L, Lp, Lpp, check_int(L * Lp * Lpp)


# ---------------------------------------------------------------------------
# box counts, max-norm |m| <= M
# ---------------------------------------------------------------------------


def _radius_histogram(M: int) -> tuple[np.ndarray, np.ndarray]:
    """Distinct values of s^2 + t^2 over |s|, |t| <= M with multiplicities."""
    s = np.arange(-M, M + 1, dtype=np.int64)
    vals = (s[:, None] ** 2 + s[None, :] ** 2).ravel()
    xi, cnt = np.unique(vals, return_counts=True)
    return xi, cnt.astype(np.int64)


def _radius_grid(P: QuadPair, M: int):
    if M < 0:
        raise ValueError("M must be >= 0")
    if M > BOX_CAP:
        raise BoxTooLarge(f"box half-width {M} exceeds the cap {BOX_CAP}")
    xi, cnt = _radius_histogram(M)
    X1, X3, X5 = np.meshgrid(xi, xi, xi, indexing="ij")
    weight = cnt[:, None, None] * cnt[None, :, None] * cnt[None, None, :]
    c0, c1, c2 = c_coeffs(P, X1, X3, X5)
    delta = c1 * c1 - 4 * c0 * c2
    H = X1 * X3 * X5
    return delta, c2, H, weight


def _is_square_array(a: np.ndarray) -> np.ndarray:
    out = a >= 0
    root = np.sqrt(np.where(out, a, 0).astype(np.float64)).round().astype(np.int64)
    # guard against float rounding on the root
    ok = np.zeros_like(out)
    for shift in (-1, 0, 1):
        r = root + shift
        ok |= (r >= 0) & (r * r == a)
    return out & ok


def class_labels(delta: np.ndarray, q2s: np.ndarray, H: np.ndarray) -> np.ndarray:
    sq = _is_square_array(delta)
    lab = np.empty(delta.shape, dtype=np.int8)
    hn = H != 0
    lab[hn & (q2s != 0) & ~sq] = 1
    lab[hn & ((q2s == 0) | sq)] = 2
    lab[~hn & (delta * q2s != 0)] = 3
    lab[~hn & (delta * q2s == 0)] = 4
    return lab


def count_class(P: QuadPair, i: MClass | int, M: int) -> int:
    """#{m in class i : |m|_max <= M}."""
    i = MClass(i).value
    delta, q2s, H, weight = _radius_grid(P, M)
    return int(weight[class_labels(delta, q2s, H) == i].sum())


def count_all_classes(P: QuadPair, M: int) -> dict[MClass, int]:
    delta, q2s, H, weight = _radius_grid(P, M)
    lab = class_labels(delta, q2s, H)
    return {c: int(weight[lab == c.value].sum()) for c in MClass}


def count_delta_level(P: QuadPair, A: int, M: int) -> int:
    """#{|m|_max <= M : delta(m) = A}."""
    delta, _, _, weight = _radius_grid(P, M)
    return int(weight[delta == A].sum())


def iter_box(M: int):
    """Every m with |m|_max <= M (for tiny oracle scans)."""
    rng = range(-M, M + 1)
    for m1 in rng:
        for m2 in rng:
            for m3 in rng:
                for m4 in rng:
                    for m5 in rng:
                        for m6 in rng:
                            yield (m1, m2, m3, m4, m5, m6)


def max_norm(m: Sequence[int]) -> int:
    return max(abs(int(x)) for x in m)


def scale_m(m: Sequence[int], t: int) -> MVec:
    return tuple(t * int(x) for x in m)  # type: ignore[return-value]


def divide_m(m: Sequence[int], h: int) -> MVec:
    return tuple(int(x) // h for x in m)  # type: ignore[return-value]


def content(m: Sequence[int]) -> int:
    return math.gcd(*(int(x) for x in m))
