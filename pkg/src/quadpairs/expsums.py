"""Complete exponential sums attached to a diagonal quadric pair.

The central object is

    S_{d,q}(m) = sum*_{a mod q} sum_{k mod dq, d | Q1(k), d | Q2(k)} e_{dq}(a Q2(k) + m.k)

with the specialisations D_d = S_{d,1}, Q_q = S_{1,q}, M_{d,q} = S_{d,q}.

Evaluators
----------
brute
    the definition, via a residue histogram over all k mod dq.
semi
    detects d | Q1, d | Q2 with additive characters,

        S = d^-2 sum*_a sum_{b1, b2 mod d} prod_i G_dq(q b1 c1_i + (a + q b2) c2_i, m_i)

    where c1_i, c2_i are the diagonal coefficients of Q1, Q2 and
    G_n(l, m) = sum_{k mod n} e_n(l k^2 + m k) is computed by enumeration.
local
    splits dq over primes; odd prime powers use closed-form Gauss sums, and
    when q has no part at p the unit-scaling orbits of (b1, b2) collapse to
    Ramanujan sums, which makes D_{p^r}(m) an exact integer.
mult
    splits dq over primes and runs ``semi`` on each part.
"""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import _kernels
from .arith import (
    SumValue,
    chi4,
    chi_minus_one,
    coprime_residues,
    divides_vec,
    divisors,
    factor,
    gcd_vec,
    is_prime,
    jacobi,
    mu,
    phi,
    prime_support,
    quad_sum_local,
    ramanujan,
    sum_histogram,
    unit_root_table,
    v_p,
)
from .errors import (
    BadPrime,
    BudgetExceeded,
    MethodUnavailable,
    NotCoprimeToDiscriminant,
    PreconditionViolated,
    SupportMismatch,
)
from .forms import QuadPair, as_mvec, content, divide_m, profile, q_poly

DEFAULT_BUDGET = 10**8
METHODS = ("brute", "semi", "local", "mult")

# coordinate pairs (0,1), (2,3), (4,5) share their coefficients
_PAIRS = ((0, 1), (2, 3), (4, 5))


def n_terms(d: int, q: int) -> int:
    """Number of roots of unity in the defining sum of S_{d,q}."""
    return (d * q) ** 6 * phi(q)


def _check_moduli(d: int, q: int) -> None:
    if d < 1 or q < 1:
        raise ValueError(f"moduli must be positive, got d={d}, q={q}")


def _pair_coeffs(P: QuadPair) -> tuple[tuple[int, int], ...]:
    """(Q1 coefficient, Q2 coefficient) for each coordinate pair."""
    return ((P.alpha, P.beta), (P.alpha_p, P.beta_p), (0, P.beta_pp))


# ---------------------------------------------------------------------------
# one-dimensional quadratic sums, tabulated over the quadratic coefficient
# ---------------------------------------------------------------------------


@lru_cache(maxsize=256)
def _direct_table(n: int, mi: int) -> np.ndarray:
    """T[l] = G_n(l, mi) for l = 0..n-1, by enumeration."""
    k = np.arange(n, dtype=np.int64)
    ell = np.arange(n, dtype=np.int64)
    res = (ell[:, None] * (k * k % n)[None, :] + (mi * k)[None, :]) % n
    counts = np.bincount((ell[:, None] * n + res).ravel(), minlength=n * n).reshape(n, n)
    out = counts @ unit_root_table(n)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=256)
def _closed_table(p: int, r: int, mi: int) -> np.ndarray:
    """T[l] = G_{p^r}(l, mi) from the closed-form Gauss sum, p odd."""
    n = p**r
    out = np.array([quad_sum_local(ell, mi, p, r) for ell in range(n)], dtype=np.complex128)
    out.flags.writeable = False
    return out


def _table_for(n: int, mi: int, closed: bool) -> np.ndarray:
    mi %= n
    if closed:
        (p, r), = factor(n)
        return _closed_table(p, r, mi)
    return _direct_table(n, mi)


def _expand(P: QuadPair, d: int, q: int, m: Sequence[int], closed: bool = False) -> complex:
    """The character expansion of S_{d,q}(m) over (a, b1, b2)."""
    n = d * q
    if n == 1:
        return 1 + 0j
    units = coprime_residues(q)
    q1, q2 = P.q1_diag, P.q2_diag
    tables = [_table_for(n, m[i], closed) for i in range(6)]
    b1, b2 = np.meshgrid(np.arange(d, dtype=np.int64), np.arange(d, dtype=np.int64), indexing="ij")
    b1, b2 = b1.ravel(), b2.ravel()
    total = 0j
    # chunk over a so the grid stays at a few million entries
    step = max(1, 4_000_000 // max(1, d * d))
    for lo in range(0, len(units), step):
        a = units[lo : lo + step][:, None]
        c1 = (q * b1)[None, :]
        c2 = a + (q * b2)[None, :]
        prod = np.ones(c2.shape, dtype=np.complex128)
        for i in range(6):
            ell = (c1 * (q1[i] % n) + c2 * (q2[i] % n)) % n
            prod *= tables[i][ell]
        total += prod.sum()
    return total / (d * d)


# ---------------------------------------------------------------------------
# exact integer evaluation of D*_{p^r}(m) for odd p
# ---------------------------------------------------------------------------


def _powmod(x: np.ndarray, e: int, n: int) -> np.ndarray:
    result = np.ones_like(x)
    base = x % n
    while e:
        if e & 1:
            result = result * base % n
        base = base * base % n
        e >>= 1
    return result


def _vp_capped(arr: np.ndarray, p: int, r: int) -> np.ndarray:
    j = np.zeros(arr.shape, dtype=np.int64)
    pk = 1
    for k in range(1, r + 1):
        pk *= p
        j[arr % pk == 0] = k
    return j


def _orbit_reps(p: int, r: int) -> tuple[np.ndarray, np.ndarray]:
    """Representatives of primitive (b1, b2) mod p^r up to unit scaling."""
    n = p**r
    c = np.arange(p ** (r - 1), dtype=np.int64)
    b1 = np.concatenate([np.arange(n, dtype=np.int64), np.ones(len(c), dtype=np.int64)])
    b2 = np.concatenate([np.ones(n, dtype=np.int64), p * c])
    return b1, b2


@lru_cache(maxsize=65536)
def dstar_prime_power(P: QuadPair, p: int, r: int, m: tuple[int, ...]) -> int:
    """D*_{p^r}(m) as an exact integer, p odd.

    For a primitive b the sum over its unit multiples lambda*b is a product of
    Gauss sums whose quadratic characters pair off, leaving
    p^(3r + sum j) * (+-1) * c_{p^r}(A(b)); see the module docstring.
    """
    if r == 0:
        return 1
    n = p**r
    if P.delta_v % p and n < 10**6:
        # one linear form at most vanishes mod p, so every term is below n^2
        c1 = np.array([c % n for c, _ in _pair_coeffs(P)], dtype=np.int64)
        c2 = np.array([c % n for _, c in _pair_coeffs(P)], dtype=np.int64)
        mm = np.array([int(x) % n for x in m], dtype=np.int64)
        return n * int(_kernels.dstar_orbit_sum(p, r, c1, c2, mm, chi_minus_one(p)))
    b1, b2 = _orbit_reps(p, r)
    chi = chi_minus_one(p)
    jsum = np.zeros(b1.shape, dtype=np.int64)
    sign = np.ones(b1.shape, dtype=np.int64)
    alive = np.ones(b1.shape, dtype=bool)
    A = np.zeros(b1.shape, dtype=np.int64)
    mm = [int(x) % n for x in m]
    for (ia, ib), (c1, c2) in zip(_PAIRS, _pair_coeffs(P)):
        ell = ((c1 % n) * b1 + (c2 % n) * b2) % n
        j = _vp_capped(ell, p, r)
        pj = p**j
        alive &= (mm[ia] % pj == 0) & (mm[ib] % pj == 0)
        s = r - j
        jsum += j
        sign *= np.where(s % 2 == 1, chi, 1)
        ps = p**s
        unit = np.where(j < r, ell // pj, 1)
        inv = _powmod(4 * unit, phi(n) - 1, n) % ps
        xp = ((mm[ia] // pj) ** 2 + (mm[ib] // pj) ** 2) % ps
        A += np.where(j < r, pj * (inv * xp % ps), 0)
    A %= n
    pr1 = n // p
    cval = np.where(A == 0, phi(n), np.where(A % pr1 == 0, -pr1, 0))
    terms = np.where(alive, sign * p**jsum * cval, 0)
    return n * sum(terms.tolist())


def d_prime_power(P: QuadPair, p: int, r: int, m: Sequence[int]) -> int:
    """D_{p^r}(m) for odd p via sum_{h | (p^r, m)} h^4 D*_{p^r/h}(m/h)."""
    m = tuple(int(x) for x in m)
    c = content(m)
    top = r if c == 0 else min(r, v_p(c, p))
    total = 0
    for s in range(top + 1):
        h = p**s
        total += h**4 * dstar_prime_power(P, p, r - s, tuple(x // h for x in m))
    return total


# ---------------------------------------------------------------------------
# S_{d,q}
# ---------------------------------------------------------------------------


def _cost(method: str, d: int, q: int) -> int:
    if method == "brute":
        return n_terms(d, q)
    if method == "semi":
        return q * d * d * d * q
    parts = _prime_parts(d, q)
    if method == "mult":
        return sum(qp * dp * dp * dp * qp for _, _, dp, qp in parts)
    cost = 0
    for p, _, dp, qp in parts:
        cost += dp * qp if (p % 2 and qp == 1) else phi(qp) * dp * dp * 6 + (dp * qp) ** 2
    return cost


def _prime_parts(d: int, q: int) -> list[tuple[int, int, int, int]]:
    """(p, e, p-part of d, p-part of q) for each prime p | dq."""
    out = []
    for p, e in factor(d * q):
        dp = p ** v_p(d, p)
        out.append((p, e, dp, (p**e) // dp))
    return out


def _brute(P: QuadPair, d: int, q: int, m: Sequence[int]) -> SumValue:
    n = d * q
    q1 = np.array([c % n for c in P.q1_diag], dtype=np.int64)
    q2 = np.array([c % n for c in P.q2_diag], dtype=np.int64)
    mv = np.array([x % n for x in m], dtype=np.int64)
    hist = _kernels.residue_pair_histogram(n, d, q1, q2, mv)
    x = np.arange(n, dtype=np.int64)
    total = np.zeros(n, dtype=np.int64)
    for a in coprime_residues(q):
        idx = ((int(a) * x[:, None] + x[None, :]) % n).ravel()
        total += np.bincount(idx, weights=hist.ravel(), minlength=n).round().astype(np.int64)
    return sum_histogram(total, n, n_terms(d, q))


def _local(P: QuadPair, d: int, q: int, m: Sequence[int]) -> complex:
    val: complex = 1
    for p, e, dp, qp in _prime_parts(d, q):
        if p % 2 and qp == 1:
            val *= d_prime_power(P, p, e, m)
        else:
            val *= _expand(P, dp, qp, m, closed=p % 2 == 1)
    return complex(val)


def S_dq(
    P: QuadPair,
    d: int,
    q: int,
    m: Sequence[int],
    method: str = "local",
    budget: int = DEFAULT_BUDGET,
) -> SumValue:
    _check_moduli(d, q)
    m = as_mvec(m)
    if method not in METHODS:
        raise MethodUnavailable(f"unknown method {method!r}; choose from {METHODS}")
    if method == "mult" and len(factor(d * q)) == 1:
        raise MethodUnavailable(f"mult needs at least two primes in dq={d * q}")
    cost = _cost(method, d, q)
    if cost > budget:
        raise BudgetExceeded(f"{method} evaluation of S_{{{d},{q}}} needs ~{cost} terms > budget {budget}")
    if d * q == 1:
        return SumValue(1.0, 0.0, 1)
    if method == "brute":
        return _brute(P, d, q, m)
    if method == "semi":
        z = _expand(P, d, q, m)
    elif method == "local":
        z = _local(P, d, q, m)
    else:
        z = complex(np.prod([_expand(P, dp, qp, m) for _, _, dp, qp in _prime_parts(d, q)]))
    return SumValue.of(z, n_terms(d, q))


def D_d(P: QuadPair, d: int, m: Sequence[int], method: str = "local", budget: int = DEFAULT_BUDGET) -> SumValue:
    return S_dq(P, d, 1, m, method, budget)


def Q_q(P: QuadPair, q: int, m: Sequence[int], method: str = "semi", budget: int = DEFAULT_BUDGET) -> SumValue:
    return S_dq(P, 1, q, m, method, budget)


def M_dq(
    P: QuadPair, d: int, q: int, m: Sequence[int], method: str = "semi", budget: int = DEFAULT_BUDGET
) -> SumValue:
    _check_moduli(d, q)
    if prime_support(d) != prime_support(q):
        raise SupportMismatch(f"d={d} and q={q} are not built from the same primes")
    return S_dq(P, d, q, m, method, budget)


def rho(P: QuadPair, d: int, method: str = "local") -> int:
    """rho(d) = D_d(0), the number of common zeros of Q1, Q2 mod d."""
    return D_d(P, d, (0,) * 6, method).rounded()


def rho_count(P: QuadPair, d: int) -> int:
    """rho(d) counted through the radii x1^2 + x2^2, x3^2 + x4^2, x5^2 + x6^2 mod d."""
    x = np.arange(d, dtype=np.int64)
    u = (x[:, None] ** 2 + x[None, :] ** 2).ravel() % d
    N = np.bincount(u, minlength=d)
    U, V, W = np.meshgrid(x, x, x, indexing="ij")
    ok = ((P.alpha * U + P.alpha_p * V) % d == 0) & ((P.beta * U + P.beta_p * V + P.beta_pp * W) % d == 0)
    weight = N[:, None, None] * N[None, :, None] * N[None, None, :]
    return int(weight[ok].sum())


# ---------------------------------------------------------------------------
# D_d(m; b), D*_d and the p-adic splitting
# ---------------------------------------------------------------------------


def _ells(P: QuadPair, c1, c2, n: int) -> list:
    return [(c1 * (P.q1_diag[i] % n) + c2 * (P.q2_diag[i] % n)) % n for i in range(6)]


def D_d_b(P: QuadPair, d: int, m: Sequence[int], b1: int, b2: int, budget: int = DEFAULT_BUDGET) -> SumValue:
    """prod_i sum_{k mod d} e_d(l_i k^2 + m_i k) with l_i = b1 c1_i + b2 c2_i."""
    if 6 * d * d > budget:
        raise BudgetExceeded(f"D_d(m; b) with d={d} exceeds the budget")
    m = as_mvec(m)
    z = 1 + 0j
    for ell, mi in zip(_ells(P, b1, b2, d), m):
        z *= _direct_table(d, mi % d)[ell]
    return SumValue.of(z, d**6)


def D_d_b_brute(P: QuadPair, d: int, m: Sequence[int], b1: int, b2: int, budget: int = DEFAULT_BUDGET) -> SumValue:
    """The 6-fold definition of D_d(m; b)."""
    if d**6 > budget:
        raise BudgetExceeded(f"6-fold sum with d={d} exceeds the budget")
    ell = np.array(_ells(P, b1, b2, d), dtype=np.int64)
    mv = np.array([x % d for x in m], dtype=np.int64)
    return sum_histogram(_kernels.six_fold_histogram(d, ell, mv), d)


def _b_grid_values(P: QuadPair, n: int, m: Sequence[int], c1: np.ndarray, c2: np.ndarray) -> np.ndarray:
    """D_n(m; c1, c2) for arrays of coefficient pairs."""
    prod = np.ones(c1.shape, dtype=np.complex128)
    for ell, mi in zip(_ells(P, c1, c2, n), m):
        prod *= _direct_table(n, mi % n)[ell]
    return prod


def _primitive_grid(d: int) -> tuple[np.ndarray, np.ndarray]:
    b1, b2 = np.meshgrid(np.arange(d, dtype=np.int64), np.arange(d, dtype=np.int64), indexing="ij")
    b1, b2 = b1.ravel(), b2.ravel()
    keep = np.gcd(np.gcd(b1, b2), d) == 1
    return b1[keep], b2[keep]


def D_star(P: QuadPair, d: int, m: Sequence[int], budget: int = DEFAULT_BUDGET) -> SumValue:
    """d^-2 sum over primitive (b1, b2) mod d of D_d(m; b)."""
    if d == 1:
        return SumValue(1.0, 0.0, 1)
    if 6 * d**3 > budget:
        raise BudgetExceeded(f"D*_d with d={d} exceeds the budget")
    m = as_mvec(m)
    b1, b2 = _primitive_grid(d)
    z = _b_grid_values(P, d, m, b1, b2).sum() / (d * d)
    return SumValue.of(z, d**8)


def seek_rhs(P: QuadPair, d: int, m: Sequence[int], budget: int = DEFAULT_BUDGET) -> SumValue:
    """sum_{h | (d, m)} h^4 D*_{d/h}(m/h)."""
    m = as_mvec(m)
    z = 0j
    for h in divisors(gcd_vec(d, m)):
        z += h**4 * D_star(P, d // h, divide_m(m, h), budget).value
    return SumValue.of(z, d**8)


def _require_good_prime(P: QuadPair, p: int) -> None:
    if p % 2 == 0 or not is_prime(p):
        raise BadPrime(f"{p} is not an odd prime")
    if P.delta_v % p == 0:
        raise BadPrime(f"p={p} divides Delta_V={P.delta_v}")


def D_j_split(P: QuadPair, p: int, r: int, m: Sequence[int], j: int, budget: int = DEFAULT_BUDGET) -> SumValue:
    """Part of D*_{p^r}(m) from primitive b with p^j || g(b) (j < r) or p^r | g(b) (j = r)."""
    _require_good_prime(P, p)
    if not 0 <= j <= r:
        raise ValueError(f"need 0 <= j <= r, got j={j}, r={r}")
    n = p**r
    if 6 * n**3 > budget:
        raise BudgetExceeded(f"splitting at p^r={n} exceeds the budget")
    m = as_mvec(m)
    b1, b2 = _primitive_grid(n)
    L = (P.alpha * b1 + P.beta * b2) % n
    Lp = (P.alpha_p * b1 + P.beta_p * b2) % n
    Lpp = (P.beta_pp * b2) % n
    g = L * Lp % n * Lpp % n
    keep = _vp_capped(g, p, r) == j
    z = _b_grid_values(P, n, m, b1[keep], b2[keep]).sum() / (n * n)
    return SumValue.of(z, n**8)


def D0_closed(P: QuadPair, p: int, r: int, m: Sequence[int]) -> SumValue:
    """p^r chi_{p^r}(-1) sum_{b mod p^r, p not | g(b,1)} c_{p^r}(q_m(b))."""
    _require_good_prime(P, p)
    n = p**r
    qm = q_poly(P, m)
    total = 0
    for b in range(n):
        L, Lp, Lpp = P.alpha * b + P.beta, P.alpha_p * b + P.beta_p, P.beta_pp
        if (L * Lp * Lpp) % p == 0:
            continue
        total += ramanujan(n, qm(b))
    return SumValue.of(n * chi_minus_one(p, r) * total, n**8)


def mawkish_main_defect(P: QuadPair, p: int, m: Sequence[int]) -> float:
    """|D*_p(m) - p^2 chi_p(-delta(m))| / p."""
    _require_good_prime(P, p)
    prof = profile(P, m)
    if prof.H % p == 0:
        raise PreconditionViolated(f"p={p} divides H(m)={prof.H}")
    main = p * p * jacobi(-prof.delta, p)
    return abs(D_star(P, p, m).value - main) / p


# ---------------------------------------------------------------------------
# the mixed sum M_{d,q} rebuilt from its inner sums
# ---------------------------------------------------------------------------


def _same_support(d: int, q: int) -> bool:
    return prime_support(d) == prime_support(q)


def onion_inner(P: QuadPair, d1: int, r1: int, u: int, m2: Sequence[int], budget: int = DEFAULT_BUDGET) -> SumValue:
    """sum over b1 mod d1, b2 mod d1*r1 with (b1, u b2, d1) = (b2, r1) = 1 of D_{d1 r1}(m2; r1 b1, b2)."""
    n = d1 * r1
    if 6 * d1 * n * n > budget:
        raise BudgetExceeded(f"inner sum with d'={d1}, r'={r1} exceeds the budget")
    m2 = as_mvec(m2)
    b1, b2 = np.meshgrid(np.arange(d1, dtype=np.int64), np.arange(n, dtype=np.int64), indexing="ij")
    b1, b2 = b1.ravel(), b2.ravel()
    keep = (np.gcd(np.gcd(b1, u * b2), d1) == 1) & (np.gcd(b2, r1) == 1)
    z = _b_grid_values(P, n, m2, r1 * b1[keep], b2[keep]).sum()
    return SumValue.of(z, n**6 * d1 * n)


def onion_eval(P: QuadPair, d: int, q: int, m: Sequence[int], budget: int = DEFAULT_BUDGET) -> SumValue:
    """M_{d,q}(m) reassembled from Ramanujan-sum and gcd extractions over h | d, r | q, u | r."""
    _check_moduli(d, q)
    if not _same_support(d, q):
        raise SupportMismatch(f"d={d} and q={q} are not built from the same primes")
    if math.gcd(d, P.delta_v) != 1:
        raise NotCoprimeToDiscriminant(f"(d, Delta_V) = {math.gcd(d, P.delta_v)} > 1")
    m = as_mvec(m)
    z = 0j
    for h in divisors(d):
        for r in divisors(q):
            mob = mu(q // r)
            if mob == 0:
                continue
            for u in divisors(r):
                g = u * h * q // r
                if not divides_vec(g, m):
                    continue
                inner = onion_inner(P, d // h, r // u, u, divide_m(m, g), budget)
                z += h**6 * mob * u**6 / r**6 * inner.value
    return SumValue.of(z * q**6 / (d * d), n_terms(d, q))


def b2_sum_identity(P: QuadPair, r: int, m: Sequence[int], budget: int = DEFAULT_BUDGET) -> tuple[SumValue, SumValue]:
    """(sum_{b2 mod r} D_r(m; 0, b2), sum_{h | (r, m)} h^6 Q_{r/h}(m/h))."""
    m = as_mvec(m)
    b2 = np.arange(r, dtype=np.int64)
    lhs = _b_grid_values(P, r, m, np.zeros_like(b2), b2).sum()
    rhs = 0j
    for h in divisors(gcd_vec(r, m)):
        rhs += h**6 * Q_q(P, r // h, divide_m(m, h), "semi", budget).value
    nt = r**7
    return SumValue.of(lhs, nt), SumValue.of(rhs, nt)


# ---------------------------------------------------------------------------
# twisted partial sums of D_d
# ---------------------------------------------------------------------------


def d_local_exact(P: QuadPair, d: int, m: Sequence[int]) -> int:
    """D_d(m) as an exact integer for odd d, multiplied out over prime powers."""
    if d % 2 == 0:
        raise ValueError("exact local evaluation needs odd d")
    val = 1
    for p, e in factor(d):
        val *= d_prime_power(P, p, e, m)
        if val == 0:
            break
    return val


def sigma_terms(P: QuadPair, m: Sequence[int], hi: int, excl: int) -> np.ndarray:
    """Array t with t[d] = chi4(d) D_d(m) for d <= hi and (d, excl) = 1, else 0 (object dtype)."""
    m = as_mvec(m)
    out = np.zeros(hi + 1, dtype=object)
    for d in range(1, hi + 1, 2):
        if math.gcd(d, excl) != 1:
            continue
        out[d] = chi4(d) * d_local_exact(P, d, m)
    return out


def sigma_partial(
    P: QuadPair,
    m: Sequence[int],
    lo: int,
    hi: int,
    excl: int,
    method: str = "local",
    budget: int = DEFAULT_BUDGET,
) -> SumValue:
    """sum_{lo < d <= hi, (d, excl) = 1} chi4(d) D_d(m)."""
    m = as_mvec(m)
    if method == "local":
        total = sum(int(t) for t in sigma_terms(P, m, hi, excl)[lo + 1 :])
        return SumValue.of(total, sum(d**6 for d in range(lo + 1, hi + 1)))
    z = 0j
    nt = 0
    for d in range(max(lo + 1, 1), hi + 1):
        if chi4(d) == 0 or math.gcd(d, excl) != 1:
            continue
        z += chi4(d) * D_d(P, d, m, method, budget).value
        nt += d**6
    return SumValue.of(z, max(1, nt))
