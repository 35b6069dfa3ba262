"""Exact modular and multiplicative arithmetic.

Closed forms (Gauss sums, Ramanujan sums) live next to the brute-force
oracles that check them. Complex values are returned as ``SumValue`` so that
every comparison goes through one tolerance rule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    BadModulus,
    BadPrime,
    IntegerOverflow,
    ModulusTooLarge,
    NotInvertible,
)

INF = math.inf

# exhaustive single-coordinate scans are refused above this modulus
SCAN_CAP = 10**6

_INT128 = 1 << 127


def check_int(x: int) -> int:
    """Reject values outside the signed 128-bit range."""
    if not -_INT128 <= x < _INT128:
        raise IntegerOverflow(f"integer {x} exceeds the 128-bit range")
    return x


# ---------------------------------------------------------------------------
# complex values with a term-count tolerance
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SumValue:
    re: float
    im: float
    n_terms: int = 1

    @property
    def tolerance(self) -> float:
        return 1e-6 * math.sqrt(max(1, self.n_terms))

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    def __complex__(self) -> complex:
        return self.value

    def __abs__(self) -> float:
        return math.hypot(self.re, self.im)

    def close(self, other: "SumValue | complex | float | int") -> bool:
        """Equality under the tolerance of the larger term count."""
        other = as_sumvalue(other)
        tol = max(self.tolerance, other.tolerance)
        return abs(self.re - other.re) <= tol and abs(self.im - other.im) <= tol

    def deviation(self, other: "SumValue | complex | float | int") -> float:
        other = as_sumvalue(other)
        return max(abs(self.re - other.re), abs(self.im - other.im))

    def rounded(self) -> int:
        """Nearest integer, for sums known to be rational integers."""
        return int(round(self.re))

    def scaled(self, c: complex | float, n_terms: int | None = None) -> "SumValue":
        z = self.value * c
        return SumValue(z.real, z.imag, self.n_terms if n_terms is None else n_terms)

    @classmethod
    def of(cls, z: complex | float | int, n_terms: int = 1) -> "SumValue":
        z = complex(z)
        return cls(z.real, z.imag, n_terms)


def as_sumvalue(x) -> SumValue:
    if isinstance(x, SumValue):
        return x
    return SumValue.of(x)


@lru_cache(maxsize=64)
def _unit_circle(q: int) -> tuple[np.ndarray, np.ndarray]:
    j = np.arange(q, dtype=np.float64)
    angle = 2.0 * math.pi * j / q
    c, s = np.cos(angle), np.sin(angle)
    c.flags.writeable = False
    s.flags.writeable = False
    return c, s


def e(k: int, q: int) -> complex:
    """e_q(k) = exp(2 pi i k / q), with k reduced before the angle is formed."""
    angle = 2.0 * math.pi * (k % q) / q
    return complex(math.cos(angle), math.sin(angle))


def sum_histogram(counts, q: int, n_terms: int | None = None) -> SumValue:
    """Evaluate sum_j counts[j] * e_q(j) with exactly rounded accumulation.

    ``counts`` are integer multiplicities of each residue, so the only
    rounding happens in the final fsum over at most ``q`` products.
    """
    counts = np.asarray(counts)
    if counts.shape != (q,):
        raise ValueError("histogram length must equal the modulus")
    c, s = _unit_circle(q)
    w = counts.astype(np.float64)
    if n_terms is None:
        n_terms = int(counts.sum())
    return SumValue(math.fsum(w * c), math.fsum(w * s), n_terms)


def unit_root_table(q: int) -> np.ndarray:
    """Complex array of e_q(j) for j = 0..q-1."""
    c, s = _unit_circle(q)
    return c + 1j * s


# ---------------------------------------------------------------------------
# elementary number theory
# ---------------------------------------------------------------------------


def mod_inv(a: int, n: int) -> int:
    if n < 1:
        raise BadModulus(f"modulus must be positive, got {n}")
    if math.gcd(a, n) != 1:
        raise NotInvertible(f"{a} is not invertible modulo {n}")
    if n == 1:
        return 0
    return pow(a, -1, n)


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n >= 1."""
    if n < 1 or n % 2 == 0:
        raise BadModulus(f"Jacobi symbol needs an odd positive modulus, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def chi4(d: int) -> int:
    if d % 2 == 0:
        return 0
    return 1 if d % 4 == 1 else -1


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return [int(p) for p in np.flatnonzero(sieve)]


def eps_p(p: int) -> complex:
    if p % 2 == 0 or not is_prime(p):
        raise BadPrime(f"{p} is not an odd prime")
    return 1 + 0j if p % 4 == 1 else 1j


def chi_minus_one(p: int, r: int = 1) -> int:
    """chi_{p^r}(-1), taken as (-1/p)^r."""
    return jacobi(-1, p) ** r


def v_p(n: int, p: int) -> float | int:
    """Exact power of p dividing n; ``INF`` when n == 0."""
    if n == 0:
        return INF
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


@lru_cache(maxsize=4096)
def _factor(n: int) -> tuple[tuple[int, int], ...]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            e_ = 0
            while n % f == 0:
                n //= f
                e_ += 1
            out.append((f, e_))
        f += 1 if f == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def factor(n: int) -> list[tuple[int, int]]:
    """Prime factorization as sorted (p, e) pairs, by trial division."""
    if n < 1:
        raise ValueError(f"factor needs n >= 1, got {n}")
    return list(_factor(n))


def tau(n: int) -> int:
    return math.prod(e_ + 1 for _, e_ in factor(n))


def omega(n: int) -> int:
    return len(factor(n))


def mu(n: int) -> int:
    f = factor(n)
    if any(e_ > 1 for _, e_ in f):
        return 0
    return -1 if len(f) % 2 else 1


def phi(n: int) -> int:
    return math.prod((p - 1) * p ** (e_ - 1) for p, e_ in factor(n))


def divisors(n: int) -> list[int]:
    ds = [1]
    for p, e_ in factor(n):
        ds = [d * p**k for d in ds for k in range(e_ + 1)]
    return sorted(ds)


def is_square(n: int) -> bool:
    if n < 0:
        return False
    return math.isqrt(n) ** 2 == n


def prime_support(n: int) -> frozenset[int]:
    return frozenset(p for p, _ in factor(n))


def coprime_residues(q: int) -> np.ndarray:
    k = np.arange(q, dtype=np.int64)
    return k[np.gcd(k, q) == 1] if q > 1 else np.zeros(1, dtype=np.int64)


def gcd_vec(d: int, m) -> int:
    """gcd(d, m_1, ..., m_n); gcd with 0 is d."""
    g = d
    for x in m:
        g = math.gcd(g, int(x))
    return g


def divides_vec(h: int, m) -> bool:
    return all(int(x) % h == 0 for x in m)


# ---------------------------------------------------------------------------
# Ramanujan and Gauss sums
# ---------------------------------------------------------------------------


def ramanujan(q: int, b: int) -> int:
    """c_q(b) via sum_{d | (q, b)} d * mu(q/d)."""
    if q < 1:
        raise BadModulus(f"q must be positive, got {q}")
    g = math.gcd(q, b)
    return sum(d * mu(q // d) for d in divisors(g))


def ramanujan_brute(q: int, b: int) -> SumValue:
    if q < 1:
        raise BadModulus(f"q must be positive, got {q}")
    if q > SCAN_CAP:
        raise ModulusTooLarge(f"brute Ramanujan sum refused for q={q}")
    k = coprime_residues(q)
    counts = np.bincount((k * (b % q)) % q, minlength=q)
    return sum_histogram(counts, q)


def _check_odd_prime(p: int) -> None:
    if p % 2 == 0 or not is_prime(p):
        raise BadPrime(f"{p} is not an odd prime")


def gauss_quad(a: int, m: int, p: int, r: int) -> SumValue:
    """Closed form of sum_{k mod p^r} e_{p^r}(a k^2 + m k) for p odd, p not dividing a."""
    _check_odd_prime(p)
    if a % p == 0:
        raise BadPrime(f"p={p} divides the quadratic coefficient {a}")
    if r < 1:
        raise BadModulus("r must be >= 1")
    n = p**r
    z = math.sqrt(n) * e(-mod_inv(4 * a, n) * m * m, n)
    if r % 2:
        z *= jacobi(a, p) * eps_p(p)
    return SumValue.of(z, n)


def gauss_brute(a: int, m: int, p: int, r: int) -> SumValue:
    return quad_sum_direct(a, m, p**r)


def quad_sum_direct(a: int, m: int, n: int) -> SumValue:
    """sum_{k mod n} e_n(a k^2 + m k) by enumeration."""
    if n > SCAN_CAP:
        raise ModulusTooLarge(f"direct scan refused for modulus {n}")
    k = np.arange(n, dtype=np.int64)
    res = ((k * k % n) * (a % n) + k * (m % n)) % n
    return sum_histogram(np.bincount(res, minlength=n), n)


def quad_sum_local(a: int, m: int, p: int, r: int) -> complex:
    """sum_{k mod p^r} e_{p^r}(a k^2 + m k) for odd p and any a.

    Pulls out p^j || a: the sum vanishes unless p^j | m, and otherwise is
    p^j times a unit-coefficient Gauss sum modulo p^(r-j).
    """
    n = p**r
    a %= n
    j = r if a == 0 else min(v_p(a, p), r)
    pj = p**j
    if m % pj:
        return 0j
    if j == r:
        return complex(n)
    a1, m1, s = a // pj, m // pj, r - j
    ns = p**s
    z = math.sqrt(ns) * e(-mod_inv(4 * a1, ns) * m1 * m1, ns)
    if s % 2:
        z *= jacobi(a1, p) * eps_p(p)
    return pj * z


# ---------------------------------------------------------------------------
# quadratic congruences and sums of two squares
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadCongruence:
    c0: int
    c1: int
    c2: int

    @property
    def disc(self) -> int:
        return self.c1 * self.c1 - 4 * self.c0 * self.c2

    def __call__(self, x: int) -> int:
        return (self.c0 * x + self.c1) * x + self.c2


def rho_quadratic(f: QuadCongruence, p: int, r: int) -> int:
    """#{x mod p^r : f(x) = 0 mod p^r} by exhaustive scan."""
    if r < 0:
        raise BadModulus("r must be >= 0")
    n = p**r
    if n > SCAN_CAP:
        raise ModulusTooLarge(f"root count scan refused for modulus {n}")
    if n == 1:
        return 1
    x = np.arange(n, dtype=np.int64)
    val = ((f.c0 % n) * (x * x % n) + (f.c1 % n) * x + f.c2 % n) % n
    return int(np.count_nonzero(val == 0))


def r2(n: int) -> int:
    """Number of (s, t) in Z^2 with s^2 + t^2 = n."""
    if n < 0:
        return 0
    if n == 0:
        return 1
    count = 0
    for s in range(math.isqrt(n) + 1):
        t2 = n - s * s
        t = math.isqrt(t2)
        if t * t == t2:
            count += (1 if s == 0 else 2) * (1 if t == 0 else 2)
    return count


def r2_divisor(n: int) -> int:
    """4 * sum_{d | n} chi4(d), n >= 1."""
    return 4 * sum(chi4(d) for d in divisors(n))


def r2_table(N: int) -> np.ndarray:
    """Read-only int64 array of r2(n) for 0 <= n <= N."""
    if N < 0:
        raise ValueError("N must be >= 0")
    table = np.zeros(N + 1, dtype=np.int64)
    for s in range(math.isqrt(N) + 1):
        tmax = math.isqrt(N - s * s)
        t = np.arange(tmax + 1, dtype=np.int64)
        w = np.where(t == 0, 1, 2) * (1 if s == 0 else 2)
        table += np.bincount(s * s + t * t, weights=w, minlength=N + 1).astype(np.int64)
    table.flags.writeable = False
    return table
