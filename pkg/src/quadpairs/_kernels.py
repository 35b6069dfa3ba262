"""Numba loops for the definitional (brute-force) exponential sums."""
import numba
import numpy as np


@numba.njit(cache=True)
def residue_pair_histogram(n, d, q1, q2, m):
    """Histogram of (Q2(k) mod n, m.k mod n) over k mod n with d | Q1(k), d | Q2(k).

    ``q1``, ``q2`` are the diagonal coefficients reduced mod n and ``m`` the
    frequency vector reduced mod n (all int64 arrays of length 6).
    """
    hist = np.zeros((n, n), dtype=np.int64)
    sq = np.empty(n, dtype=np.int64)
    for k in range(n):
        sq[k] = (k * k) % n
    for k1 in range(n):
        a1 = q1[0] * sq[k1]
        b1 = q2[0] * sq[k1]
        l1 = m[0] * k1
        for k2 in range(n):
            a2 = (a1 + q1[1] * sq[k2]) % n
            b2 = (b1 + q2[1] * sq[k2]) % n
            l2 = (l1 + m[1] * k2) % n
            for k3 in range(n):
                a3 = a2 + q1[2] * sq[k3]
                b3 = b2 + q2[2] * sq[k3]
                l3 = l2 + m[2] * k3
                for k4 in range(n):
                    a4 = (a3 + q1[3] * sq[k4]) % n
                    if a4 % d != 0:
                        # Q1 has no x5, x6 terms
                        continue
                    b4 = (b3 + q2[3] * sq[k4]) % n
                    l4 = (l3 + m[3] * k4) % n
                    for k5 in range(n):
                        b5 = b4 + q2[4] * sq[k5]
                        l5 = l4 + m[4] * k5
                        for k6 in range(n):
                            b6 = (b5 + q2[5] * sq[k6]) % n
                            if b6 % d != 0:
                                continue
                            l6 = (l5 + m[5] * k6) % n
                            hist[b6, l6] += 1
    return hist


@numba.njit(cache=True)
def six_fold_histogram(n, ell, m):
    """Histogram of sum_i (ell_i k_i^2 + m_i k_i) mod n over all k mod n."""
    hist = np.zeros(n, dtype=np.int64)
    for k1 in range(n):
        s1 = ell[0] * k1 * k1 + m[0] * k1
        for k2 in range(n):
            s2 = (s1 + ell[1] * k2 * k2 + m[1] * k2) % n
            for k3 in range(n):
                s3 = s2 + ell[2] * k3 * k3 + m[2] * k3
                for k4 in range(n):
                    s4 = (s3 + ell[3] * k4 * k4 + m[3] * k4) % n
                    for k5 in range(n):
                        s5 = s4 + ell[4] * k5 * k5 + m[4] * k5
                        for k6 in range(n):
                            hist[(s5 + ell[5] * k6 * k6 + m[5] * k6) % n] += 1
    return hist


@numba.njit(cache=True)
def _inv_mod(a, n):
    t, new_t, r, new_r = 0, 1, n, a % n
    while new_r != 0:
        qt = r // new_r
        t, new_t = new_t, t - qt * new_t
        r, new_r = new_r, r - qt * new_r
    return t % n


@numba.njit(cache=True)
def dstar_orbit_sum(p, r, c1, c2, mm, chi):
    """sum over orbit representatives b of sign(b) p^{j(b)} c_{p^r}(A(b)).

    ``c1``, ``c2`` hold the (Q1, Q2) coefficients of the three coordinate
    pairs and ``mm`` the frequency vector, all reduced mod p^r.
    """
    n = p**r
    pr1 = n // p
    phin = n - pr1
    total = 0
    if r == 1:
        return _dstar_orbit_sum_prime(p, c1, c2, mm, chi)
    for idx in range(n + pr1):
        if idx < n:
            b1 = idx
            b2 = 1
        else:
            b1 = 1
            b2 = p * (idx - n)
        jsum = 0
        sign = 1
        A = 0
        alive = True
        for t in range(3):
            ell = (c1[t] * b1 + c2[t] * b2) % n
            j = 0
            pj = 1
            if ell == 0:
                j = r
                pj = n
            else:
                while ell % (pj * p) == 0:
                    pj *= p
                    j += 1
            ma = mm[2 * t]
            mb = mm[2 * t + 1]
            if ma % pj != 0 or mb % pj != 0:
                alive = False
                break
            jsum += j
            if (r - j) % 2 == 1:
                sign *= chi
            if j < r:
                ps = n // pj
                inv = _inv_mod((4 * (ell // pj)) % ps, ps)
                xa = (ma // pj) % ps
                xb = (mb // pj) % ps
                A += pj * (inv * ((xa * xa + xb * xb) % ps) % ps)
        if not alive:
            continue
        A %= n
        if A == 0:
            c = phin
        elif A % pr1 == 0:
            c = -pr1
        else:
            continue
        total += sign * p**jsum * c
    return total


@numba.njit(cache=True)
def _dstar_orbit_sum_prime(p, c1, c2, mm, chi):
    # r = 1: inverses from the table inv[i] = -(p // i) inv[p mod i]
    inv = np.zeros(p, dtype=np.int64)
    if p > 1:
        inv[1] = 1
    for i in range(2, p):
        inv[i] = (p - (p // i) * inv[p % i] % p) % p
    X = np.empty(3, dtype=np.int64)
    for t in range(3):
        X[t] = (mm[2 * t] * mm[2 * t] + mm[2 * t + 1] * mm[2 * t + 1]) % p
    total = 0
    for idx in range(p + 1):
        if idx < p:
            b1 = idx
            b2 = 1
        else:
            b1 = 1
            b2 = 0
        sign = 1
        A = 0
        jsum = 0
        alive = True
        for t in range(3):
            ell = (c1[t] * b1 + c2[t] * b2) % p
            if ell == 0:
                if mm[2 * t] % p != 0 or mm[2 * t + 1] % p != 0:
                    alive = False
                    break
                jsum += 1
            else:
                sign *= chi
                A += inv[4 * ell % p] * X[t]
        if not alive:
            continue
        c = p - 1 if A % p == 0 else -1
        total += sign * p**jsum * c
    return total
