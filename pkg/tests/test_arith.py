import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadpairs.arith import (
    INF,
    QuadCongruence,
    SumValue,
    check_int,
    chi4,
    eps_p,
    factor,
    gauss_brute,
    gauss_quad,
    is_prime,
    is_square,
    jacobi,
    mod_inv,
    mu,
    omega,
    phi,
    quad_sum_direct,
    quad_sum_local,
    r2,
    r2_divisor,
    r2_table,
    ramanujan,
    ramanujan_brute,
    rho_quadratic,
    tau,
    v_p,
)
from quadpairs.errors import BadModulus, BadPrime, IntegerOverflow, ModulusTooLarge, NotInvertible


def legendre_by_squares(a, p):
    a %= p
    if a == 0:
        return 0
    return 1 if a in {k * k % p for k in range(1, p)} else -1


def test_mod_inv_examples():
    assert mod_inv(4, 5) == 4
    assert mod_inv(1, 7) == 1
    assert mod_inv(3, 4) == 3


def test_mod_inv_not_invertible():
    with pytest.raises(NotInvertible):
        mod_inv(6, 9)


@given(st.integers(-10**6, 10**6), st.integers(1, 10**4))
def test_mod_inv_property(a, n):
    if math.gcd(a, n) != 1:
        with pytest.raises(NotInvertible):
            mod_inv(a, n)
    else:
        x = mod_inv(a, n)
        assert 0 <= x < n and (a * x - 1) % n == 0


def test_jacobi_examples():
    assert jacobi(2, 5) == -1
    assert jacobi(2, 15) == 1
    for n in (1, 3, 9, 15, 21):
        assert jacobi(1, n) == 1
    assert jacobi(7, 1) == 1


@pytest.mark.parametrize("n", [0, 4, -3])
def test_jacobi_bad_modulus(n):
    with pytest.raises(BadModulus):
        jacobi(2, n)


def test_jacobi_matches_legendre_and_product():
    for p in [3, 5, 7, 11, 13, 17, 19, 23]:
        for a in range(-30, 30):
            assert jacobi(a, p) == legendre_by_squares(a, p)
    for a in range(-20, 20):
        assert jacobi(a, 15) == legendre_by_squares(a, 3) * legendre_by_squares(a, 5)
        assert jacobi(a, 63) == legendre_by_squares(a, 3) ** 2 * legendre_by_squares(a, 7)


def test_chi4():
    assert (chi4(1), chi4(3), chi4(6)) == (1, -1, 0)
    assert [chi4(d) for d in range(-3, 5)] == [1, 0, -1, 0, 1, 0, -1, 0]


def test_eps_p():
    assert eps_p(5) == 1
    assert eps_p(3) == 1j
    assert eps_p(13) == 1
    for bad in (2, 9, 1):
        with pytest.raises(BadPrime):
            eps_p(bad)


def test_v_p():
    assert v_p(18, 3) == 2
    assert v_p(7, 3) == 0
    assert v_p(0, 5) == INF
    assert v_p(-250, 5) == 3
    assert min(3, v_p(0, 7) / 2) == 3


def test_ramanujan_three_cases():
    assert ramanujan(5, 0) == 4
    assert ramanujan(9, 3) == -3
    assert ramanujan(9, 1) == 0


def test_ramanujan_prime_power_cases():
    for p in (3, 5, 7):
        for r in (1, 2, 3):
            q = p**r
            for b in range(-2 * q, 2 * q):
                if b % q == 0:
                    expect = phi(q)
                elif b % p ** (r - 1) == 0:
                    expect = -p ** (r - 1)
                else:
                    expect = 0
                assert ramanujan(q, b) == expect


def test_ramanujan_against_oracle_small():
    for q in range(1, 60):
        for b in range(q):
            v = ramanujan_brute(q, b)
            assert abs(v.im) <= v.tolerance
            assert v.rounded() == ramanujan(q, b)


@given(st.integers(1, 60), st.integers(1, 60), st.integers(-500, 500))
def test_ramanujan_multiplicative(q1, q2, b):
    if math.gcd(q1, q2) == 1:
        assert ramanujan(q1 * q2, b) == ramanujan(q1, b) * ramanujan(q2, b)


def test_gauss_examples():
    assert gauss_quad(1, 0, 3, 1).close(1j * math.sqrt(3))
    assert gauss_quad(1, 0, 5, 1).close(math.sqrt(5))
    # brute oracle for the one with a linear term
    assert gauss_quad(1, 1, 5, 1).close(gauss_brute(1, 1, 5, 1))
    assert gauss_quad(1, 1, 5, 1).close(math.sqrt(5) * cmath.exp(2j * math.pi / 5))


def test_gauss_carries_term_count():
    assert gauss_quad(2, 3, 7, 2).n_terms == 49


def test_gauss_bad_prime():
    with pytest.raises(BadPrime):
        gauss_quad(3, 1, 3, 1)
    with pytest.raises(BadPrime):
        gauss_quad(1, 1, 9, 1)


def test_gauss_small_grid():
    for p in (3, 5, 7, 11, 13):
        for r in (1, 2):
            for a in range(1, min(p, 5)):
                for m in range(0, 6):
                    assert gauss_quad(a, m, p, r).close(gauss_brute(a, m, p, r))


def test_quad_sum_local_any_coefficient():
    for p in (3, 5, 7):
        for r in (1, 2, 3):
            n = p**r
            for a in range(0, n, max(1, n // 12)):
                for m in range(0, min(n, 8)):
                    assert quad_sum_direct(a, m, n).close(quad_sum_local(a, m, p, r))


def test_rho_quadratic_examples():
    assert rho_quadratic(QuadCongruence(1, 0, -1), 3, 2) == 2
    assert rho_quadratic(QuadCongruence(1, 0, 0), 3, 2) == 3
    assert rho_quadratic(QuadCongruence(1, 0, 1), 3, 1) == 0


def test_rho_quadratic_cap():
    with pytest.raises(ModulusTooLarge):
        rho_quadratic(QuadCongruence(1, 0, 1), 1009, 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(-200, 200), st.integers(-200, 200), st.integers(-200, 200), st.sampled_from([3, 5, 7, 11]), st.integers(1, 4))
def test_root_count_bound(c0, c1, c2, p, r):
    f = QuadCongruence(c0, c1, c2)
    if f.disc == 0 or p**r > 3000:
        return
    n_roots = rho_quadratic(f, p, r)
    v = v_p(f.disc, p)
    assert n_roots**2 <= 4 * p**v


def test_r2_examples():
    assert r2(1) == 4
    assert r2(3) == 0
    assert r2(25) == 12
    assert r2(0) == 1
    assert r2(-5) == 0


def test_r2_table_against_divisor_formula():
    table = r2_table(10**4)
    assert not table.flags.writeable
    assert table[0] == 1
    for n in range(1, 10**4 + 1):
        assert table[n] == r2_divisor(n)
    for n in range(200):
        assert table[n] == r2(n)


def test_multiplicative_functions():
    assert tau(12) == 6
    assert omega(12) == 2
    assert is_square(8) is False
    assert is_square(0) is True
    assert is_square(-4) is False
    assert factor(360) == [(2, 3), (3, 2), (5, 1)]
    assert [mu(n) for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
    for n in range(1, 200):
        assert phi(n) == sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)
        assert tau(n) == sum(1 for k in range(1, n + 1) if n % k == 0)
        assert is_prime(n) == (n > 1 and all(n % k for k in range(2, n)))


def test_sumvalue_tolerance():
    v = SumValue(1.0, 0.0, 100)
    assert v.tolerance == pytest.approx(1e-5)
    assert v.close(1.0 + 9e-6)
    assert not v.close(1.0 + 2e-5)
    assert SumValue(0.0, 0.0, 0).tolerance == 1e-6


def test_check_int_range():
    assert check_int(2**100) == 2**100
    with pytest.raises(IntegerOverflow):
        check_int(2**130)


def test_roots_of_unity_reduce_first():
    # a huge k must land on the same root as k mod q
    v = quad_sum_direct(10**12 + 1, 10**15 + 3, 7)
    assert v.close(quad_sum_direct(1, 3, 7))
    assert np.isfinite(v.re)
