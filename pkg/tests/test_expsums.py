import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadpairs.arith import jacobi, rho_quadratic
from quadpairs.errors import (
    BadPrime,
    BudgetExceeded,
    MethodUnavailable,
    NotCoprimeToDiscriminant,
    PreconditionViolated,
    SupportMismatch,
)
from quadpairs.expsums import (
    D0_closed,
    D_d,
    D_d_b,
    D_d_b_brute,
    D_j_split,
    D_star,
    M_dq,
    Q_q,
    S_dq,
    b2_sum_identity,
    d_local_exact,
    mawkish_main_defect,
    onion_eval,
    rho,
    rho_count,
    seek_rhs,
    sigma_partial,
)
from quadpairs.forms import new_quad_pair, profile, q_poly

P0 = new_quad_pair((1, 1, 1, -1, 1))
P1 = new_quad_pair((2, -3, 1, 4, -5))
M1 = (1, 0, 1, 0, 1, 0)


def definitional_S(P, d, q, m):
    """Straight from the definition: a over units mod q, k mod dq on the variety mod d."""
    n = d * q
    qa = (P.alpha, P.alpha, P.alpha_p, P.alpha_p, 0, 0)
    qb = P.q2_diag
    total = 0j
    for k in itertools.product(range(n), repeat=6):
        Q1 = sum(c * x * x for c, x in zip(qa, k))
        Q2 = sum(c * x * x for c, x in zip(qb, k))
        if Q1 % d or Q2 % d:
            continue
        lin = sum(a * b for a, b in zip(m, k))
        for a in range(q):
            if math.gcd(a, q) == 1:
                total += cmath.exp(2j * math.pi * ((a * Q2 + lin) % n) / n)
    return total


def definitional_D_b(P, d, m, b1, b2):
    qa = (P.alpha, P.alpha, P.alpha_p, P.alpha_p, 0, 0)
    qb = P.q2_diag
    out = 1
    for i in range(6):
        ell = b1 * qa[i] + b2 * qb[i]
        out *= sum(cmath.exp(2j * math.pi * ((ell * k * k + m[i] * k) % d) / d) for k in range(d))
    return out


def test_trivial_moduli():
    for m in [(0,) * 6, M1, (3, -2, 7, 1, 0, 5)]:
        assert S_dq(P0, 1, 1, m).close(1)
        assert D_d(P0, 1, m).close(1)
        assert D_star(P0, 1, m).close(1)
        assert D_d_b(P0, 1, m, 0, 0).close(1)


def test_rho3_matches_count():
    v = S_dq(P0, 3, 1, (0,) * 6, method="brute")
    assert abs(v.im) <= v.tolerance
    assert v.rounded() == rho_count(P0, 3)
    assert rho(P0, 3) == rho_count(P0, 3)


@pytest.mark.parametrize("d,q", [(3, 1), (1, 3), (1, 5), (5, 1)])
@pytest.mark.parametrize("m", [(0,) * 6, M1, (2, -1, 0, 4, 1, 3)])
def test_brute_matches_definition(d, q, m):
    want = definitional_S(P0, d, q, m)
    assert S_dq(P0, d, q, m, method="brute").close(want)


@pytest.mark.parametrize("method", ["semi", "local"])
@pytest.mark.parametrize("d,q", [(3, 1), (1, 3), (3, 3), (9, 1), (5, 1), (1, 9), (4, 1), (2, 2), (1, 7)])
def test_structured_methods_match_brute(method, d, q):
    for P in (P0, P1):
        for m in [(0,) * 6, M1, (2, -1, 0, 4, 1, 3)]:
            want = S_dq(P, d, q, m, method="brute")
            assert S_dq(P, d, q, m, method=method).close(want.value)


def test_mult_matches_local():
    for d, q in [(15, 1), (3, 5), (5, 3), (21, 1), (1, 15)]:
        for m in [(0,) * 6, M1]:
            assert S_dq(P0, d, q, m, "mult").close(S_dq(P0, d, q, m, "semi").value)


def test_method_errors():
    with pytest.raises(MethodUnavailable):
        S_dq(P0, 9, 1, M1, method="mult")
    with pytest.raises(MethodUnavailable):
        S_dq(P0, 3, 1, M1, method="fast")
    with pytest.raises(BudgetExceeded):
        S_dq(P0, 99, 1, M1, method="brute")
    with pytest.raises(ValueError):
        S_dq(P0, 0, 1, M1)


def test_rho_is_real_integer():
    for d in (3, 5, 7, 9, 15, 25, 27, 49):
        v = D_d(P0, d, (0,) * 6)
        assert abs(v.im) <= v.tolerance
        assert abs(v.re - round(v.re)) <= v.tolerance
        assert rho(P0, d) == d_local_exact(P0, d, (0,) * 6)
    for d in (3, 5, 7, 9):
        assert rho(P0, d) == rho_count(P0, d)


def test_mixed_sum():
    for m in (M1, (3, 0, 3, 0, 3, 0)):
        want = S_dq(P0, 3, 9, m, method="brute", budget=3 * 10**9)
        assert M_dq(P0, 3, 9, m).close(want.value)
    with pytest.raises(SupportMismatch):
        M_dq(P0, 3, 5, M1)
    assert Q_q(P0, 5, M1).close(S_dq(P0, 1, 5, M1, "brute").value)


def test_D_d_b_factorisation():
    assert D_d_b(P0, 3, (0,) * 6, 0, 0).close(3**6)
    for d, b1, b2 in [(5, 1, 1), (3, 2, 1), (4, 1, 3), (7, 0, 5)]:
        want = definitional_D_b(P0, d, M1, b1, b2)
        assert D_d_b(P0, d, M1, b1, b2).close(want)
        assert D_d_b_brute(P0, d, M1, b1, b2).close(want)


def test_seek_identity_examples():
    m = (3, 0, 3, 0, 3, 0)
    assert D_d(P0, 9, m).close(seek_rhs(P0, 9, m).value)
    for d in (3, 5, 7):
        assert D_d(P0, d, M1).close(D_star(P0, d, M1).value)


def test_j_split_partition():
    parts = [D_j_split(P0, 3, 1, M1, j).value for j in range(2)]
    assert D_star(P0, 3, M1).close(sum(parts))
    # 3 does not divide H(m) = 1
    assert D_j_split(P0, 3, 1, M1, 1).close(0)
    assert D_j_split(P0, 3, 1, M1, 0).close(D0_closed(P0, 3, 1, M1).value)
    assert D_j_split(P0, 5, 2, M1, 0).close(D0_closed(P0, 5, 2, M1).value)


def test_d0_at_zero_vector():
    for p, r in [(3, 1), (5, 1), (3, 2)]:
        n = p**r
        good = sum(1 for b in range(n) if ((b + 1) * (b - 1) * 1) % p)
        chi = jacobi(-1, p) ** r
        want = n * chi * (n - n // p) * good
        assert D0_closed(P0, p, r, (0,) * 6).close(want)


def test_bad_prime_guards():
    with pytest.raises(BadPrime):
        D0_closed(P0, 2, 1, M1)
    with pytest.raises(BadPrime):
        D_j_split(P1, 3, 1, M1, 0)
    with pytest.raises(PreconditionViolated):
        mawkish_main_defect(P0, 3, (3, 0, 1, 0, 1, 0))


def test_root_count_identity():
    prof = profile(P0, M1)
    f = q_poly(P0, M1)
    for p in range(3, 100, 2):
        if any(p % k == 0 for k in range(3, int(p**0.5) + 1, 2)):
            continue
        if (prof.c0 * prof.delta) % p == 0:
            continue
        assert rho_quadratic(f, p, 1) == 1 + jacobi(prof.delta, p)


def test_mawkish_defect_small():
    for p in (7, 11):
        defect = mawkish_main_defect(P0, p, M1)
        want = abs(D_star(P0, p, M1).value - p * p * jacobi(-8, p)) / p
        assert defect == pytest.approx(want)
        assert defect <= 2.0 + 1e-6


@pytest.mark.parametrize("d,q,m", [
    (3, 3, M1),
    (3, 9, (3, 0, 3, 0, 3, 0)),
    (3, 3, (2, 1, 0, 1, 1, 0)),
    (5, 5, M1),
])
def test_onion(d, q, m):
    assert onion_eval(P0, d, q, m).close(M_dq(P0, d, q, m).value)


def test_onion_guards():
    with pytest.raises(SupportMismatch):
        onion_eval(P0, 3, 5, M1)
    with pytest.raises(NotCoprimeToDiscriminant):
        onion_eval(P1, 3, 3, M1)


@pytest.mark.parametrize("r,m", [(1, M1), (3, M1), (9, (3, 0, 3, 0, 3, 0)), (5, (1, 2, 0, 0, 1, 1))])
def test_b2_identity(r, m):
    lhs, rhs = b2_sum_identity(P0, r, m)
    assert lhs.close(rhs.value)
    if r == 1:
        assert lhs.close(1) and rhs.close(1)


def test_sigma_partial_small():
    assert sigma_partial(P0, M1, 0, 1, 1).close(1)
    assert sigma_partial(P0, M1, 0, 2, 1).close(1)
    excl = abs(P0.delta_v * profile(P0, M1).N)
    want = 0
    for d in range(1, 51, 2):
        if math.gcd(d, excl) == 1:
            want += (1 if d % 4 == 1 else -1) * D_d(P0, d, M1, method="semi").value
    assert sigma_partial(P0, M1, 0, 50, excl).close(want)
    assert sigma_partial(P0, M1, 0, 50, excl, method="semi").close(want)


@settings(max_examples=25, deadline=None)
@given(st.tuples(*[st.integers(-6, 6)] * 6), st.sampled_from([(3, 5), (5, 7), (3, 7), (9, 5)]))
def test_multiplicativity(m, moduli):
    d1, d2 = moduli
    whole = D_d(P0, d1 * d2, m, method="semi")
    assert whole.close(D_d(P0, d1, m, "semi").value * D_d(P0, d2, m, "semi").value)


def test_exact_local_is_integer():
    for d in (3, 9, 27, 5, 25, 7, 15):
        v = d_local_exact(P0, d, M1)
        assert isinstance(v, int)
        assert D_d(P0, d, M1, method="semi").close(v)
    assert np.isscalar(d_local_exact(P0, 45, M1))
