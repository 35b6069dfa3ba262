import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadpairs.arith import r2
from quadpairs.counting import (
    Bump,
    LinearSystem,
    WeightSpec,
    count_S,
    count_S_naive,
    count_T,
    ratio_diagnostic,
    reduce_to_pair,
)
from quadpairs.errors import DegeneratePair, UnsupportedWeight, ValidationError
from quadpairs.forms import new_quad_pair

P0 = new_quad_pair((1, 1, 1, -1, 1))
EXAMPLE = LinearSystem.from_flat([1, 0, 1, 1, 1, 2, 3, 4])
SECOND = LinearSystem.from_flat([1, 0, 1, 1, 1, 2, 1, 4])


def bump(x, c, h):
    z = (x - c) / h
    return math.exp(-1 / (1 - z * z)) if abs(z) < 1 else 0.0


def python_T(L, B):
    """Loop over every (x, y) whose first two forms land in the default supports."""
    total = 0.0
    for x in range(-4 * int(B), 4 * int(B) + 1):
        if x % 2 == 0:
            continue
        for y in range(-4 * int(B), 4 * int(B) + 1):
            vals = L(x, y)
            w = bump(vals[0] / B, 1.5, 1) * bump(vals[1] / B, 1, 1) * bump(vals[2] / B, 1, 1) * bump(vals[3] / B, 1.5, 1)
            if w:
                total += w * r2(vals[0]) * r2(vals[1]) * r2(vals[2]) * r2(vals[3])
    return total


def test_bump_validation():
    with pytest.raises(UnsupportedWeight):
        Bump(0.5, 1.0, "w1")
    with pytest.raises(UnsupportedWeight):
        Bump(1.0, 0.0)
    with pytest.raises(UnsupportedWeight):
        Bump(1.0, 1.0, "w2")
    with pytest.raises(UnsupportedWeight):
        count_S(P0, lambda x: 1.0, 4.0)
    b = Bump(1.5, 1.0, "w1")
    assert b.support == (0.5, 2.5)
    assert b(1.5) == pytest.approx(math.exp(-1))
    assert b(0.5) == 0.0 and b(2.5) == 0.0


def test_linear_system_rules():
    assert (EXAMPLE.delta(1, 3), EXAMPLE.delta(1, 4), EXAMPLE.delta(2, 3), EXAMPLE.delta(2, 4)) == (2, 4, 1, 1)
    assert reduce_to_pair(EXAMPLE).coeffs == (-1, 4, 1, -2, 1)
    with pytest.raises(DegeneratePair):
        LinearSystem.from_flat([1, 0, 1, 1, 2, 2, 3, 4])
    with pytest.raises(ValidationError):
        LinearSystem.from_flat([1, 0, 3, 2, 1, 2, 3, 4])
    with pytest.raises(ValidationError):
        LinearSystem.from_flat([1, 0, 1, 1, 1, 2, 3, 5])
    with pytest.raises(ValidationError):
        LinearSystem.from_flat([1, 0, 1, 1])


def test_reduced_pair_determinant():
    for flat in ([1, 0, 1, 1, 1, 2, 3, 4], [1, 0, 1, 1, 1, 2, 1, 4], [1, 0, 0, 1, 1, 1, 1, -2], [2, 1, 1, 1, 3, 1, 5, 2]):
        L = LinearSystem.from_flat(flat)
        P = reduce_to_pair(L)
        assert P.det == L.delta(3, 4)
        assert P.beta_pp == 1


def test_tiny_B_is_zero():
    assert count_S(P0, None, 1.0) == 0.0
    assert count_T(EXAMPLE, None, 1.0) == 0.0
    with pytest.raises(ValidationError):
        count_S(P0, None, 0.5)


@pytest.mark.parametrize("coeffs", [(1, 1, 1, -1, 1), (-3, 4, 1, -2, 1), (2, 1, -1, 3, 2)])
@pytest.mark.parametrize("B", [2.0, 3.0, 5.0])
def test_engines_agree(coeffs, B):
    P = new_quad_pair(coeffs)
    radial = count_S(P, None, B)
    assert count_S(P, None, B, engine="box") == pytest.approx(radial, rel=1e-12, abs=1e-300)
    exact = count_S(P, None, B, exact=True)
    assert exact == pytest.approx(radial, rel=1e-12, abs=1e-300)
    assert count_S_naive(P, None, B) == exact


def test_naive_matches_exact_at_20():
    for coeffs in ((1, 1, 1, -1, 1), (-3, 4, 1, -2, 1)):
        P = new_quad_pair(coeffs)
        assert count_S_naive(P, None, 20.0) == count_S(P, None, 20.0, exact=True)


def test_count_T_against_python_loop():
    for L in (EXAMPLE, SECOND):
        for B in (25.0, 60.0):
            assert count_T(L, None, B) == pytest.approx(python_T(L, B), rel=1e-12, abs=1e-300)


def test_example_system_vanishes():
    # L4 = 3x + 4y is 3 mod 4 for x = 1 mod 4, so odd x never makes every r2 factor nonzero
    for B in (100.0, 400.0):
        assert count_T(EXAMPLE, None, B) == 0.0
        assert count_S(reduce_to_pair(EXAMPLE), None, math.sqrt(B)) == 0.0


@pytest.mark.parametrize("B", [100.0, 400.0])
def test_identity_second_system(B):
    t = count_T(SECOND, None, B)
    s = count_S(reduce_to_pair(SECOND), None, math.sqrt(B))
    assert t > 0
    assert abs(t - s) <= 1e-9 * max(abs(t), abs(s))


def test_worker_invariance():
    a = count_S(P0, None, 24.0, workers=1)
    b = count_S(P0, None, 24.0, workers=2)
    assert a == b
    assert count_T(SECOND, None, 300.0, workers=1) == count_T(SECOND, None, 300.0, workers=2)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.0, 50.0))
def test_linear_in_scale(lam):
    W = WeightSpec()
    base = count_S(P0, W, 12.0)
    assert count_S(P0, W.scaled(lam), 12.0) == pytest.approx(lam * base, rel=1e-12, abs=1e-300)


def test_monotone_under_domination():
    small = WeightSpec()
    wide = WeightSpec(b34=Bump(1.0, 1.3), b56=Bump(1.0, 1.2))
    for B in (6.0, 10.0, 14.0):
        assert 0 <= count_S(P0, small, B) <= count_S(P0, wide, B)


def test_block_swap_invariance():
    # exchanging the (x1,x2) and (x3,x4) blocks together with their weights
    P = new_quad_pair((2, 1, -1, 3, 2))
    Q = new_quad_pair((1, 2, 3, -1, 2))
    W = WeightSpec()
    Wsw = WeightSpec(b12=W.b34, b34=W.b12, b56=W.b56, bq=W.bq)
    for B in (5.0, 9.0):
        assert count_S(P, W, B, exact=True) == count_S(Q, Wsw, B, exact=True)


def test_ratio_diagnostic_rows():
    rows = ratio_diagnostic(P0, None, [16, 32, 64])
    assert len(rows) == 3
    assert rows[0].delta is None
    assert all(r.delta is not None and r.delta >= 0 for r in rows[1:])
    for r in rows:
        assert r.ratio == r.value / r.B**4
    zero = ratio_diagnostic(P0, WeightSpec(scale=0.0), [16, 32])
    assert [r.ratio for r in zero] == [0.0, 0.0]
    lam = ratio_diagnostic(P0, WeightSpec(scale=3.0), [16, 32])
    for a, b in zip(rows, lam):
        assert b.ratio == pytest.approx(3 * a.ratio, rel=1e-14)
    with pytest.raises(ValidationError):
        ratio_diagnostic(P0, None, [32, 16])
