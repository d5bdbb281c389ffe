import pytest
from hypothesis import given, settings, strategies as st

from cmiwasawa.padic import (
    PadicNumber, PrecisionError, teichmuller, hensel_nth_root,
    one_unit_projection, padic_log, padic_exp,
)


def P(p, n, x):
    return PadicNumber(p, n, x)


def brute_teich(a, p, n):
    # the unique (p-1)-th root of unity mod p^n with the right residue
    mod = p**n
    return [x for x in range(mod) if pow(x, p - 1, mod) == 1 and x % p == a % p][0]


def test_teich_known_value():
    assert teichmuller(P(7, 2, 3)).residue == 31
    assert brute_teich(3, 7, 2) == 31


def test_teich_trivial():
    assert teichmuller(P(5, 10, 1)) == 1
    t = teichmuller(P(5, 10, 2))
    assert t.residue % 5 == 2
    assert t**4 == 1


def test_teich_rejects_nonunit():
    with pytest.raises(PrecisionError, match="valuation positive"):
        teichmuller(P(5, 4, 10))


@pytest.mark.parametrize("p", [5, 7, 11])
def test_teich_matches_exhaustive(p):
    for a in range(1, p):
        assert teichmuller(P(p, 3, a)).residue == brute_teich(a, p, 3)


def test_hensel_examples():
    assert hensel_nth_root(P(5, 2, 6), 2, 1).residue == 16
    sq = [x for x in range(25) if x * x % 25 == 6 and x % 5 == 1]
    assert sq == [16]
    assert hensel_nth_root(P(11, 6, 1), 3, 1) == 1
    assert hensel_nth_root(P(5, 6, 6), 1, 1) == 6


def test_hensel_errors():
    with pytest.raises(ValueError, match="root not in base field"):
        hensel_nth_root(P(5, 4, 6), 5, 1)
    with pytest.raises(ValueError, match="no root"):
        hensel_nth_root(P(5, 4, 2), 2, 1)


def test_projection_examples():
    assert one_unit_projection(P(5, 6, 1)) == 1
    assert one_unit_projection(P(5, 2, 2)).residue == 11
    assert brute_teich(2, 5, 2) == 7 and 2 * pow(7, -1, 25) % 25 == 11
    assert one_unit_projection(teichmuller(P(7, 8, 3))) == 1
    with pytest.raises(PrecisionError):
        one_unit_projection(P(5, 3, 5))


def test_precision_tracking():
    a = P(5, 10, 5)
    b = P(5, 6, 25)
    assert (a * b).precision == 7
    assert (a + b).precision == 6
    with pytest.raises(PrecisionError):
        P(5, 0, 1)


units = st.integers(min_value=1, max_value=10**12).filter(lambda x: x % 7)


@settings(max_examples=60, deadline=None)
@given(units, units)
def test_teich_multiplicative(a, b):
    N = 12
    assert teichmuller(P(7, N, a * b)) == teichmuller(P(7, N, a)) * teichmuller(P(7, N, b))


@settings(max_examples=60, deadline=None)
@given(units, units)
def test_projection_homomorphism(a, b):
    N = 10
    lhs = one_unit_projection(P(7, N, a * b))
    rhs = one_unit_projection(P(7, N, a)) * one_unit_projection(P(7, N, b))
    assert lhs == rhs
    assert lhs.residue % 7 == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10**10), st.sampled_from([2, 3, 4, 6, 8]))
def test_hensel_roundtrip(k, h):
    p, N = 5, 12
    x = P(p, N, 1 + p * k)
    assert hensel_nth_root(x**h, h, 1) == x


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10**8))
def test_hensel_matches_log_exp(k):
    # independent route: x^(1/h) = exp(log(x)/h)
    p, N, h = 7, 8, 3
    x = P(p, N, 1 + p * k)
    via_log = padic_exp(padic_log(x) * PadicNumber.from_rational(p, 1, N) / h)
    assert hensel_nth_root(x, h, 1) == via_log
