import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from cmiwasawa.padic import PrecisionError
from cmiwasawa.series import (
    MultiPowerSeries, tw_alpha, weierstrass_prep, divides_1var,
    divides_by_specialization, from_expr, from_text, to_text,
)

p, N, M = 5, 20, 24


def S(expr, names=("t",)):
    return from_expr(expr, p, N, M, list(names))


def rand_series(rng, d, deg, nterms=6, prec=N):
    coeffs = {}
    for _ in range(nterms):
        e = tuple(rng.randrange(deg + 1) for _ in range(d))
        coeffs[e] = rng.randrange(p**prec)
    return MultiPowerSeries(p, prec, M, d, coeffs)


def rand_one_unit(rng):
    return 1 + p * rng.randrange(p**(N - 1))


def test_tw_examples():
    f = S("3*t**2 + 7*t + 11")
    assert tw_alpha(f, 0, 1) == f
    a = 6
    assert tw_alpha(S("1+t"), 0, a) == S("6 + 6*t")
    with pytest.raises(ValueError):
        tw_alpha(f, 0, 2)


def test_project_examples():
    assert S("t**2 + 5*t + 3").project(0) == 3
    assert MultiPowerSeries.zero(p, N, M, 1).project(0).is_zero()


def test_project_after_twist_is_evaluation():
    rng = random.Random(3)
    mod = p**N
    for _ in range(20):
        f = rand_series(rng, 1, 8)
        a = rand_one_unit(rng)
        ainv = pow(a, -1, mod)
        # twisting by alpha then setting t=0 evaluates at alpha-1
        assert tw_alpha(f, 0, a).project(0).constant_term() == f.evaluate([a - 1])
        # the inverse twist evaluates at alpha^-1 - 1
        assert tw_alpha(f, 0, ainv).project(0).constant_term() == f.evaluate([ainv - 1])


def test_tw_group_law_and_inverse():
    rng = random.Random(4)
    mod = p**N
    for _ in range(30):
        d = rng.randrange(1, 4)
        f = rand_series(rng, d, 6)
        k = rng.randrange(d)
        a, b = rand_one_unit(rng), rand_one_unit(rng)
        assert tw_alpha(tw_alpha(f, k, b), k, a) == tw_alpha(f, k, a * b % mod)
        assert tw_alpha(tw_alpha(f, k, a), k, pow(a, -1, mod)) == f


def test_tw_is_ring_hom():
    rng = random.Random(5)
    for _ in range(30):
        d = rng.randrange(1, 3)
        # degrees kept small so products do not truncate
        f, g = rand_series(rng, d, 6), rand_series(rng, d, 6)
        a = rand_one_unit(rng)
        assert tw_alpha(f * g, 0, a) == tw_alpha(f, 0, a) * tw_alpha(g, 0, a)
        assert tw_alpha(f + g, 0, a) == tw_alpha(f, 0, a) + tw_alpha(g, 0, a)


def test_tw_matches_sympy_substitution():
    t = sympy.Symbol("t")
    rng = random.Random(6)
    for _ in range(10):
        cs = [rng.randrange(1000) for _ in range(6)]
        a = rand_one_unit(rng)
        poly = sum(c * t**i for i, c in enumerate(cs))
        sub = sympy.expand(poly.subs(t, a * (1 + t) - 1))
        assert tw_alpha(S(str(poly)), 0, a) == S(str(sub))


def test_prep_examples():
    w = weierstrass_prep(S("t+5"))
    assert (w.mu, w.distinguished, w.unit) == (0, S("t+5"), 1)
    w = weierstrass_prep(S("t**2 + 6*t + 5"))
    assert w.mu == 0 and w.distinguished == S("t+5") and w.unit == S("t+1")
    w = weierstrass_prep(S("5*(t+5)"))
    assert w.mu == 1 and w.distinguished.coeffs == {(0,): 5, (1,): 1} and w.unit == 1
    with pytest.raises(PrecisionError, match="insufficient precision"):
        weierstrass_prep(MultiPowerSeries.zero(p, N, M, 1))


def test_prep_distinguished_shape():
    rng = random.Random(7)
    for _ in range(50):
        cs = [rng.randrange(p**N) * p ** rng.randrange(4) for _ in range(M + 1)]
        f = MultiPowerSeries.from_list(p, N, M, cs)
        w = weierstrass_prep(f)
        P = w.distinguished.to_list()
        n = w.degree
        assert P[n] == 1 and all(c % p == 0 for c in P[:n])
        assert w.unit.constant_term() % p
        assert w.reconstruct() == f


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=p**N - 1), min_size=1, max_size=M + 1),
       st.integers(min_value=0, max_value=5))
def test_prep_reconstruction_property(cs, shift):
    f = MultiPowerSeries.from_list(p, N, M, [c * p**shift for c in cs])
    if f.is_zero():
        return
    assert weierstrass_prep(f).reconstruct() == f


def test_divides_1var_examples():
    assert divides_1var(S("t+5"), S("(t+5)*(t+1)"))
    f = S("t**3 + 25*t + 5")
    assert divides_1var(f, f)
    assert not divides_1var(S("t+5"), S("t+25"))
    assert divides_1var(S("5*t+25"), S("5*(t+5)*(t**2+3)"))
    assert not divides_1var(S("5*t+25"), S("(t+5)*(t**2+3)"))


def _rand_distinguished_times_unit(rng, deg):
    P = [p * rng.randrange(p**3) for _ in range(deg)] + [1]
    U = [1 + p * rng.randrange(9)] + [rng.randrange(50) for _ in range(2)]
    mu = rng.randrange(3)
    f = MultiPowerSeries.from_list(p, N, M, [p**mu * c for c in P])
    return f * MultiPowerSeries.from_list(p, N, M, U), P, mu


def test_divides_1var_positive_and_negative():
    rng = random.Random(8)
    for _ in range(40):
        f, P, mu = _rand_distinguished_times_unit(rng, rng.randrange(1, 5))
        h = MultiPowerSeries.from_list(p, N, M, [rng.randrange(p**N) for _ in range(5)])
        assert divides_1var(f, f * h)
        # perturb by p^a e with deg e < deg P: never a multiple of f
        e = MultiPowerSeries.from_list(p, N, M, [1 + rng.randrange(4)] + [rng.randrange(p) for _ in range(len(P) - 2)])
        a = rng.randrange(mu, mu + 3)
        assert not divides_1var(f, f * h + e.scale(p**a))


def test_divides_1var_cross_check_by_roots():
    # independent route: f = (t - r) with r in pZ_p divides g iff g(r) = 0
    rng = random.Random(9)
    for _ in range(30):
        r = p * rng.randrange(1, p**4)
        f = MultiPowerSeries.from_list(p, N, M, [-r, 1])
        g = MultiPowerSeries.from_list(p, N, M, [rng.randrange(p**6) for _ in range(6)])
        if rng.random() < 0.5:
            g = g * f
        # root value is exact mod p^min(N, M+1)
        root_test = g.evaluate([r]) % p**N == 0
        assert divides_1var(f, g) == root_test


def test_specialization_examples():
    T = lambda s: S(s, ("T1", "T2"))
    assert not divides_by_specialization(T("T1"), T("T2"))
    f = T("T1**2 + 5*T2 + T2**3 + 10")
    assert divides_by_specialization(f, f)
    assert divides_by_specialization(f, f * T("3 + T1*T2"))


def test_specialization_not_witnessed():
    f = MultiPowerSeries(p, 2, M, 2, {(1, 0): 1})
    g = MultiPowerSeries(p, 2, M, 2, {(0, 1): 1})
    # p*T1 at precision 2 vanishes at every point T1 = jp
    f = f.scale(p)
    with pytest.raises(PrecisionError, match="not witnessed"):
        divides_by_specialization(f, g.scale(0), J=3)


def _rand_poly(rng, syms, deg, monic_last=False):
    expr = 0
    for _ in range(rng.randrange(1, 4)):
        mon = 1
        for s in syms[:-1]:
            mon *= s ** rng.randrange(deg + 1)
        expr += rng.randrange(1, 20) * mon * syms[-1] ** rng.randrange(deg)
    if monic_last:
        expr += syms[-1] ** deg
    return sympy.expand(expr)


def multivariate_oracle(f, g, syms):
    # division in the last variable over Z[other vars]; f is monic there
    _, r = sympy.div(sympy.Poly(g, syms[-1]), sympy.Poly(f, syms[-1]))
    return r.is_zero


def test_specialization_matches_polynomial_division():
    rng = random.Random(10)
    agree = 0
    for trial in range(40):
        d = rng.choice([2, 3])
        syms = sympy.symbols(" ".join(f"T{i+1}" for i in range(d)))
        # f distinguished in the last variable: monic with p-divisible rest
        f = sympy.expand(syms[-1] ** 2 + p * _rand_poly(rng, syms, 1))
        h = _rand_poly(rng, syms, 2)
        if trial % 2:
            g = sympy.expand(f * h)
        else:
            g = sympy.expand(f * h + _rand_poly(rng, syms, 1))
        names = [str(s) for s in syms]
        F, G = from_expr(str(f), p, N, M, names), from_expr(str(g), p, N, M, names)
        assert divides_by_specialization(F, G, J=6) == multivariate_oracle(f, g, syms)
        agree += 1
    assert agree == 40


def test_text_roundtrip():
    rng = random.Random(11)
    for d in (1, 2, 3):
        f = rand_series(rng, d, 5)
        assert from_text(to_text(f)) == f
    assert to_text(S("t + 7")) == "p=5 N=20 M=24 d=1 | 0:2.1 | 1:1"
