import mpmath
import pytest

from cmiwasawa.charfile import load_character, load_pair
from cmiwasawa.cmforms import induced_charpoly
from cmiwasawa.hecke import trivial_character, unit_normalized
from cmiwasawa.lvalues import (
    BiquadraticCharacter, dedekind_coefficients, euler_factor_E, euler_factor_ETheta,
    euler_factor_Estar, interpolation_rhs, interpolation_rhs_recheck, l_series, l_series_dirichlet,
    nonvanishing_certificate, zeta_F_dirichlet,
)
from cmiwasawa.quadratic import QuadField, kronecker, small_primes
from cmiwasawa.values import Val



@pytest.fixture(scope="module")
def trivial():
    return BiquadraticCharacter(*load_pair("pair_trivial"))


@pytest.fixture(scope="module")
def class3():
    return BiquadraticCharacter(*load_pair("pair_class3"))


def test_splitting_types(trivial):
    # Q(i, sqrt-7): 29 splits in both, 3 inert in both, 5 split/inert, 11 inert/split
    kinds = {ell: sorted(P.f for P in trivial.primes_above(ell)) for ell in (29, 3, 5, 11, 2, 7)}
    assert kinds[29] == [1, 1, 1, 1]
    assert kinds[3] == [2, 2]
    assert kinds[5] == [2, 2]
    assert kinds[11] == [2, 2]
    assert kinds[2] == [1, 1]  # ramified in Q(i), split in Q(sqrt-7)
    assert kinds[7] == [2]  # ramified in Q(sqrt-7), inert in Q(i)


def test_norm_bookkeeping_against_dedekind(trivial):
    # for trivial Theta the local polynomial is the l-part of zeta_F
    a = dedekind_coefficients([-4, -7, 28], 400)
    for ell in small_primes(20):
        poly = trivial.local_polynomial(ell).coeffs
        inv = [1, 0, 0, 0, 0, 0, 0, 0, 0]
        for e in range(1, 9):
            inv[e] = -sum(poly[k] * inv[e - k] for k in range(1, min(e, len(poly) - 1) + 1))
        e, q = 0, 1
        while q <= 400:
            assert abs(inv[e] - a[q]) < 1e-12
            e, q = e + 1, q * ell


def test_zeta_F_two_ways(trivial):
    r = l_series(trivial, 3, 10000)
    z = zeta_F_dirichlet(trivial.K, trivial.K2, 3, 10000)
    assert abs(r.value - z) < 1e-6
    assert abs(r.value - z) <= r.tail_bound + mpmath.mpf(10) ** -8


def test_zeta_F_factorization(trivial):
    # zeta_F = zeta L(eps_-4) L(eps_-7) L(eps_28), each L through Hurwitz zeta values
    r = l_series(trivial, 3, 10000)
    with mpmath.workdps(30):
        z = mpmath.zeta(3)
        for d in (-4, -7, 28):
            q = abs(d)
            z *= mpmath.fsum(kronecker(d, a) * mpmath.zeta(3, mpmath.mpf(a) / q)
                             for a in range(1, q) if kronecker(d, a)) / q**3
        assert abs(r.value - z) <= r.tail_bound + mpmath.mpf(10) ** -25


def test_tail_bound_rigorous(class3):
    ref = l_series(class3, 3, 8000)
    for X in (200, 500, 1000, 2000, 4000):
        r = l_series(class3, 3, X)
        assert abs(r.value - ref.value) <= r.tail_bound
    bounds = [l_series(class3, 3, X).tail_bound for X in (100, 400, 1600)]
    assert bounds[0] > bounds[1] > bounds[2]


def test_nonvanishing(class3):
    cert = nonvanishing_certificate(class3, 3, 2000)
    assert cert["positive"] and cert["lower_bound"] > 0


def test_euler_vs_dirichlet_nontrivial(class3):
    a = l_series(class3, 3, 3000)
    b = l_series_dirichlet(class3, 3, 3000)
    assert abs(a.value - b) < 1e-6


def test_conjugate_values(class3):
    a = l_series(class3, 3, 1000).value
    b = l_series(class3.conjugate_pair(), 3, 1000).value
    assert abs(a - mpmath.conj(b)) < 1e-40


def test_convergence_guard(trivial):
    with pytest.raises(ValueError, match="outside absolute convergence"):
        l_series(trivial, 1.2, 100)


def test_local_vs_induced_charpoly(class3):
    for ell in small_primes(200):
        if ell in (2, 23):
            continue
        x = mpmath.mpf(ell) ** -3
        a = class3.local_polynomial(ell).evaluate(x)
        b = induced_charpoly(class3.chi, class3.chi2, ell).evaluate(x)
        assert abs(a - b) < 1e-12


# Euler factors at p


def test_Estar_vanishes_when_equal():
    chi = trivial_character(QuadField(-4))
    assert euler_factor_Estar(chi, 29).is_zero()


class _Stub:
    def __init__(self, K, table, k=0):
        self.K, self.table, self.k = K, table, k

    def is_coprime(self, I):
        return True

    def __call__(self, I):
        return self.table.get(I, Val.rational(1))


def test_ETheta_interpolation_zero():
    K, K2 = QuadField(-4), QuadField(-7)
    P = K.primes_above(29)[0]
    th = BiquadraticCharacter(_Stub(K, {P: Val.rational(29)}), _Stub(K2, {}))
    assert euler_factor_ETheta(th, 0, 29).is_zero()


def test_ETheta_vanishing_guard():
    K, K2 = QuadField(-4), QuadField(-7)
    Pb = K.primes_above(29)[1]
    th = BiquadraticCharacter(_Stub(K, {Pb: Val.rational(0)}), _Stub(K2, {}))
    with pytest.raises(ValueError, match="vanishes at p"):
        euler_factor_ETheta(th, 0, 29)


def test_ETheta_acceptance_pair(class3):
    et = euler_factor_ETheta(class3, 0, 29)
    assert et.exact is not None and not et.is_zero()
    # each factor by direct substitution
    chi, chi2 = class3.chi, class3.chi2
    P, Pb = chi.K.primes_above(29)
    Q, Qb = chi2.K.primes_above(29)
    t = [chi(a).to_complex() * chi2(b).to_complex() for a, b in ((P, Q), (P, Qb), (Pb, Q), (Pb, Qb))]
    for v in t:
        assert abs(v) > 0.5
    direct = (1 - t[0] / 29) * (1 - t[1] / 29) * (1 - 1 / t[2]) * (1 - 1 / t[3])
    assert abs(direct - et.exact.to_complex()) < 1e-12
    assert abs(et.approx - direct) < 1e-12


def test_E_exact_matches_complex():
    K = QuadField(-4)
    chi = unit_normalized(K, K.principal((2, 2)), k=4)
    for fn in (euler_factor_E, euler_factor_Estar):
        v = fn(chi, 29)
        assert abs(v.exact.to_complex() - v.approx) < 1e-40


# interpolation


@pytest.fixture(scope="module")
def weight4():
    K = QuadField(-4)
    chi = unit_normalized(K, K.principal((2, 2)), k=4)
    chi2 = trivial_character(QuadField(-7))
    return chi, chi2


def test_interpolation_double_evaluation(weight4):
    chi, chi2 = weight4
    L = l_series(BiquadraticCharacter(chi, chi2), 4, 2000)
    a = interpolation_rhs(chi, chi2, 3, 4, 0, L, 1, 29)
    b = interpolation_rhs_recheck(chi, chi2, 3, 4, 0, L, 1, 29)
    assert abs(a - b) < 1e-40 * max(1, abs(a))


def test_interpolation_supplied_L_at_j0(class3):
    # j = k' = 0 and k = 1: factorial prefactor 1, L supplied
    chi = load_character("gauss32")
    chi2 = trivial_character(QuadField(-7))
    a = interpolation_rhs(chi, chi2, 0, 1, 0, mpmath.mpf("0.75"), 1, 29)
    b = interpolation_rhs_recheck(chi, chi2, 0, 1, 0, mpmath.mpf("0.75"), 1, 29)
    assert abs(a - b) < 1e-12


def test_interpolation_guards(weight4):
    chi, chi2 = weight4
    with pytest.raises(ValueError, match="k' < 1\\+j <= k"):
        interpolation_rhs(chi, chi2, 4, 4, 0, 1, 1, 29)
    triv = trivial_character(QuadField(-4))
    with pytest.raises(ValueError):
        interpolation_rhs(triv, chi2, 0, 0, 0, 1, 1, 29)
    with pytest.raises(ValueError, match="Euler factor vanishes"):
        interpolation_rhs(triv, chi2, 0, 1, 0, 1, 1, 29)
