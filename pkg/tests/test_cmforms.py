import random

import mpmath
import pytest

from cmiwasawa.charfile import load_character
from cmiwasawa.cmforms import (
    EulerFactor, QExpansion, charpoly_of_matrix, euler_factor_P, explicit_factor,
    frobenius_charpoly, induced_charpoly, induced_trace, omega_avatar,
    phi_n_specialize, phi_n_value, theta_expansion, verify_eigenform,
)
from cmiwasawa.hecke import ray_characters
from cmiwasawa.padic import PadicNumber
from cmiwasawa.quadratic import degree_one_primes, ray_class_group, small_primes
from cmiwasawa.values import Val


@pytest.fixture(scope="module")
def gauss():
    return load_character("gauss32")


@pytest.fixture(scope="module")
def thetas():
    out = {}
    for name in ("gauss32", "sqrtm7", "sqrtm23"):
        psi = load_character(name)
        out[name] = (psi, theta_expansion(psi, 500))
    return out


def test_theta_examples(thetas):
    f = thetas["gauss32"][1]
    assert f[1] == 1 and f[5] == -2 and f[3] == 0
    assert f.level == 32
    for _, g in thetas.values():
        assert g[1] == 1


def test_theta_brute_force_norm_forms(thetas):
    # oracle: a_n for Q(i) summed over generators x + y i normalized by x + y i = 1 mod (1+i)^3,
    # one per ideal: among the four associates exactly one is = 1 mod (2 + 2i)
    f = thetas["gauss32"][1]
    for n in range(1, 120):
        total = 0
        for x in range(-12, 13):
            for y in range(-12, 13):
                if x * x + y * y == n and ((x - 1) % 4 == 0 and y % 4 == 0 or (x - 3) % 4 == 0 and (y - 2) % 4 == 0):
                    total += complex(x, y)
        got = f[n].to_complex()
        assert abs(complex(got) - total) < 1e-20


def test_vanishing_off_norms(thetas):
    for psi, f in thetas.values():
        K = psi.K
        for n in range(1, 200):
            from cmiwasawa.quadratic import ideals_of_norm
            if not any(psi.is_coprime(I) for I in ideals_of_norm(K, n)):
                assert f[n] == 0


def test_eigenforms_pass(thetas):
    for psi, f in thetas.values():
        rep = verify_eigenform(f, 500)
        assert rep.ok, rep.failures[:3]
        assert rep.checked["recursion"] > 0


def test_negative_control(thetas):
    f = thetas["gauss32"][1]
    bad = list(f.coeffs)
    bad[25] = bad[25] + 1
    g = QExpansion(bad, f.level, f.nebentypus)
    rep = verify_eigenform(g, 500)
    assert ("recursion", {"l": 5, "r": 1}) in rep.failures


def test_charpoly_factorization_all_split(thetas):
    for psi, f in thetas.values():
        for ell in small_primes(200):
            if f.level % ell == 0 or psi.K.split_type(ell) != "split":
                continue
            res = frobenius_charpoly(f, ell, psi)
            assert res.factors is not None


def test_charpoly_gauss_five(thetas):
    psi, f = thetas["gauss32"]
    res = frobenius_charpoly(f, 5, psi)
    s = Val.sqrt_disc(-4)
    assert res.charpoly == EulerFactor([Val.rational(1), Val.rational(2), Val.rational(5)])
    assert set(v.text() for v in res.factors) == {(-1 + s).text(), (-1 - s).text()}
    with pytest.raises(ValueError):
        frobenius_charpoly(f, 2, psi)


def test_charpoly_inert_and_weil(thetas):
    for psi, f in thetas.values():
        for ell in small_primes(200):
            if f.level % ell == 0:
                continue
            if psi.K.split_type(ell) == "inert":
                assert f[ell] == 0
            a = f[ell].to_complex()
            assert abs(a) <= 2 * mpmath.sqrt(ell) + 1e-20
            if psi.K.split_type(ell) == "split" and f.nebentypus(ell) == 1:
                assert mpmath.re(a * mpmath.conj(a)) - 4 * ell < 0


def test_hecke_relation_on_oldforms(thetas):
    # the l-power recursion is the relation forced on the oldform pair (f(q), f(q^l)):
    # T'(l) f = a_l f, so the coefficients of f | T'(l) at l^r reproduce a_l a_(l^r)
    psi, f = thetas["sqrtm7"]
    for ell, top in ((2, 7), (11, 1), (3, 4)):
        for r in range(1, top + 1):
            n = ell**r
            t_coeff = f[n * ell] + f.nebentypus(ell) * ell * f[n // ell]
            assert t_coeff == f[ell] * f[n]


# phi_n


@pytest.fixture(scope="module")
def layer(gauss):
    K = gauss.K
    G = ray_class_group(K, K.principal((2, 2)), r=2, p=5)
    lam = next(x for x in ray_characters(G, 5) if x.order == 5)
    tw = theta_expansion(gauss.twisted_by(lam.inverse()), 100)
    return G, lam, tw


def test_phi_layer_group(layer):
    G, lam, _ = layer
    assert G.group.order == 400


def test_phi_equality(gauss, layer):
    _, lam, tw = layer
    for ell in small_primes(100):
        if ell in (2, 5):
            continue
        assert phi_n_specialize(gauss, lam, ell, tw).equal


def test_phi_trivial_and_inert(gauss, thetas, layer):
    G, lam, tw = layer
    triv = next(x for x in ray_characters(G) if x.is_trivial())
    f = thetas["gauss32"][1]
    assert phi_n_value(gauss, triv, 13) == f[13]
    assert phi_n_value(gauss, lam, 7) == 0 and tw[7] == 0


def test_phi_negative_control(gauss, layer):
    # using lam instead of lam^-1 in the twist must break equality somewhere
    _, lam, _ = layer
    wrong = theta_expansion(gauss.twisted_by(lam), 100)
    assert any(not phi_n_specialize(gauss, lam, ell, wrong).equal for ell in (13, 17, 29, 37, 41))


def test_phi_multiplicative(gauss, layer):
    _, lam, tw = layer
    for m, n in ((3, 13), (3, 17), (9, 11), (3, 29)):
        assert phi_n_value(gauss, lam, m * n) == phi_n_value(gauss, lam, m) * phi_n_value(gauss, lam, n)
        assert phi_n_value(gauss, lam, m * n) == tw[m * n]


def test_phi_errors(gauss, layer):
    _, lam, _ = layer
    with pytest.raises(ValueError):
        phi_n_specialize(gauss, lam, 5)


# induced models


def test_induced_trace(thetas):
    psi, f = thetas["gauss32"]
    assert induced_trace(psi, 5) == -2
    assert induced_trace(psi, 7) == 0
    for psi, f in thetas.values():
        for ell in small_primes(150):
            if f.level % ell:
                assert induced_trace(psi, ell) == f[ell]
    with pytest.raises(ValueError):
        induced_trace(psi, 23)


def test_induced_charpoly_split_completely():
    chi = load_character("trivial_qi")
    chi2 = load_character("sqrtm23_class3")
    ell = 29  # splits in Q(i) and Q(sqrt-23)
    assert chi.K.split_type(ell) == "split" and chi2.K.split_type(ell) == "split"
    got = induced_charpoly(chi, chi2, ell)
    want = EulerFactor([1])
    for P in chi.K.primes_above(ell):
        for Q in chi2.K.primes_above(ell):
            want = want * EulerFactor([1, -(chi(P).to_complex() * chi2(Q).to_complex())])
    assert all(abs(a - b) < 1e-12 for a, b in zip(got.coeffs, want.coeffs))


def test_charpoly_of_matrix_sympy():
    import sympy
    rng = random.Random(6)
    for _ in range(10):
        M = [[rng.randint(-5, 5) for _ in range(4)] for _ in range(4)]
        X = sympy.Symbol("X")
        want = sympy.Poly((sympy.eye(4) - X * sympy.Matrix(M)).det(), X).all_coeffs()[::-1]
        got = charpoly_of_matrix(M, 1)
        assert got == [int(c) for c in want] + [0] * (5 - len(want))


# Euler factors


def test_explicit_factor_examples():
    assert explicit_factor(2, 1, 1, 1, 0) == EulerFactor([1, -2, 1])
    assert explicit_factor(2, 1, 1, 1, 0) == EulerFactor([1, -1]) * EulerFactor([1, -1])
    p, N = 29, 20
    w = omega_avatar(7, p, N)
    e = PadicNumber(p, N, 3)
    base = explicit_factor(e, PadicNumber(p, N, 5), PadicNumber(p, N, 11), w, 2)
    up = explicit_factor(e, PadicNumber(p, N, 5), PadicNumber(p, N, 11), w, 3)
    assert up.coeffs[1] == base.coeffs[1] * w
    assert up.coeffs[2] == base.coeffs[2] * w * w


def test_euler_factor_forms_agree(gauss):
    psi7 = load_character("sqrtm7")
    rng = random.Random(7)
    ps = [P for P in degree_one_primes(gauss.K, 2000) if P.norm not in (2, 7, 29)]
    for P in rng.sample(ps, 20):
        i = rng.randrange(28)
        a = euler_factor_P(gauss, psi7, i, P, 29, "explicit")
        b = euler_factor_P(gauss, psi7, i, P, 29, "determinant")
        assert a == b


def test_euler_factor_errors(gauss):
    psi7 = load_character("sqrtm7")
    with pytest.raises(ValueError):
        euler_factor_P(gauss, psi7, 0, gauss.K.principal((3, 0)), 29)
    with pytest.raises(ValueError):
        euler_factor_P(gauss, psi7, 0, gauss.K.primes_above(29)[0], 29)
