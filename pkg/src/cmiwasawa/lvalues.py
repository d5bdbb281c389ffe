"""L-series of Theta = (chi o N_F/K)(chi' o N_F/K') over F = K K' and the
Euler factors of the interpolation formula.

Complex arithmetic runs at 50 significant digits; all character values stay
exact until the final embedding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, gcd

import mpmath
import numpy as np
from sympy import primerange

from .cmforms import EulerFactor
from .quadratic import QuadField, kronecker
from .values import DPS, Val


def _squarefree_disc(n: int) -> int:
    """Fundamental discriminant of Q(sqrt n)."""
    from sympy import factorint
    sign = -1 if n < 0 else 1
    core = sign
    for q, e in factorint(abs(n)).items():
        if e % 2:
            core *= q
    return core if core % 4 == 1 else 4 * core


@dataclass
class FPrime:
    """A prime P of F above l: residue degree f, norm l^f and the two norm images."""

    ell: int
    f: int
    norm: int
    chi_arg: object  # ideal of K (or None when the value is 0)
    chi2_arg: object
    chi_val: Val
    chi2_val: Val
    label: str

    @property
    def value(self):
        with mpmath.workdps(DPS):
            return self.chi_val.to_complex() * self.chi2_val.to_complex()


class BiquadraticCharacter:
    """Theta(P) = chi(N_F/K P) chi'(N_F/K' P)."""

    def __init__(self, chi, chi2):
        if chi.K == chi2.K:
            raise ValueError("the two quadratic fields must differ")
        self.chi, self.chi2 = chi, chi2
        self.K, self.K2 = chi.K, chi2.K
        self.weight = chi.k + chi2.k
        self.real_disc = _squarefree_disc(self.K.disc * self.K2.disc)

    def conjugate_pair(self):
        return BiquadraticCharacter(_conj_char(self.chi), _conj_char(self.chi2))

    def _val(self, c, I):
        if I is None or not c.is_coprime(I):
            return Val.rational(0)
        return c(I)

    def primes_above(self, ell: int):
        K, K2 = self.K, self.K2
        s1, s2 = K.split_type(ell), K2.split_type(ell)
        ch, ch2 = self.chi, self.chi2
        out = []

        def add(f, a, b, va, vb, label):
            out.append(FPrime(ell, f, ell**f, a, b, va, vb, label))

        def ps(F, st):
            P = F.primes_above(ell)
            return P if st != "inert" else [F.principal((ell, 0))]

        A, B = ps(K, s1), ps(K2, s2)
        if "ramified" in (s1, s2) and s1 == s2:
            st = kronecker(self.real_disc, ell)
            if st == 0:
                raise ValueError("l ramified in all three quadratic subfields")
            a, b = A[0], B[0]
            va, vb = self._val(ch, a), self._val(ch2, b)
            if st == 1:
                for j in range(2):
                    add(1, a, b, va, vb, f"ram{j}")
            else:
                add(2, a, b, va * va, vb * vb, "ram")
            return out
        if s1 == "inert" and s2 == "inert":
            a, b = A[0], B[0]
            for j in range(2):
                add(2, a, b, self._val(ch, a), self._val(ch2, b), f"inert{j}")
            return out
        # at least one side has degree-one primes (split or ramified)
        one1 = s1 != "inert"
        one2 = s2 != "inert"
        if one1 and one2:
            for ia, a in enumerate(A):
                for ib, b in enumerate(B):
                    add(1, a, b, self._val(ch, a), self._val(ch2, b), f"{ia}{ib}")
        elif one1:
            b = B[0]
            for ia, a in enumerate(A):
                va = self._val(ch, a)
                add(2, a, b, va * va, self._val(ch2, b), f"{ia}-")
        else:
            a = A[0]
            for ib, b in enumerate(B):
                vb = self._val(ch2, b)
                add(2, a, b, self._val(ch, a), vb * vb, f"-{ib}")
        return out

    def local_polynomial(self, ell: int) -> EulerFactor:
        """prod over P above l of (1 - Theta(P) X^f), X = l^-s."""
        with mpmath.workdps(DPS):
            poly = EulerFactor([mpmath.mpc(1)])
            for P in self.primes_above(ell):
                c = [mpmath.mpc(1)] + [mpmath.mpc(0)] * (P.f - 1) + [-P.value]
                poly = poly * EulerFactor(c)
            return poly


def _conj_char(c):
    if c.k == 0 and hasattr(c, "inverse"):
        return c.inverse()
    return c.conjugate()


@dataclass
class LPartialSum:
    s: object
    cutoff: int
    value: object
    tail_bound: object
    log: list = field(default_factory=list)

    def lines(self, with_log=False):
        out = [f"s={mpmath.nstr(self.s, 20)}", f"cutoff={self.cutoff}",
               f"value={mpmath.nstr(self.value, 30)}", f"tail_bound={mpmath.nstr(self.tail_bound, 6)}"]
        if with_log:
            out += [f"factor l={ell} {txt}" for ell, txt in self.log]
        return out


def _sigma_eff(theta, s):
    sigma = mpmath.re(mpmath.mpmathify(s))
    if sigma < mpmath.mpf(1.5) + mpmath.mpf(theta.weight) / 2:
        raise ValueError("outside absolute convergence; no analytic continuation implemented")
    return sigma - mpmath.mpf(theta.weight) / 2


def tail_delta(sigma, X):
    """Bound on |log L - log L_X| for a degree-four Euler product, normalized."""
    X = mpmath.mpf(X)
    return 4 * X ** (1 - sigma) / ((sigma - 1) * (1 - X ** (-sigma)))


def l_series(theta: BiquadraticCharacter, s, X: int, keep_log=False) -> LPartialSum:
    """Euler product over rational primes l <= X, multiplied in increasing order."""
    with mpmath.workdps(DPS):
        s = mpmath.mpmathify(s)
        sigma = _sigma_eff(theta, s)
        val = mpmath.mpc(1)
        log = []
        for ell in primerange(2, X + 1):
            ell = int(ell)
            x = mpmath.power(ell, -s)
            loc = theta.local_polynomial(ell).evaluate(x)
            val /= loc
            if keep_log:
                log.append((ell, mpmath.nstr(1 / loc, 15)))
        delta = tail_delta(sigma, X)
        tail = abs(val) * (mpmath.exp(delta) - 1)
        return LPartialSum(s, X, val, tail, log)


def nonvanishing_certificate(theta, s, X: int):
    """Lower bound for |L(Theta, s)|: |L_X| e^-delta with the product bound on |L_X|."""
    with mpmath.workdps(DPS):
        res = l_series(theta, s, X)
        sigma = _sigma_eff(theta, s)
        prod = mpmath.mpf(1)
        for ell in primerange(2, X + 1):
            prod *= (1 + mpmath.power(int(ell), -sigma)) ** -4
        delta = tail_delta(sigma, X)
        lower = prod * mpmath.exp(-delta)
        direct = abs(res.value) * mpmath.exp(-delta)
        return {"lower_bound": lower, "direct_bound": direct, "positive": lower > 0 and direct >= lower,
                "value": res.value}


# Dirichlet-series oracles


def _char_table(disc, X):
    return np.array([0] + [kronecker(disc, n) for n in range(1, X + 1)], dtype=np.int64)


def dedekind_coefficients(discs, X: int):
    """a_n of zeta(s) prod L(eps_d, s): Dirichlet convolution of 1 with each eps_d."""
    a = np.zeros(X + 1, dtype=np.int64)
    a[1:] = 1
    for d in discs:
        chi = _char_table(d, X)
        b = np.zeros(X + 1, dtype=np.int64)
        for m in range(1, X + 1):
            if a[m]:
                top = X // m
                b[m::m][:top] += a[m] * chi[1:top + 1]
        a = b
    return a


def zeta_F_dirichlet(K: QuadField, K2: QuadField, s, X: int):
    """sum_{n <= X} a_n n^-s for zeta_F = zeta L(eps_K) L(eps_K') L(eps_K'')."""
    a = dedekind_coefficients([K.disc, K2.disc, _squarefree_disc(K.disc * K2.disc)], X)
    with mpmath.workdps(DPS):
        s = mpmath.mpmathify(s)
        return mpmath.fsum(int(a[n]) * mpmath.power(n, -s) for n in range(1, X + 1) if a[n])


def dirichlet_coefficients(theta: BiquadraticCharacter, X: int):
    """a_n of L(Theta, s) from the local polynomials, n <= X."""
    with mpmath.workdps(DPS):
        a = [mpmath.mpc(0)] * (X + 1)
        a[1] = mpmath.mpc(1)
        for ell in primerange(2, X + 1):
            ell = int(ell)
            poly = theta.local_polynomial(ell).coeffs
            # coefficients of 1/poly in X up to l^e <= X
            e_max = 0
            q = 1
            while q * ell <= X:
                q *= ell
                e_max += 1
            inv = [mpmath.mpc(1)] + [mpmath.mpc(0)] * e_max
            for e in range(1, e_max + 1):
                inv[e] = -mpmath.fsum(poly[k] * inv[e - k] for k in range(1, min(e, len(poly) - 1) + 1))
            for n in range(X // ell, 0, -1):
                if n % ell == 0 or a[n] == 0:
                    continue
                q = ell
                for e in range(1, e_max + 1):
                    if n * q > X:
                        break
                    a[n * q] = a[n] * inv[e]
                    q *= ell
        return a


def l_series_dirichlet(theta, s, X: int):
    a = dirichlet_coefficients(theta, X)
    with mpmath.workdps(DPS):
        s = mpmath.mpmathify(s)
        return mpmath.fsum(a[n] * mpmath.power(n, -s) for n in range(1, X + 1) if a[n] != 0)


# Euler factors at p and the interpolation formula


@dataclass
class FactorValue:
    """Exact value when the value ring allows it, always a 50-digit complex."""

    exact: Val | None
    approx: object

    def is_zero(self):
        if self.exact is not None:
            return self.exact.is_zero()
        return abs(self.approx) < mpmath.mpf(10) ** (-DPS + 5)

    def text(self):
        return self.exact.text() if self.exact is not None else mpmath.nstr(self.approx, 30)


def _fv(v: Val | None, approx):
    return FactorValue(v, approx)


def _cx(v):
    with mpmath.workdps(DPS):
        return v.to_complex()


def _val_at(c, I):
    return c(I) if c.is_coprime(I) else Val.rational(0)


def euler_factor_E(chi, p: int) -> FactorValue:
    """1 - chi(P) / (p chi(conj P)), P the prime fixed by iota_p."""
    P, Pb = chi.K.primes_above(p)
    a, b = _val_at(chi, P), _val_at(chi, Pb)
    if b.is_zero():
        raise ValueError("character value vanishes at p")
    with mpmath.workdps(DPS):
        approx = 1 - _cx(a) / (p * _cx(b))
    try:
        exact = 1 - a * b.inverse() * Fraction(1, p)
    except ValueError:
        exact = None
    return _fv(exact, approx)


def euler_factor_Estar(chi, p: int) -> FactorValue:
    """1 - chi(P) / chi(conj P)."""
    P, Pb = chi.K.primes_above(p)
    a, b = _val_at(chi, P), _val_at(chi, Pb)
    if b.is_zero():
        raise ValueError("character value vanishes at p")
    with mpmath.workdps(DPS):
        approx = 1 - _cx(a) / _cx(b)
    try:
        exact = 1 - a * b.inverse()
    except ValueError:
        exact = None
    return _fv(exact, approx)


def p_primes(theta: BiquadraticCharacter, p: int):
    """Theta at p1..p4 labelled by (P, P'), (P, conj P'), (conj P, P'), (conj P, conj P')
    as pairs of exact component values."""
    P, Pb = theta.K.primes_above(p)
    Q, Qb = theta.K2.primes_above(p)
    out = []
    for a, b in ((P, Q), (P, Qb), (Pb, Q), (Pb, Qb)):
        out.append((_val_at(theta.chi, a), _val_at(theta.chi2, b)))
    return out


def _product_exact(u, v):
    try:
        return u * v
    except ValueError:  # two different fields both carrying s
        return None


def euler_factor_ETheta(theta: BiquadraticCharacter, j: int, p: int) -> FactorValue:
    """(1 - T(p1)/p^(j+1)) (1 - T(p2)/p^(j+1)) (1 - p^j/T(p3)) (1 - p^j/T(p4))
    times prod over l | (D, D') of (1 - chi(l) chi'(l') eps''(l) / l^(j+1))."""
    vals = p_primes(theta, p)
    q = Fraction(1, p ** (j + 1))
    with mpmath.workdps(DPS):
        cx = [_cx(a) * _cx(b) for a, b in vals]
        if cx[2] == 0 or cx[3] == 0 or any(a.is_zero() or b.is_zero() for a, b in vals[2:]):
            raise ValueError("character value vanishes at p")
        approx = (1 - cx[0] * q.numerator / q.denominator) * (1 - cx[1] * q.numerator / q.denominator)
        approx *= (1 - mpmath.mpf(p) ** j / cx[2]) * (1 - mpmath.mpf(p) ** j / cx[3])
    exact = None
    prods = [_product_exact(a, b) for a, b in vals]
    if all(x is not None for x in prods):
        try:
            exact = (1 - prods[0] * q) * (1 - prods[1] * q)
            exact = exact * (1 - prods[2].inverse() * p**j) * (1 - prods[3].inverse() * p**j)
        except ValueError:
            exact = None
    for ell in primerange(2, gcd(theta.K.D, theta.K2.D) + 1):
        ell = int(ell)
        if theta.K.D % ell or theta.K2.D % ell:
            continue
        a = _val_at(theta.chi, theta.K.primes_above(ell)[0])
        b = _val_at(theta.chi2, theta.K2.primes_above(ell)[0])
        e = kronecker(theta.real_disc, ell)
        with mpmath.workdps(DPS):
            approx *= 1 - _cx(a) * _cx(b) * e / mpmath.mpf(ell) ** (j + 1)
        ab = _product_exact(a, b)
        exact = None if exact is None or ab is None else exact * (1 - ab * Fraction(e, ell ** (j + 1)))
    return _fv(exact, approx)


def interpolation_rhs(chi, chi2, j: int, k: int, k2: int, L, petersson, p: int):
    """E(Theta, 1+j) / (E(chi) E*(chi)) * j! (j-k')! L / (i^(k'-k) pi^(2+2j-k') 2^(2+2j+k-k') <theta, theta>).

    L is an LPartialSum or a supplied complex number; petersson is supplied.
    """
    if not (k2 < 1 + j <= k):
        raise ValueError("need k' < 1+j <= k")
    if not petersson > 0:
        raise ValueError("petersson norm must be positive")
    theta = BiquadraticCharacter(chi, chi2)
    E = euler_factor_E(chi, p)
    Es = euler_factor_Estar(chi, p)
    if E.is_zero() or Es.is_zero():
        raise ValueError("Euler factor vanishes")
    ET = euler_factor_ETheta(theta, j, p)
    with mpmath.workdps(DPS):
        Lv = L.value if isinstance(L, LPartialSum) else mpmath.mpmathify(L)
        num = ET.approx * factorial(j) * factorial(j - k2) * Lv
        den = mpmath.mpc(0, 1) ** (k2 - k) * mpmath.pi ** (2 + 2 * j - k2) * mpmath.mpf(2) ** (2 + 2 * j + k - k2)
        den *= mpmath.mpmathify(petersson)
        return num / (E.approx * Es.approx * den)


def interpolation_rhs_recheck(chi, chi2, j, k, k2, L, petersson, p):
    """The same display evaluated straight from character values, grouped as
    one numerator over one denominator and with logs for the powers."""
    if not (k2 < 1 + j <= k):
        raise ValueError("need k' < 1+j <= k")
    with mpmath.workdps(DPS):
        K, K2 = chi.K, chi2.K
        P, Pb = K.primes_above(p)
        Q, Qb = K2.primes_above(p)
        c = lambda ch, I: _cx(_val_at(ch, I))
        t = [c(chi, a) * c(chi2, b) for a, b in ((P, Q), (P, Qb), (Pb, Q), (Pb, Qb))]
        pj = mpmath.exp(j * mpmath.log(p))
        pj1 = pj * p
        num = (pj1 - t[0]) * (pj1 - t[1]) * (t[2] - pj) * (t[3] - pj)
        num *= c(chi, Pb) * c(chi, Pb) * p
        den = pj1 * pj1 * t[2] * t[3]
        den *= (p * c(chi, Pb) - c(chi, P)) * (c(chi, Pb) - c(chi, P))
        for ell in primerange(2, gcd(K.D, K2.D) + 1):
            ell = int(ell)
            if K.D % ell == 0 and K2.D % ell == 0:
                e = kronecker(_squarefree_disc(K.disc * K2.disc), ell)
                num *= 1 - c(chi, K.primes_above(ell)[0]) * c(chi2, K2.primes_above(ell)[0]) * e / mpmath.mpf(ell) ** (j + 1)
        Lv = L.value if isinstance(L, LPartialSum) else mpmath.mpmathify(L)
        gam = mpmath.gamma(j + 1) * mpmath.gamma(j - k2 + 1)
        scale = mpmath.exp(-(2 + 2 * j - k2) * mpmath.log(mpmath.pi) - (2 + 2 * j + k - k2) * mpmath.log(2))
        return num / den * gam * Lv * scale / (mpmath.expjpi(mpmath.mpf(k2 - k) / 2) * petersson)
