"""CM theta series, Hecke eigenvalue checks and local factors."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from math import gcd

from .padic import PadicNumber, teichmuller
from .quadratic import ideals_of_norm, small_primes
from .values import Val


@dataclass
class QExpansion:
    """a_1..a_B of a weight-2 form; coeffs[0] is unused and kept at 0."""

    coeffs: list
    level: int
    nebentypus: object  # callable n -> Val, for gcd(n, level) = 1
    weight: int = 2
    name: str = "f"

    @property
    def bound(self):
        return len(self.coeffs) - 1

    def __getitem__(self, n):
        if not 1 <= n <= self.bound:
            raise IndexError(f"coefficient a_{n} outside 1..{self.bound}")
        return self.coeffs[n]

    def rows(self):
        return [f"{n} {self.coeffs[n].text()}" for n in range(1, self.bound + 1)]


def theta_expansion(psi, B: int) -> QExpansion:
    """a_n = sum of psi(a) over ideals a of norm n coprime to the modulus."""
    if psi.k != 1:
        raise ValueError("theta series needs infinity type (1,0)")
    K = psi.K
    coeffs = [Val.rational(0)]
    for n in range(1, B + 1):
        a = Val.rational(0)
        for I in ideals_of_norm(K, n):
            if psi.is_coprime(I):
                a = a + psi(I)
        coeffs.append(a)
    return QExpansion(coeffs, psi.level(), psi.eps_psi, 2, f"theta_{psi.name}")


@dataclass
class EigenReport:
    failures: list = field(default_factory=list)
    checked: dict = field(default_factory=lambda: {"mult": 0, "recursion": 0, "bad_prime": 0})

    @property
    def ok(self):
        return not self.failures

    def lines(self):
        out = [f"eigenform={'pass' if self.ok else 'fail'}"]
        out += [f"checked.{k}={v}" for k, v in self.checked.items()]
        out += [f"failure={kind} " + " ".join(f"{k}={v}" for k, v in data.items())
                for kind, data in self.failures]
        return out


def verify_eigenform(f: QExpansion, B: int | None = None) -> EigenReport:
    """(a) a_mn = a_m a_n for coprime m, n; (b) the l-power recursion for
    l not dividing N; (c) a_(l^r) = a_l^r for l | N."""
    B = min(B or f.bound, f.bound)
    rep = EigenReport()
    a = f.coeffs
    if not a[1] == 1:
        rep.failures.append(("normalization", {"n": 1}))
        return rep
    for m in range(2, B + 1):
        for n in range(m + 1, B // m + 1):
            if gcd(m, n) == 1:
                rep.checked["mult"] += 1
                if not a[m * n] == a[m] * a[n]:
                    rep.failures.append(("mult", {"m": m, "n": n}))
    for ell in small_primes(B):
        if f.level % ell:
            eps_l = f.nebentypus(ell) * ell
            r, q = 1, ell
            while q * ell <= B:
                rep.checked["recursion"] += 1
                if not a[q * ell] == a[ell] * a[q] - eps_l * a[q // ell]:
                    rep.failures.append(("recursion", {"l": ell, "r": r}))
                r, q = r + 1, q * ell
        else:
            r, q = 2, ell * ell
            while q <= B:
                rep.checked["bad_prime"] += 1
                if not a[q] == a[ell] ** r:
                    rep.failures.append(("bad_prime", {"l": ell, "r": r}))
                r, q = r + 1, q * ell
    return rep


class EulerFactor:
    """Polynomial 1 + c_1 X + ... over Val, PadicNumber or complex coefficients."""

    def __init__(self, coeffs):
        self.coeffs = list(coeffs)
        c0 = self.coeffs[0]
        if not (c0 == 1):
            raise ValueError("Euler factor must have constant term 1")

    @property
    def degree(self):
        d = len(self.coeffs) - 1
        while d > 0 and _is_zero(self.coeffs[d]):
            d -= 1
        return d

    def __mul__(self, other):
        out = [None] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                t = x * y
                out[i + j] = t if out[i + j] is None else out[i + j] + t
        return EulerFactor(out)

    def __eq__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + [0] * (n - len(self.coeffs))
        b = other.coeffs + [0] * (n - len(other.coeffs))
        return all(_is_zero(x - y) for x, y in zip(a, b))

    def evaluate(self, x):
        out = 0
        for c in reversed(self.coeffs):
            out = out * x + (c.to_complex() if isinstance(c, Val) else c)
        return out

    def text(self):
        parts = []
        for i, c in enumerate(self.coeffs):
            t = c.text() if isinstance(c, Val) else str(c)
            parts.append(t if i == 0 else f"({t})*X" + (f"^{i}" if i > 1 else ""))
        return " + ".join(parts)

    def __repr__(self):
        return f"EulerFactor({self.text()})"


def _is_zero(x):
    if isinstance(x, Val):
        return x.is_zero()
    if isinstance(x, PadicNumber):
        return x.residue % x.prime**x.precision == 0
    return x == 0


def linear_factor(v):
    return EulerFactor([Val.rational(1) if isinstance(v, Val) else 1, -v])


@dataclass
class CharpolyResult:
    charpoly: EulerFactor
    factors: tuple | None = None

    def lines(self):
        out = [f"charpoly={self.charpoly.text()}"]
        if self.factors:
            out.append("factorization=" + " * ".join(f"(1 - ({v.text()})*X)" for v in self.factors))
        return out


def frobenius_charpoly(f: QExpansion, ell: int, psi=None, p: int | None = None) -> CharpolyResult:
    """1 - a_l X + eps(l) l X^2; split l with psi given also factors it."""
    if f.level % ell == 0 or (p is not None and ell % p == 0):
        raise ValueError("l must not divide N p")
    poly = EulerFactor([Val.rational(1), -f[ell], f.nebentypus(ell) * ell])
    if psi is None or psi.K.split_type(ell) != "split":
        return CharpolyResult(poly)
    P, Pb = psi.K.primes_above(ell)
    v1, v2 = psi(P), psi(Pb)
    if not linear_factor(v1) * linear_factor(v2) == poly:
        raise AssertionError(f"CM factorization fails at l={ell}")
    return CharpolyResult(poly, (v1, v2))


# the specializations of phi_n


def phi_n_value(psi, lam, n: int) -> Val:
    """Image of T'(n): sum over ideals a of norm n of psi(a) lam(sigma_a)^-1."""
    inv = lam.inverse()
    out = Val.rational(0)
    for I in ideals_of_norm(psi.K, n):
        if psi.is_coprime(I) and lam.is_coprime(I):
            out = out + psi(I) * inv(I)
    return out


@dataclass
class PhiResult:
    ell: int
    lhs: Val
    rhs: Val

    @property
    def equal(self):
        return self.lhs == self.rhs

    def lines(self):
        return [f"l={self.ell}", f"phi={self.lhs.text()}", f"a_l={self.rhs.text()}",
                f"equal={'pass' if self.equal else 'fail'}"]


def phi_n_specialize(psi, lam, ell: int, twisted_theta: QExpansion | None = None) -> PhiResult:
    """Compare lam o phi_n(T'(l)) with a_l of theta of psi * lam^-1.

    lam is a finite-order character of a ray class group whose modulus is a
    multiple of the modulus of psi (the layer n p^r).
    """
    if gcd(ell, lam.modulus.norm * psi.K.D) != 1:
        raise ValueError("l must be coprime to N(n) D p")
    lhs = phi_n_value(psi, lam, ell)
    if twisted_theta is None:
        twisted_theta = theta_expansion(psi.twisted_by(lam.inverse()), ell)
    return PhiResult(ell, lhs, twisted_theta[ell])


# induced representations


def induced_trace(psi, ell: int) -> Val:
    """Trace of Frob_l on the induction of psi from K to Q."""
    st = psi.K.split_type(ell)
    if st == "ramified" or psi.modulus.norm % ell == 0:
        raise ValueError("l ramified or dividing the conductor")
    if st == "inert":
        return Val.rational(0)
    P, Pb = psi.K.primes_above(ell)
    return psi(P) + psi(Pb)


def charpoly_of_matrix(M, one):
    """det(1 - X M) as a coefficient list; sums of signed principal minors."""
    n = len(M)
    coeffs = [one]
    for k in range(1, n + 1):
        total = None
        for rows in _subsets(n, k):
            m = _det([[M[r][c] for c in rows] for r in rows], one)
            total = m if total is None else total + m
        coeffs.append(total if k % 2 == 0 else -total)
    return coeffs


def _subsets(n, k):
    if k == 0:
        yield ()
        return
    for i in range(n):
        for rest in _subsets(n - i - 1, k - 1):
            yield (i,) + tuple(i + 1 + r for r in rest)


def _det(A, one):
    n = len(A)
    out = None
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        t = one
        for i in range(n):
            t = t * A[i][perm[i]]
        t = t if sign > 0 else -t
        out = t if out is None else out + t
    return out


def complex_embed(v, K):
    return v.to_complex()


def padic_embed(p, N):
    def embed(v, K):
        return v.to_padic(p, N, K)
    return embed


def induced_matrix_K(psi, ell: int, embed):
    """2x2 model of Frob_l on Ind_K^Q psi: diagonal when split, a swap when inert."""
    st = psi.K.split_type(ell)
    if st == "ramified" or psi.modulus.norm % ell == 0:
        raise ValueError("l ramified or dividing the conductor")
    K = psi.K
    zero, one = embed(Val.rational(0), K), embed(Val.rational(1), K)
    if st == "split":
        P, Pb = K.primes_above(ell)
        return [[embed(psi(P), K), zero], [zero, embed(psi(Pb), K)]]
    return [[zero, embed(psi(K.principal((ell, 0))), K)], [one, zero]]


def induced_charpoly_K(psi, ell: int, embed, scale=None):
    M = induced_matrix_K(psi, ell, embed)
    if scale is not None:
        M = [[scale * x for x in row] for row in M]
    one = embed(Val.rational(1), psi.K)
    return EulerFactor(charpoly_of_matrix(M, one))


def induced_matrix_F(chi, chi2, ell: int, embed):
    """4x4 block-permutation model of Frob_l on the induction from F = K K' to Q.

    Basis vectors are indexed by Gal(F/Q) = {(a, b)}; Frob_l is the element g
    with g_1 = 0 iff l splits in K, g_2 = 0 iff l splits in K'.  Frob sends
    e_h to e_(h+g); on an orbit of length two the return trip carries the
    value of the character at the degree-two prime.
    """
    K, K2 = chi.K, chi2.K
    for c in (chi, chi2):
        if c.K.split_type(ell) == "ramified" or c.modulus.norm % ell == 0:
            raise ValueError("l ramified or dividing the conductor")
    g = (0 if K.split_type(ell) == "split" else 1, 0 if K2.split_type(ell) == "split" else 1)
    zero = embed(Val.rational(0), K)
    one = embed(Val.rational(1), K)
    idx = [(0, 0), (0, 1), (1, 0), (1, 1)]
    M = [[zero] * 4 for _ in range(4)]

    def prime(F, a):
        P = F.primes_above(ell)[0]
        return P.conjugate() if a else P

    def val(c, I):
        return embed(c(I), c.K)

    if g == (0, 0):
        for j, (a, b) in enumerate(idx):
            M[j][j] = val(chi, prime(K, a)) * val(chi2, prime(K2, b))
        return M
    lk, lk2 = K.principal((ell, 0)), K2.principal((ell, 0))
    seen = set()
    for j, h in enumerate(idx):
        if h in seen:
            continue
        h2 = ((h[0] + g[0]) % 2, (h[1] + g[1]) % 2)
        seen |= {h, h2}
        if g == (0, 1):
            x = val(chi, prime(K, h[0])) ** 2 * val(chi2, lk2)
        elif g == (1, 0):
            x = val(chi, lk) * val(chi2, prime(K2, h[1])) ** 2
        else:
            x = val(chi, lk) * val(chi2, lk2)
        k = idx.index(h2)
        M[k][j] = one
        M[j][k] = x
    return M


def induced_charpoly(chi, chi2, ell: int, embed=complex_embed):
    M = induced_matrix_F(chi, chi2, ell, embed)
    return EulerFactor(charpoly_of_matrix(M, embed(Val.rational(1), chi.K)))


# the Euler factors P_l


def explicit_factor(eigenvalue, psi_l, diamond, omega_l, i: int):
    """1 - T'(l) psi(l) omega^i(l) X + <l^-1> psi(l)^2 omega^2i(l) X^2 with
    T'(l) and <l^-1> already specialized."""
    c = psi_l * omega_l**i
    return EulerFactor([c * 0 + 1, -(eigenvalue * c), diamond * c * c])


def omega_avatar(ell, p, N):
    return teichmuller(PadicNumber(p, N, ell))


def euler_factor_P(psi, psi2, i: int, L, p: int, form: str = "explicit", N: int = 20, theta2=None):
    """P_l for the pair (psi, psi2) at a split prime L of K, as p-adic avatars.

    The explicit form specializes T'(l) to the eigenvalue a_l of theta_psi2
    and <l^-1> to eps_psi2(l) l; the determinant form is the characteristic
    polynomial of psi(L) omega^i(l) Frob_l on Ind_K'^Q psi2.
    """
    K = psi.K
    ell = L.norm
    if K.split_type(ell) != "split" or not any(L == P for P in K.primes_above(ell)):
        raise ValueError("L must be a split prime of degree one")
    if gcd(ell, psi.level() * psi2.level() * p) != 1:
        raise ValueError("l must be coprime to the conductors and p")
    c = psi(L).to_padic(p, N, K) * omega_avatar(ell, p, N) ** i
    if form == "determinant":
        return induced_charpoly_K(psi2, ell, padic_embed(p, N), scale=c)
    if form != "explicit":
        raise ValueError(f"unknown form: {form}")
    if theta2 is not None and theta2.bound >= ell:
        a = theta2[ell]
    else:
        a = Val.rational(0)
        for I in ideals_of_norm(psi2.K, ell):
            a = a + psi2(I)
    eig = a.to_padic(p, N, psi2.K)
    diamond = psi2.eps_psi(ell).to_padic(p, N, psi2.K) * ell
    return explicit_factor(eig, psi(L).to_padic(p, N, K), diamond, omega_avatar(ell, p, N), i)
