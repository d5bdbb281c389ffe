"""Algebraic Hecke characters of imaginary quadratic fields.

A character of modulus f and infinity type (k, 0) is fixed by a finite
character eps of (O/f)^x with eps(u) u^k = 1 for every unit u; on
principal ideals psi((alpha)) = alpha^k eps(alpha).  When the class number
is larger than one, values on a set of class-group generating primes q_j
are adjoined as radicals x_j with x_j^o_j = psi(q_j^o_j).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .padic import PadicNumber, hensel_nth_root, one_unit_projection
from .quadratic import (
    QuadField, QuadIdeal, ResidueUnits, class_group, kronecker, principal_generator,
    ray_class_group, degree_one_primes, small_primes,
)
from .values import Val, Radical, iota_p


def ideal_lcm(I: QuadIdeal, J: QuadIdeal) -> QuadIdeal:
    exps = {}
    for P, e in I.factorization() + J.factorization():
        exps[P] = max(exps.get(P, 0), e)
    out = I.K.unit_ideal()
    for P, e in exps.items():
        out = out * P**e
    return out


def eps_K(K: QuadField, a: int) -> int:
    """The quadratic character of K on integers."""
    if a < 0:
        return -eps_K(K, -a)
    return kronecker(K.disc, a)


class HeckeCharacter:
    """Common interface: K, modulus, k, evaluate(ideal) -> Val."""

    name = "psi"

    def evaluate(self, I: QuadIdeal) -> Val:
        raise NotImplementedError

    def __call__(self, I):
        return self.evaluate(I)

    def is_coprime(self, I):
        return I.is_coprime(self.modulus)

    def _require_coprime(self, I):
        if not self.is_coprime(I):
            raise ValueError("ideal not coprime to modulus")

    def level(self):
        return self.modulus.norm * self.K.D

    def conjugate(self):
        return ConjugateCharacter(self)

    def twist(self, lam):
        return TwistedCharacter(self, lam)

    def eps_psi(self, a: int) -> Val:
        """Nebentypus a -> psi((a))/a^k * eps_K(a)."""
        if gcd(a, self.level()) != 1:
            raise ValueError("argument not coprime to the level")
        v = self.evaluate(self.K.principal((a, 0)))
        return v * Fraction(1, a**self.k) * eps_K(self.K, a)

    def avatar(self, I, p, N=1):
        """p-adic image of the value at I, via the prime fixed by iota_p."""
        return self.evaluate(I).to_padic(p, N, self.K)

    def prime_values(self, bound):
        return [(P, self.evaluate(P)) for P in degree_one_primes(self.K, bound) if self.is_coprime(P)]


class AlgebraicHeckeCharacter(HeckeCharacter):
    def __init__(self, K: QuadField, modulus: QuadIdeal, k: int, eps, name="psi", check=True):
        if k < 0:
            raise ValueError("infinity type must have k >= 0")
        self.K, self.modulus, self.k, self.name = K, modulus, k, name
        self._eps_fn = eps
        self._eps_cache = {}
        self._cache = {}
        self._section = None
        if check:
            self.check_eps()

    @property
    def infinity_type(self):
        return (self.k, 0)

    def eps(self, alpha) -> Val:
        r = self.modulus.residue(alpha)
        if r not in self._eps_cache:
            if not self.modulus.is_coprime_elem(r):
                raise ValueError("element not coprime to modulus")
            self._eps_cache[r] = self._eps_fn(r)
        return self._eps_cache[r]

    def principal_value(self, alpha) -> Val:
        return Val.from_quad(self.K, alpha) ** self.k * self.eps(alpha)

    def check_eps(self):
        K, m = self.K, self.modulus
        for u in K.units():
            if not (self.eps(u) * Val.from_quad(K, u) ** self.k) == 1:
                raise ValueError(f"eps(u) u^k != 1 for unit {u}")
        ru = ResidueUnits(m)
        gens = ru.enum.generators
        for x in ru.enum:
            ex = self.eps(x)
            for g in gens:
                if not self.eps(ru.mul(x, g)) == ex * self.eps(g):
                    raise ValueError("eps is not multiplicative on (O/f)^x")

    def _build_section(self):
        K = self.K
        cl = class_group(K)
        sec = []
        for j, (o, form) in enumerate(zip(cl.group.invariants, cl.generator_forms())):
            q = _prime_in_class(K, cl, form, self.modulus.norm)
            beta = principal_generator(q**o)
            c = self.principal_value(beta)
            rad = Radical(f"g{j + 1}[{c.text()}]", o, c)
            ell = q.norm
            inv = pow(ell, -1, self.modulus.norm) if self.modulus.norm > 1 else 1
            # 1/psi((ell)) = ell^-k eps(ell^-1)
            inv_psi_ell = self.eps((inv, 0)) * Fraction(1, ell**self.k)
            sec.append((q, q.conjugate(), Val.radical(rad), inv_psi_ell))
        self._section = (cl, sec)

    def evaluate(self, I: QuadIdeal) -> Val:
        if I in self._cache:
            return self._cache[I]
        self._require_coprime(I)
        if class_group(self.K).h == 1:
            val = self.principal_value(principal_generator(I))
        else:
            if self._section is None:
                self._build_section()
            cl, sec = self._section
            coords = cl.dlog(I)
            J = I
            for a, (_, qbar, _, _) in zip(coords, sec):
                if a:
                    J = J * qbar**a
            gamma = principal_generator(J)
            val = self.principal_value(gamma)
            for a, (_, _, x, inv) in zip(coords, sec):
                if a:
                    val = val * (x * inv) ** a
        self._cache[I] = val
        return val

    def twisted_by(self, lam: "RayCharacter", name=None):
        """The character psi * lam rebuilt from its own finite part on (O/f')^x.

        Needs class number one; f' is the modulus of lam, a multiple of f.
        """
        if class_group(self.K).h != 1:
            raise ValueError("twisted_by needs class number one")
        big = lam.modulus
        if not self.modulus.divides(big):
            raise ValueError("twist modulus must be a multiple of the character modulus")

        def eps2(r):
            return self.eps(r) * lam.principal_value(r)

        return AlgebraicHeckeCharacter(self.K, big, self.k, eps2, name or f"{self.name}*{lam.name}")


def _prime_in_class(K, cl, form, avoid_norm):
    ell = 2
    while True:
        ell += 1
        if any(ell % q == 0 for q in range(2, int(ell**0.5) + 1)):
            continue
        if K.split_type(ell) != "split" or avoid_norm % ell == 0:
            continue
        for P in K.primes_above(ell):
            if cl.form_of(P) == form:
                return P


class ConjugateCharacter(HeckeCharacter):
    def __init__(self, base):
        self.base = base
        self.K, self.k = base.K, base.k
        self.modulus = base.modulus.conjugate()
        self.name = base.name + "^c"

    def evaluate(self, I):
        self._require_coprime(I)
        return self.base.evaluate(I.conjugate())

    def conjugate(self):
        return self.base


class TwistedCharacter(HeckeCharacter):
    def __init__(self, base, lam):
        if base.K != lam.K:
            raise ValueError("characters over different fields")
        self.base, self.lam = base, lam
        self.K, self.k = base.K, base.k + lam.k
        self.modulus = ideal_lcm(base.modulus, lam.modulus)
        self.name = f"{base.name}*{lam.name}"

    def evaluate(self, I):
        self._require_coprime(I)
        return self.base.evaluate(I) * self.lam.evaluate(I)


class RayCharacter(HeckeCharacter):
    """Finite-order character of a ray class group, zeta-valued."""

    def __init__(self, G, c, name="eta"):
        self.G = G
        self.K = G.K
        self.modulus = G.modulus
        self.k = 0
        self.c = tuple(int(x) % n for x, n in zip(c, G.invariants))
        if len(self.c) != len(G.invariants):
            raise ValueError("character vector has the wrong length")
        self.name = name
        m = 1
        for x, n in zip(self.c, G.invariants):
            o = n // gcd(x, n)
            m = m * o // gcd(m, o)
        self.order = m

    def exponent(self, g):
        e = sum(Fraction(x * y, n) for x, y, n in zip(self.c, g, self.G.invariants))
        return int(e * self.order) % self.order

    def value_on_class(self, g):
        return Val.zeta(self.order, self.exponent(g)) if self.order > 1 else Val.rational(1)

    def evaluate(self, I):
        self._require_coprime(I)
        return self.value_on_class(self.G.artin_map(I))

    def principal_value(self, alpha):
        return self.value_on_class(self.G.principal_class(alpha))

    def inverse(self):
        return RayCharacter(self.G, tuple(-x for x in self.c), self.name + "^-1")

    def is_trivial(self):
        return self.order == 1


def ray_characters(G, p=None):
    """All characters of G (or those of p-power order)."""
    out = [()]
    for n in G.invariants:
        out = [c + (x,) for c in out for x in range(n)]
    chars = [RayCharacter(G, c) for c in out]
    if p is not None:
        def is_p_power(m):
            while m % p == 0:
                m //= p
            return m == 1
        chars = [x for x in chars if is_p_power(x.order)]
    return chars


# constructors


def unit_normalized(K: QuadField, modulus: QuadIdeal, k: int = 1, name="psi"):
    """eps(alpha) = u^-k where alpha = u mod f for a unit u.

    Needs the units to map bijectively onto (O/f)^x.
    """
    table = {}
    for u in K.units():
        r = modulus.residue(u)
        if r in table:
            raise ValueError("units not distinct modulo f")
        table[r] = Val.from_quad(K, K.conj(u)) ** k
    ru = ResidueUnits(modulus)
    if ru.order != len(table):
        raise ValueError("units do not cover (O/f)^x")

    def eps(r):
        return table[r]

    return AlgebraicHeckeCharacter(K, modulus, k, eps, name)


def legendre_type(K: QuadField, k: int = 1, name="psi"):
    """Modulus sqrt(disc) for prime |disc|; eps = Legendre symbol mod |disc|."""
    D = K.D
    if K.disc % 4 == 0 or any(D % q == 0 for q in range(2, int(D**0.5) + 1)):
        raise ValueError("legendre_type needs prime |disc|")
    f = K.primes_above(D)[0]

    def eps(r):
        return Val.rational(kronecker(r[0], D))

    return AlgebraicHeckeCharacter(K, f, k, eps, name)


def from_table(K, modulus, k, table, name="psi"):
    """eps given on every residue in (O/f)^x (keys are canonical residues)."""
    def eps(r):
        try:
            return table[r]
        except KeyError:
            raise ValueError(f"eps table missing residue {r}") from None

    return AlgebraicHeckeCharacter(K, modulus, k, eps, name)


def trivial_character(K, name="1"):
    return AlgebraicHeckeCharacter(K, K.unit_ideal(), 0, lambda r: Val.rational(1), name)


# the p-adic character eta


class EtaCharacter:
    """eta_p(a) = r(<iota_p(alpha)>) with alpha a generator of a^h.

    r is the homomorphism 1+pZ_p -> omega^Z_p with r(1+p) = omega and
    omega^h = 1+p; on 1+pZ_p it is the unique h-th root in 1+pZ_p.
    """

    infinity_type = (1, 0)

    def __init__(self, K: QuadField, p: int, N: int = 20):
        if K.split_type(p) != "split":
            raise ValueError("p must split in K")
        h = class_group(K).h
        if h % p == 0:
            raise ValueError("extension scalars required")
        self.K, self.p, self.N, self.h = K, p, N, h
        self.modulus = K.primes_above(p)[0]  # the prime sent into pZ_p by iota_p
        self.omega = hensel_nth_root(PadicNumber(p, N, 1 + p), h, 1)
        self._cache = {}

    def r(self, x: PadicNumber) -> PadicNumber:
        if (x.residue - 1) % self.p:
            raise ValueError("r is defined on 1 + pZ_p")
        return hensel_nth_root(x, self.h, 1)

    def evaluate(self, I: QuadIdeal) -> PadicNumber:
        if I in self._cache:
            return self._cache[I]
        if not I.is_coprime(self.modulus):
            raise ValueError("ideal not coprime to modulus")
        alpha = principal_generator(I**self.h)
        val = self.r(one_unit_projection(iota_p(self.K, alpha, self.p, self.N)))
        self._cache[I] = val
        return val

    __call__ = evaluate

    def layer_group(self, r: int = 1):
        """Ray class group mod p-part^(r+1); eta mod p^(r+1) factors through it."""
        return ray_class_group(self.K, self.modulus ** (r + 1))

    def check_torsion_trivial(self, r: int = 1, bound: int = 400):
        """eta = 1 mod p^(r+1) on primes whose layer class has order prime to p.

        Returns (ok, number of classes of order prime to p that were hit, total
        such classes).
        """
        G = self.layer_group(r)
        mod = self.p ** (r + 1)
        good = {g for g in G.group.elements() if G.group.element_order(g) % self.p}
        hit = set()
        for P in degree_one_primes(self.K, bound):
            if not P.is_coprime(G.modulus):
                continue
            g = G.artin_map(P)
            if g in good:
                hit.add(g)
                if (self.evaluate(P).residue - 1) % mod:
                    return False, len(hit), len(good)
        return True, len(hit), len(good)


def construct_eta(K: QuadField, p: int, N: int = 20) -> EtaCharacter:
    return EtaCharacter(K, p, N)


# residual hypotheses


def _residual(chi, I, p):
    """chi(I) reduced mod p, as an integer in [1, p)."""
    if chi.k != 0:
        raise ValueError("residual comparison implemented for finite-order components")
    v = chi.evaluate(I).to_padic(p, 1, chi.K).residue
    if v == 0:
        raise ValueError("residual value vanishes")
    return v


class HypReport:
    def __init__(self):
        self.conditions = {}  # name -> (holds, witness text)

    def set(self, name, holds, witness):
        self.conditions[name] = (holds, witness)

    @property
    def all_hold(self):
        return all(h for h, _ in self.conditions.values())

    def lines(self):
        out = []
        for name, (h, w) in self.conditions.items():
            out.append(f"cond.{name}={'pass' if h else 'fail'}")
            out.append(f"cond.{name}.witness={w}")
        return out


def hyp_a_check(chi, chi2, i: int, p: int, bound: int = 2000) -> HypReport:
    """Residual conditions for theta = chi_p chi2_p omega^i over F = K K'.

    sigma fixes K and conjugates the K' side; sigma' does the reverse.  On
    a degree-one prime P of F over ell matching (l, l'), theta(P) is
    chi(l) chi2(l') ell^i mod p and theta^sigma(P) = chi(l) chi2(conj l') ell^i.

    (i) kernels on G_F(mu_p): compared on Frobenius of degree-one P with
        ell = 1 mod p; a prime where exactly one side is 1 proves them
        different, otherwise the report is a bounded certificate of equality.
    (ii) theta|D_p1 vs theta^sigma|D_p1: chi2(p') vs chi2(conj p') mod p.
    (iii) theta|D_p1 vs theta^sigma'|D_p1: chi(p) vs chi(conj p) mod p.
    Also reported: ker(rho^sigma) != ker(rho) for rho = chi chi2, sampled
    over all degree-one primes.
    """
    K, K2 = chi.K, chi2.K
    if K == K2:
        raise ValueError("the two quadratic fields must differ")
    for c, F in ((chi, K), (chi2, K2)):
        if c.modulus.norm % p == 0:
            raise ValueError("conductor not coprime to p")
        if F.split_type(p) != "split":
            raise ValueError("p must split in both fields")
    rep = HypReport()

    def pairs(ell):
        return [(a, b) for a in K.primes_above(ell) for b in K2.primes_above(ell)]

    good = [ell for ell in small_primes(bound)
            if K.split_type(ell) == "split" and K2.split_type(ell) == "split"
            and (chi.modulus.norm * chi2.modulus.norm * p) % ell]
    # (i)
    witness = None
    for ell in good:
        if ell % p != 1:
            continue
        for a, b in pairs(ell):
            v1 = _residual(chi, a, p) * _residual(chi2, b, p) % p
            v2 = _residual(chi, a, p) * _residual(chi2, b.conjugate(), p) % p
            if (v1 == 1) != (v2 == 1):
                witness = f"ell={ell},theta={v1},theta_sigma={v2}"
                break
        if witness:
            break
    rep.set("i", witness is not None, witness or f"none up to {bound}")
    P, Pb = K.primes_above(p)
    Q, Qb = K2.primes_above(p)
    x, y = _residual(chi2, Q, p), _residual(chi2, Qb, p)
    rep.set("ii", x != y, f"chi2(p')={x},chi2(conj p')={y}")
    x, y = _residual(chi, P, p), _residual(chi, Pb, p)
    rep.set("iii", x != y, f"chi(p)={x},chi(conj p)={y}")
    # kernel condition on rho = chi chi2 with exact values
    witness = None
    for ell in good:
        for a, b in pairs(ell):
            r1 = chi.evaluate(a) * chi2.evaluate(b)
            r2 = chi.evaluate(a) * chi2.evaluate(b.conjugate())
            if (r1 == 1) != (r2 == 1):
                witness = f"ell={ell}"
                break
        if witness:
            break
    rep.set("kernel_rho", witness is not None, witness or f"none up to {bound}")
    return rep


# delta_c


def delta_invertibility(c: int, e_c: int, p: int, tau_order: int = 1) -> bool:
    """delta_c = c^2 - e(c) tau_c is a unit in the group ring of Delta.

    Over the residue field this holds iff c^2 != e(c) lambda(tau_c) for
    every character lambda of Delta, i.e. iff (c^2/e(c))^o != 1 mod p with
    o the order of tau_c (its p-part acts trivially in characteristic p).
    """
    if c % p == 0 or e_c % p == 0:
        raise ValueError("c and e(c) must be prime to p")
    x = c * c * pow(e_c, -1, p) % p
    return pow(x, tau_order, p) != 1


def _residual_nebentypus(psi, a, p):
    v = psi.eps_psi(a)
    return v.to_padic(p, 1, psi.K).residue


class DeltaSearch:
    def __init__(self, d, certificate, hypc, obstruction):
        self.d = d
        self.certificate = certificate
        self.hypc = hypc
        self.obstruction = obstruction

    def lines(self):
        return [
            f"hypc={'holds' if self.hypc else 'violated'}",
            f"witness_d={self.d if self.d is not None else 'none'}",
            f"certificate={self.certificate}",
            f"obstruction={self.obstruction}",
        ]


def find_invertible_d(psi, psi2, i: int, p: int, bound: int = 50, tau_order=None) -> DeltaSearch:
    """Least d < bound, coprime to 6 N N' p, with delta_d invertible.

    e(d) = eps_psi eps_psi2 omega^(-2i)(d); omega(d) = d mod p residually.
    (hypc) asks eps_psi eps_psi2 != omega^(2+2i); it is decided completely by
    checking every residue class modulo the product of the levels and p.
    """
    N1, N2 = psi.level(), psi2.level()
    L = N1 * N2 * p
    bad = 6 * L

    def e(d):
        return _residual_nebentypus(psi, d, p) * _residual_nebentypus(psi2, d, p) * pow(d, -2 * i, p) % p

    # (hypc): compare the two residual characters on all classes mod L
    hyp_witness = None
    for a in range(1, L + 1):
        if gcd(a, L) != 1:
            continue
        lhs = _residual_nebentypus(psi, a, p) * _residual_nebentypus(psi2, a, p) % p
        if lhs != pow(a, 2 + 2 * i, p):
            hyp_witness = a
            break
    hypc = hyp_witness is not None
    for d in range(2, bound):
        if gcd(d, bad) != 1:
            continue
        o = tau_order(d) if tau_order else 1
        if delta_invertibility(d, e(d), p, o):
            cert = f"d^2-e(d)={(d * d - e(d)) % p} mod {p}"
            return DeltaSearch(d, cert, hypc, "none")
    if hypc and tau_order is None:
        raise RuntimeError("scan exhausted while (hypc) holds")
    obstruction = "eps_psi*eps_psi2 = omega^(2+2i) mod p on all classes" if not hypc else "Delta characters"
    return DeltaSearch(None, "none", hypc, obstruction)
