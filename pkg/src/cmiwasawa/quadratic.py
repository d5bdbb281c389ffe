"""Imaginary quadratic fields: elements, ideals, forms, class and ray class groups.

Elements of O_K are pairs (x, y) meaning x + y*w, where w = sqrt(disc/4)
when 4 | disc and w = (1 + sqrt(disc))/2 otherwise.  Ideals are stored in
Hermite normal form: the Z-basis {a, b + c*w} with 0 <= b < a and c | a, b.
"""

from __future__ import annotations

import re
from functools import lru_cache
from itertools import product
from math import gcd, isqrt

from sympy import factorint
from sympy.ntheory import sqrt_mod

from .abelian import AbelianGroup, EnumeratedGroup


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a | n) for n > 0."""
    if n == 1:
        return 1
    out = 1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            out = -out
    if n == 1:
        return out
    # Jacobi for odd n
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                out = -out
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            out = -out
        a %= n
    return out if n == 1 else 0


def is_fundamental(disc: int) -> bool:
    if disc >= 0:
        return False
    if disc % 4 == 1:
        return all(e == 1 for e in factorint(-disc).values())
    if disc % 4 == 0:
        m = disc // 4
        if m % 4 not in (2, 3):
            return False
        return all(e == 1 for e in factorint(-m).values())
    return False


class QuadField:
    def __init__(self, disc: int):
        if not is_fundamental(disc):
            raise ValueError(f"{disc} is not a negative fundamental discriminant")
        self.disc = disc
        self.D = -disc
        if disc % 4 == 0:
            self.t, self.n = 0, -disc // 4  # w^2 = t*w - n
        else:
            self.t, self.n = 1, (1 - disc) // 4
        self._units = None

    def __eq__(self, other):
        return isinstance(other, QuadField) and other.disc == self.disc

    def __hash__(self):
        return hash(("QuadField", self.disc))

    def __repr__(self):
        return f"QuadField({self.disc})"

    # element arithmetic on pairs
    def mul(self, a, b):
        x1, y1 = a
        x2, y2 = b
        bd = y1 * y2
        return (x1 * x2 - self.n * bd, x1 * y2 + x2 * y1 + self.t * bd)

    def add(self, a, b):
        return (a[0] + b[0], a[1] + b[1])

    def neg(self, a):
        return (-a[0], -a[1])

    def conj(self, a):
        x, y = a
        return (x + self.t * y, -y)

    def norm(self, a):
        x, y = a
        return x * x + self.t * x * y + self.n * y * y

    def trace(self, a):
        x, y = a
        return 2 * x + self.t * y

    def power(self, a, e):
        out = (1, 0)
        base = a
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def to_complex(self, a):
        x, y = a
        s = complex(0, (self.D) ** 0.5)
        w = s / 2 if self.t == 0 else (1 + s) / 2
        return x + y * w

    def sqrt_disc(self):
        """sqrt(disc) as an element: 2w - t."""
        return (-self.t, 2)

    def units(self):
        if self._units is None:
            if self.D == 4:
                self._units = [(1, 0), (0, 1), (-1, 0), (0, -1)]
            elif self.D == 3:
                # w = (1+sqrt(-3))/2 is a primitive 6th root of unity
                u, w = [(1, 0)], (0, 1)
                for _ in range(5):
                    u.append(self.mul(u[-1], w))
                self._units = u
            else:
                self._units = [(1, 0), (-1, 0)]
        return self._units

    @property
    def w_count(self):
        return len(self.units())

    def split_type(self, ell: int) -> str:
        k = kronecker(self.disc, ell)
        return {1: "split", -1: "inert", 0: "ramified"}[k]

    def min_poly_roots(self, ell: int):
        """Sorted roots of x^2 - t x + n mod ell."""
        if ell == 2:
            return [r for r in range(2) if (r * r - self.t * r + self.n) % 2 == 0]
        disc = (self.t * self.t - 4 * self.n) % ell
        if disc == 0:
            sq = [0]
        else:
            sq = sqrt_mod(disc, ell, all_roots=True) or []
        inv2 = pow(2, -1, ell)
        return sorted({(self.t + s) * inv2 % ell for s in sq})

    def primes_above(self, ell: int):
        """Prime ideals above ell; for split ell the first has w = smallest root."""
        roots = self.min_poly_roots(ell)
        if not roots:
            return [QuadIdeal.from_generators(self, [(ell, 0)])]
        return [QuadIdeal.from_generators(self, [(ell, 0), (-r, 1)]) for r in roots]

    def ideal(self, text: str) -> QuadIdeal:
        return QuadIdeal.parse(self, text)

    def unit_ideal(self):
        return QuadIdeal(self, 1, 0, 1)

    def principal(self, a):
        return QuadIdeal.from_generators(self, [a])

    def ideals_of_norm(self, n: int):
        return ideals_of_norm(self, n)


def _hnf2(vectors):
    """HNF (a, b, c) of the Z-span of 2-vectors, basis rows [a, 0], [b, c]."""
    vecs = [list(v) for v in vectors if v[0] or v[1]]
    # clear the second coordinate down to one vector
    c_vec = None
    zero_y = []
    for v in vecs:
        if v[1] == 0:
            zero_y.append(v[0])
            continue
        if c_vec is None:
            c_vec = v
            continue
        u = c_vec
        while v[1]:
            q = u[1] // v[1]
            u, v = v, [u[0] - q * v[0], u[1] - q * v[1]]
        c_vec = u
        zero_y.append(v[0])
    if c_vec is None:
        raise ValueError("vectors do not span a full lattice")
    if c_vec[1] < 0:
        c_vec = [-c_vec[0], -c_vec[1]]
    a = 0
    for x in zero_y:
        a = gcd(a, x)
    if a == 0:
        raise ValueError("vectors do not span a full lattice")
    return a, c_vec[0] % a, c_vec[1]


class QuadIdeal:
    __slots__ = ("K", "a", "b", "c")

    def __init__(self, K: QuadField, a: int, b: int, c: int):
        self.K, self.a, self.b, self.c = K, a, b, c

    @classmethod
    def from_generators(cls, K, gens):
        """Ideal generated over O_K by the given elements."""
        w = (0, 1)
        vecs = []
        for g in gens:
            vecs.append(tuple(g))
            vecs.append(K.mul(g, w))
        a, b, c = _hnf2(vecs)
        return cls(K, a, b, c)

    @classmethod
    def parse(cls, K, text):
        """Literal "(a, b+w*c)"; also "(a)" for a rational ideal."""
        s = text.replace(" ", "")
        m = re.fullmatch(r"\((-?\d+),(-?\d+)?([+-])?w(?:\*(\d+))?\)", s)
        if m:
            a = int(m.group(1))
            b = int(m.group(2) or 0)
            sign = -1 if m.group(3) == "-" else 1
            c = sign * int(m.group(4) or 1)
            return cls.from_generators(K, [(a, 0), (b, c)])
        m = re.fullmatch(r"\((-?\d+),(-?\d+)\+(-?\d+)\*w\)", s)
        if m:
            return cls.from_generators(K, [(int(m.group(1)), 0), (int(m.group(2)), int(m.group(3)))])
        m = re.fullmatch(r"\((-?\d+)\)", s)
        if m:
            return cls.from_generators(K, [(int(m.group(1)), 0)])
        raise ValueError(f"cannot parse ideal literal {text!r}")

    def literal(self):
        return f"({self.a}, {self.b}+w*{self.c})"

    def __repr__(self):
        return self.literal()

    @property
    def norm(self):
        return self.a * self.c

    def basis(self):
        return [(self.a, 0), (self.b, self.c)]

    def __mul__(self, other):
        gens = [self.K.mul(x, y) for x in self.basis() for y in other.basis()]
        return QuadIdeal.from_generators(self.K, gens)

    def __pow__(self, e):
        out = self.K.unit_ideal()
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        return isinstance(other, QuadIdeal) and (self.K, self.a, self.b, self.c) == (other.K, other.a, other.b, other.c)

    def __hash__(self):
        return hash((self.K.disc, self.a, self.b, self.c))

    def __lt__(self, other):
        return (self.norm, self.a, self.b, self.c) < (other.norm, other.a, other.b, other.c)

    def conjugate(self):
        return QuadIdeal.from_generators(self.K, [self.K.conj(v) for v in self.basis()])

    def contains(self, x):
        X, Y = x
        if Y % self.c:
            return False
        return (X - self.b * (Y // self.c)) % self.a == 0

    def divides(self, other):
        """self | other, i.e. other is contained in self."""
        return all(self.contains(v) for v in other.basis())

    def is_unit(self):
        return self.norm == 1

    def residue(self, x):
        """Canonical representative of x mod self."""
        X, Y = x
        y0 = Y % self.c
        k = (Y - y0) // self.c
        return ((X - k * self.b) % self.a, y0)

    def residues(self):
        return [(x, y) for y in range(self.c) for x in range(self.a)]

    def prime_factors(self):
        """Distinct prime ideals dividing self."""
        out = []
        for ell in factorint(self.norm):
            for P in self.K.primes_above(ell):
                if P.divides(self):
                    out.append(P)
        return out

    def factorization(self):
        """List of (prime ideal, exponent)."""
        out = []
        rest = self
        for P in self.prime_factors():
            e = 0
            while P.divides(rest):
                rest = rest.divide_by(P)
                e += 1
            out.append((P, e))
        return out

    def divide_by(self, P):
        """Exact quotient self / P for a prime ideal P dividing self."""
        # self * conj(P) = N(P) * (self / P)
        prod = self * P.conjugate()
        m = P.norm
        gens = [(x // m, y // m) for x, y in prod.basis()]
        if any(x % m or y % m for x, y in prod.basis()):
            raise ValueError("not divisible")
        return QuadIdeal.from_generators(self.K, gens)

    def is_coprime(self, other):
        return gcd(self.norm, other.norm) == 1 or not any(
            P.divides(other) for P in self.prime_factors())

    def is_coprime_elem(self, x):
        return all(not P.contains(x) for P in self.prime_factors())


@lru_cache(maxsize=None)
def _prime_power_ideals(K, ell, e):
    primes = K.primes_above(ell)
    st = K.split_type(ell)
    if st == "split":
        P, Q = primes
        return tuple(P**i * Q ** (e - i) for i in range(e + 1))
    if st == "inert":
        return (primes[0] ** (e // 2),) if e % 2 == 0 else ()
    return (primes[0] ** e,)


def ideals_of_norm(K: QuadField, n: int):
    if n < 1:
        raise ValueError("norm must be positive")
    parts = [_prime_power_ideals(K, ell, e) for ell, e in sorted(factorint(n).items())]
    out = []
    for combo in product(*parts):
        I = K.unit_ideal()
        for J in combo:
            I = I * J
        out.append(I)
    return sorted(out)


# binary quadratic forms


class BinaryQF:
    __slots__ = ("a", "b", "c")

    def __init__(self, a, b, c):
        self.a, self.b, self.c = a, b, c

    @property
    def disc(self):
        return self.b * self.b - 4 * self.a * self.c

    def key(self):
        return (self.a, self.b, self.c)

    def __eq__(self, other):
        return isinstance(other, BinaryQF) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"BinaryQF{self.key()}"

    def is_reduced(self):
        a, b, c = self.key()
        return -a < b <= a <= c and not (a == c and b < 0)

    def reduced(self):
        return reduce_form(self.a, self.b, self.c)[0]

    def inverse(self):
        return BinaryQF(self.a, -self.b, self.c).reduced()

    def compose(self, other):
        return BinaryQF(*_compose(self.key(), other.key())).reduced()

    def __mul__(self, other):
        return self.compose(other)


def reduce_form(a, b, c, basis=None):
    """SL2(Z)-reduce a positive definite form, carrying an optional basis.

    The basis (u, v) is transformed so the form stays N(x u + y v)/scale.
    Each basis entry must support scalar mult and addition via the callable
    pair stored in basis[2].
    """
    u = v = ops = None
    if basis is not None:
        u, v, ops = basis
    while True:
        # translate b into (-a, a]
        k = (a - b) // (2 * a)
        if k:
            c = a * k * k + b * k + c
            b = b + 2 * k * a
            if ops:
                v = ops(v, u, k)
        if a > c or (a == c and b < 0):
            a, b, c = c, -b, a
            if ops:
                u, v = v, ops((0, 0), u, -1)
            continue
        break
    return BinaryQF(a, b, c), u, v


def _compose(f1, f2):
    a1, b1, c1 = f1
    a2, b2, c2 = f2
    if a1 > a2:
        a1, b1, c1, a2, b2, c2 = a2, b2, c2, a1, b1, c1
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, u, v = _xgcd(s, d)
        x2, y2 = u, -v
    v1, v2 = a1 // d1, a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (c2 * d1 + r * (b2 + v2 * r)) // v1
    return a3, b3, c3


def _xgcd(a, b):
    """(g, x, y) with a x + b y = g >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def reduced_forms(disc):
    out = []
    amax = isqrt(-disc // 3) + 1
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b - disc) % 2:
                continue
            num = b * b - disc
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (a == c and b < 0):
                continue
            if gcd(gcd(a, b), c) != 1:
                continue
            out.append(BinaryQF(a, b, c))
    return out


def _lin(K):
    # v + k*u on element pairs
    def ops(v, u, k):
        return (v[0] + k * u[0], v[1] + k * u[1])
    return ops


def ideal_form(I: QuadIdeal, with_basis=False):
    """Reduced norm form N(x alpha + y beta)/N(I) on the HNF basis."""
    K = I.K
    alpha, beta = I.basis()
    nI = I.norm
    A = K.norm(alpha) // nI
    B = (K.trace(K.mul(alpha, K.conj(beta)))) // nI
    C = K.norm(beta) // nI
    f, u, v = reduce_form(A, B, C, (alpha, beta, _lin(K)))
    return (f, u, v) if with_basis else f


def principal_generator(I: QuadIdeal):
    """A generator of I if I is principal, else None."""
    f, u, _ = ideal_form(I, with_basis=True)
    if f.a != 1:
        return None
    assert I.K.norm(u) == I.norm
    return u


class ClassGroup:
    def __init__(self, K: QuadField):
        self.K = K
        self.forms = reduced_forms(K.disc)
        self.h = len(self.forms)
        ident = self.identity_form()
        gens = []
        covered = {ident}
        for f in self.forms:
            if f in covered:
                continue
            gens.append(f)
            covered = _closure(covered, gens, lambda x, y: x * y)
        self.generators = gens
        self.enum = EnumeratedGroup(ident, gens, lambda x, y: x * y)
        self.group = self.enum.group

    def identity_form(self):
        d = self.K.disc
        return BinaryQF(1, d % 2, (d % 2 - d) // 4)

    def form_of(self, I: QuadIdeal):
        return ideal_form(I)

    def dlog(self, I: QuadIdeal):
        return self.enum.dlog(ideal_form(I))

    def generator_forms(self):
        """Forms representing the invariant-factor basis vectors."""
        out = []
        for i in range(len(self.group.invariants)):
            target = tuple(1 if j == i else 0 for j in range(len(self.group.invariants)))
            out.append(next(f for f in self.enum if self.enum.dlog(f) == target))
        return out


def _closure(start, gens, mul):
    seen = set(start)
    frontier = list(start)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def class_group(K: QuadField) -> ClassGroup:
    return _class_group_cached(K.disc)


@lru_cache(maxsize=None)
def _class_group_cached(disc):
    return ClassGroup(QuadField(disc))


def small_primes(bound):
    sieve = bytearray([1]) * (bound + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, isqrt(bound) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(sieve[i * i::i]))
    return [i for i in range(bound + 1) if sieve[i]]


def degree_one_primes(K: QuadField, bound: int):
    """Prime ideals of prime norm ell <= bound, ordered by norm."""
    out = []
    for ell in small_primes(bound):
        if K.split_type(ell) != "inert":
            out.extend(K.primes_above(ell))
    return out


class ResidueUnits:
    """(O/m)^x as an enumerated group on canonical residue pairs."""

    def __init__(self, m: QuadIdeal):
        self.m = m
        K = m.K
        primes = m.prime_factors()
        elems = [r for r in m.residues() if all(not P.contains(r) for P in primes)]
        one = m.residue((1, 0))

        def mul(x, y):
            return m.residue(K.mul(x, y))

        self.mul = mul
        gens = []
        covered = {one}
        for r in elems:
            if r in covered:
                continue
            gens.append(r)
            covered = _closure(covered, [r], mul)
            if len(covered) == len(elems):
                break
        self.enum = EnumeratedGroup(one, gens, mul)
        assert self.enum.size == len(elems)
        self.order = len(elems)

    def vector(self, x):
        """Coordinates of x in the chosen generators."""
        return list(self.enum.vector(self.m.residue(x)))

    @property
    def k(self):
        return len(self.enum.generators)

    def relations(self):
        return self.enum.group.relations


class RayClassGroup:
    """Cl_m(K) for m = modulus * (p)^r, with the Artin map on ideals prime to m."""

    def __init__(self, K: QuadField, modulus: QuadIdeal, r: int = 0, p: int | None = None):
        if r and p is None:
            raise ValueError("p required when r > 0")
        m = modulus
        if r:
            m = m * K.principal((p**r, 0))
        self.K, self.modulus, self.base_modulus, self.r, self.p = K, m, modulus, r, p
        self.res = ResidueUnits(m)
        self.cl = class_group(K)
        kx = self.res.k
        inv = self.cl.group.invariants
        ky = len(inv)
        self.k = kx + ky
        rels = [list(rel) + [0] * ky for rel in self.res.relations()]
        for u in K.units():
            rels.append(self.res.vector(u) + [0] * ky)
        # class group generators realized by primes prime to m
        self.qprimes = []
        gen_forms = self.cl.generator_forms()
        for j, (o, form) in enumerate(zip(inv, gen_forms)):
            q = self._prime_in_class(form)
            self.qprimes.append(q)
            beta = principal_generator(q**o)
            vec = [-x for x in self.res.vector(beta)] + [0] * ky
            vec[kx + j] = o
            rels.append(vec)
        if self.k == 0:
            rels = []
        self.group = AbelianGroup(rels, self.k)
        self.orders = inv

    def _prime_in_class(self, form):
        ell = 2
        while True:
            ell += 1
            if not all(ell % q for q in range(2, isqrt(ell) + 1)):
                continue
            if self.K.split_type(ell) == "inert" or self.modulus.norm % ell == 0:
                continue
            for P in self.K.primes_above(ell):
                if self.cl.form_of(P) == form:
                    return P

    @property
    def order(self):
        return self.group.order

    @property
    def invariants(self):
        return self.group.invariants

    def artin_map(self, I: QuadIdeal):
        """Class of an ideal prime to the modulus (Frobenius at primes)."""
        if not I.is_coprime(self.modulus):
            raise ValueError("ideal not coprime to modulus")
        kx = self.res.k
        coords = self.cl.dlog(I)
        J = I
        e = []
        for a, o, q in zip(coords, self.cl.group.invariants, self.qprimes):
            ej = (-a) % o
            e.append(ej)
            if ej:
                J = J * q**ej
        gamma = principal_generator(J)
        if gamma is None:
            raise AssertionError("class group bookkeeping failed")
        vec = self.res.vector(gamma) + [-x for x in e]
        assert len(vec) == kx + len(e)
        return self.group.reduce(vec)

    def principal_class(self, alpha):
        """Class of (alpha) for alpha prime to the modulus."""
        return self.group.reduce(self.res.vector(alpha) + [0] * (self.k - self.res.k))


def ray_class_group(K, modulus, r=0, p=None) -> RayClassGroup:
    return RayClassGroup(K, modulus, r, p)
