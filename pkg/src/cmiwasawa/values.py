"""Exact values of Hecke characters.

A value lives in Q(zeta_m)[x_1, ..., x_r] / (x_j^o_j - c_j), where every c_j
is itself a value built from zeta_m and earlier radicals.  sqrt(disc) of
the quadratic field is the radical named "s" (order 2, c = disc).

Terms are keyed by (a, exps) with a the exponent of zeta_m and exps a
sorted tuple of (radical name, exponent).  Equality reduces the zeta part
modulo the m-th cyclotomic polynomial.  Equality is formal: callers avoid
towers with hidden relations (for instance zeta_4 together with sqrt(-4)).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd

import mpmath

from .padic import PadicNumber, hensel_nth_root, teichmuller

DPS = 50


@lru_cache(maxsize=None)
def cyclotomic_coeffs(m: int):
    """Integer coefficients of Phi_m, lowest degree first."""
    from sympy import Poly, cyclotomic_poly, Symbol

    x = Symbol("x")
    return tuple(int(c) for c in reversed(Poly(cyclotomic_poly(m, x), x).all_coeffs()))


class Radical:
    __slots__ = ("name", "order", "c")

    def __init__(self, name, order, c):
        self.name, self.order, self.c = name, order, c

    def __eq__(self, other):
        return isinstance(other, Radical) and (self.name, self.order) == (other.name, other.order) and self.c == other.c


class Val:
    """An element of a value ring.  Immutable by convention."""

    __slots__ = ("m", "rads", "terms")

    def __init__(self, m=1, rads=None, terms=None):
        self.m = m
        self.rads = dict(rads or {})
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    # construction
    @classmethod
    def rational(cls, q):
        return cls(1, {}, {(0, ()): Fraction(q)})

    @classmethod
    def zeta(cls, m, e=1):
        return cls(m, {}, {(e % m, ()): Fraction(1)})

    @classmethod
    def radical(cls, rad: Radical):
        v = cls(1, {rad.name: rad}, {(0, ((rad.name, 1),)): Fraction(1)})
        return v.unify_with(rad.c)[0]

    @classmethod
    def sqrt_disc(cls, disc):
        return cls.radical(Radical("s", 2, Val.rational(disc)))

    @classmethod
    def from_quad(cls, K, a):
        """x + y*w as a value, w = (t + s)/2."""
        x, y = a
        if y == 0:
            return cls.rational(x)
        s = cls.sqrt_disc(K.disc)
        return s * Fraction(y, 2) + Fraction(2 * x + K.t * y, 2)

    # ring plumbing
    def unify_with(self, other):
        """Both values re-expressed over a common ring."""
        if not isinstance(other, Val):
            other = Val.rational(other)
        if self.m == other.m and self.rads.keys() == other.rads.keys():
            return self, other
        m = self.m * other.m // gcd(self.m, other.m)
        rads = dict(self.rads)
        for name, r in other.rads.items():
            if name in rads and not (rads[name].order == r.order and rads[name].c == r.c):
                raise ValueError(f"conflicting radical {name}")
            rads[name] = r
        return self._lift(m, rads), other._lift(m, rads)

    def _lift(self, m, rads):
        if m == self.m and rads.keys() == self.rads.keys():
            return self
        f = m // self.m
        return Val(m, rads, {(a * f, ex): c for (a, ex), c in self.terms.items()})

    # arithmetic
    def __add__(self, other):
        a, b = self.unify_with(other)
        out = dict(a.terms)
        for k, v in b.terms.items():
            out[k] = out.get(k, 0) + v
        return Val(a.m, a.rads, out)

    __radd__ = __add__

    def __neg__(self):
        return Val(self.m, self.rads, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-Val._coerce(other))

    def __rsub__(self, other):
        return Val._coerce(other) + (-self)

    @staticmethod
    def _coerce(x):
        return x if isinstance(x, Val) else Val.rational(x)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Val(self.m, self.rads, {k: v * other for k, v in self.terms.items()})
        a, b = self.unify_with(other)
        out = Val(a.m, a.rads, {})
        acc = {}
        for (e1, x1), c1 in a.terms.items():
            for (e2, x2), c2 in b.terms.items():
                e = (e1 + e2) % a.m
                ex = dict(x1)
                for n, k in x2:
                    ex[n] = ex.get(n, 0) + k
                over = [(n, k) for n, k in ex.items() if k >= a.rads[n].order]
                if not over:
                    key = (e, tuple(sorted((n, k) for n, k in ex.items() if k)))
                    acc[key] = acc.get(key, 0) + c1 * c2
                    continue
                # fold x^order back into c
                term = Val(a.m, a.rads, {(e, ()): c1 * c2})
                for n, k in ex.items():
                    r = a.rads[n]
                    q, rem = divmod(k, r.order)
                    if rem:
                        term = term * Val(a.m, a.rads, {(0, ((n, rem),)): Fraction(1)})
                    for _ in range(q):
                        term = term * r.c
                out = out + term
        return out + Val(a.m, a.rads, acc)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            raise ValueError("negative powers need an explicit inverse")
        out = Val.rational(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def normal_form(self):
        """Terms with the zeta part reduced modulo Phi_m."""
        m = self.m
        if m <= 2:
            out = {}
            for (e, ex), c in self.terms.items():
                sign = -1 if (m == 2 and e == 1) else 1
                out[(0, ex)] = out.get((0, ex), 0) + sign * c
            return {k: v for k, v in out.items() if v}
        phi = cyclotomic_coeffs(m)
        deg = len(phi) - 1
        groups = {}
        for (e, ex), c in self.terms.items():
            groups.setdefault(ex, [0] * m)
            groups[ex][e] += c
        out = {}
        for ex, poly in groups.items():
            poly = list(poly)
            for i in range(len(poly) - 1, deg - 1, -1):
                c = poly[i]
                if c:
                    # Phi_m is monic: x^i = x^(i-deg) * (x^deg - Phi_m)
                    for j in range(deg + 1):
                        poly[i - deg + j] -= c * phi[j]
            for i in range(deg):
                if poly[i]:
                    out[(i, ex)] = Fraction(poly[i])
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Val.rational(other)
        if not isinstance(other, Val):
            return NotImplemented
        a, b = self.unify_with(other)
        return (a - b).is_zero()

    def __hash__(self):
        return hash(tuple(sorted(self.normal_form().items())))

    def is_zero(self):
        return not self.normal_form()

    def is_rational(self):
        nf = self.normal_form()
        return all(k == (0, ()) for k in nf)

    def rational_value(self):
        nf = self.normal_form()
        if not all(k == (0, ()) for k in nf):
            raise ValueError("value is not rational")
        return nf.get((0, ()), Fraction(0))

    # embeddings
    def to_complex(self, dps=DPS):
        with mpmath.workdps(dps):
            zeta = mpmath.expjpi(mpmath.mpf(2) / self.m) if self.m > 1 else mpmath.mpc(1)
            cache = {}
            total = mpmath.mpc(0)
            for (e, ex), c in self.terms.items():
                t = mpmath.mpc(c.numerator) / c.denominator * zeta**e
                for n, k in ex:
                    t *= _complex_root(self.rads[n], cache, dps) ** k
                total += t
            return total

    def to_padic(self, p, N, K=None):
        """Image in Z_p / p^N.  sqrt(disc) follows the prime fixed by K."""
        mod = p**N
        zeta = 1
        if self.m > 1:
            if (p - 1) % self.m:
                raise ValueError("extension scalars required")
            g = _primitive_root(p)
            zeta = pow(teichmuller(PadicNumber(p, N, g)).residue, (p - 1) // self.m, mod)
        cache = {}
        total = 0
        for (e, ex), c in self.terms.items():
            if c.denominator % p == 0:
                raise ValueError("value is not p-integral")
            t = c.numerator * pow(c.denominator, -1, mod) * pow(zeta, e, mod)
            for n, k in ex:
                t = t * pow(_padic_root(self.rads[n], cache, p, N, K), k, mod)
            total += t
        return PadicNumber(p, N, total)

    def conj_complex(self):
        return mpmath.conj(self.to_complex())

    def conj(self):
        """Complex conjugate; defined when the only radical is s = sqrt(disc < 0)."""
        if any(n != "s" for n in self.rads):
            raise ValueError("conjugation needs values in Q(zeta_m, s)")
        terms = {}
        for (e, ex), c in self.terms.items():
            sign = -1 if dict(ex).get("s", 0) % 2 else 1
            terms[((-e) % self.m, ex)] = sign * c
        return Val(self.m, self.rads, terms)

    def inverse(self):
        """Exact inverse via v conj(v) when that is rational, else as a root of unity."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational():
            return Val.rational(1 / self.rational_value())
        if all(n == "s" for n in self.rads):
            c = self.conj()
            n = self * c
            if n.is_rational():
                return c * (1 / n.rational_value())
        x = self
        for e in range(1, 241):
            if x == 1:
                return self ** (e - 1)
            x = x * self
        raise ValueError("no exact inverse available")

    def text(self):
        """Deterministic literal: terms 'c*z^a*name^e' joined by ' + '."""
        nf = self.normal_form()
        if not nf:
            return "0"
        parts = []
        for (e, ex) in sorted(nf):
            c = nf[(e, ex)]
            mon = []
            if e:
                mon.append(f"z{self.m}^{e}")
            for n, k in ex:
                mon.append(n if k == 1 else f"{n}^{k}")
            if not mon:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(mon))
            else:
                parts.append(f"{c}*" + "*".join(mon))
        return " + ".join(parts)

    def __repr__(self):
        return f"Val({self.text()})"


def _complex_root(rad, cache, dps):
    if rad.name not in cache:
        c = rad.c.to_complex(dps)
        if rad.name == "s":
            # sqrt of a negative integer: i * sqrt(|disc|)
            cache[rad.name] = mpmath.sqrt(c)
        else:
            cache[rad.name] = mpmath.root(c, rad.order)
    return cache[rad.name]


def _padic_root(rad, cache, p, N, K):
    if rad.name in cache:
        return cache[rad.name]
    mod = p**N
    if rad.name == "s":
        if K is None:
            raise ValueError("p-adic sqrt(disc) needs the field to fix the prime")
        w = padic_w(K, p, N)
        val = (2 * w - K.t) % mod
    else:
        c = rad.c.to_padic(p, N, K)
        if not c.is_unit():
            raise ValueError("radicand not a p-adic unit")
        anchor = next((x for x in range(1, p) if (pow(x, rad.order, p) - c.residue) % p == 0), None)
        if anchor is None:
            raise ValueError("extension scalars required")
        val = hensel_nth_root(c, rad.order, anchor).residue
    cache[rad.name] = val
    return val


@lru_cache(maxsize=None)
def padic_w(K, p, N):
    """iota_p(w): the lift of the smallest root r of w's minimal polynomial mod p."""
    if K.split_type(p) != "split":
        raise ValueError("p must split in K")
    r = K.min_poly_roots(p)[0]
    # Newton on x^2 - t x + n
    mod = p**N
    x = r
    for _ in range(N.bit_length() + 1):
        fx = (x * x - K.t * x + K.n) % mod
        dfx = (2 * x - K.t) % mod
        x = (x - fx * pow(dfx, -1, mod)) % mod
    assert (x * x - K.t * x + K.n) % mod == 0
    return x


def iota_p(K, a, p, N):
    """Image of x + y*w in Z_p / p^N."""
    x, y = a
    return PadicNumber(p, N, x + y * padic_w(K, p, N))


@lru_cache(maxsize=None)
def _primitive_root(p):
    from sympy.ntheory import primitive_root
    return primitive_root(p)
