"""Truncated p-adic integers.

A :class:`PadicNumber` is an element of Z_p known modulo ``p**precision``.
Precision is absolute and is propagated pessimistically through arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class PrecisionError(ArithmeticError):
    pass


def valuation(n: int, p: int) -> int | None:
    """p-adic valuation of a nonzero integer; None for zero."""
    if n == 0:
        return None
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class PadicNumber:
    prime: int
    precision: int
    residue: int  # representative in [0, p**precision)

    def __post_init__(self):
        if self.prime < 5:
            raise ValueError("prime must be >= 5")
        if self.precision <= 0:
            raise PrecisionError("no significant digits left")
        object.__setattr__(self, "residue", self.residue % self.prime**self.precision)

    @classmethod
    def from_int(cls, p: int, n: int, precision: int) -> PadicNumber:
        return cls(p, precision, n)

    @classmethod
    def from_rational(cls, p: int, q, precision: int) -> PadicNumber:
        q = Fraction(q)
        if q.denominator % p == 0:
            raise ValueError("denominator divisible by p")
        mod = p**precision
        return cls(p, precision, q.numerator * pow(q.denominator, -1, mod))

    @property
    def modulus(self) -> int:
        return self.prime**self.precision

    @property
    def valuation(self) -> float | int:
        v = valuation(self.residue, self.prime)
        return float("inf") if v is None else v

    @property
    def unit_part(self) -> int:
        """Unit u with value p^v * u, known mod p^(N - v)."""
        v = self.valuation
        if v == float("inf"):
            raise PrecisionError("zero has no unit part")
        return (self.residue // self.prime**v) % self.prime ** (self.precision - v)

    def is_zero(self) -> bool:
        return self.residue == 0

    def is_unit(self) -> bool:
        return self.residue % self.prime != 0

    def _coerce(self, other) -> PadicNumber:
        if isinstance(other, PadicNumber):
            if other.prime != self.prime:
                raise ValueError("mismatched primes")
            return other
        if isinstance(other, (int, Fraction)):
            return PadicNumber.from_rational(self.prime, other, self.precision)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = min(self.precision, other.precision)
        return PadicNumber(self.prime, n, self.residue + other.residue)

    __radd__ = __add__

    def __neg__(self):
        return PadicNumber(self.prime, self.precision, -self.residue)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        va = min(self.valuation, self.precision)
        vb = min(other.valuation, other.precision)
        n = int(min(self.precision + vb, other.precision + va))
        return PadicNumber(self.prime, n, self.residue * other.residue)

    __rmul__ = __mul__

    def inverse(self) -> PadicNumber:
        if not self.is_unit():
            raise PrecisionError("valuation positive")
        return PadicNumber(self.prime, self.precision, pow(self.residue, -1, self.modulus))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        v = other.valuation
        if v == float("inf") or v >= other.precision:
            raise PrecisionError("division by an element indistinguishable from zero")
        if self.valuation < v:
            raise ValueError("quotient is not integral")
        n = min(self.precision - v, other.precision - v + min(self.valuation, self.precision) - v)
        n = int(n)
        mod = self.prime**n
        num = (self.residue // self.prime**v) % mod
        den = (other.residue // self.prime**v) % mod
        return PadicNumber(self.prime, n, num * pow(den, -1, mod))

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            return PadicNumber(self.prime, self.precision, 1)
        if self.is_unit():
            return PadicNumber(self.prime, self.precision, pow(self.residue, e, self.modulus))
        out = self
        for _ in range(e - 1):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            return (self.residue - other) % self.modulus == 0
        if not isinstance(other, PadicNumber) or other.prime != self.prime:
            return NotImplemented
        n = min(self.precision, other.precision)
        return (self.residue - other.residue) % self.prime**n == 0

    def __hash__(self):
        return hash((self.prime, self.precision, self.residue))

    def reduce(self, precision: int) -> PadicNumber:
        if precision > self.precision:
            raise PrecisionError("cannot raise precision")
        return PadicNumber(self.prime, precision, self.residue)

    def digits(self) -> list[int]:
        """Base-p digits, least significant first, exactly ``precision`` of them."""
        n, out = self.residue, []
        for _ in range(self.precision):
            n, d = divmod(n, self.prime)
            out.append(d)
        return out

    def __int__(self):
        return self.residue

    def __repr__(self):
        return f"{self.residue} + O({self.prime}^{self.precision})"


def teichmuller(a: PadicNumber) -> PadicNumber:
    """The (p-1)-th root of unity congruent to ``a`` mod p."""
    if not a.is_unit():
        raise PrecisionError("valuation positive")
    p, mod = a.prime, a.modulus
    x = a.residue
    # x -> x^p gains one digit per step
    for _ in range(a.precision):
        y = pow(x, p, mod)
        if y == x:
            break
        x = y
    return PadicNumber(p, a.precision, x)


def teichmuller_int(a: int, p: int, precision: int) -> int:
    return teichmuller(PadicNumber(p, precision, a)).residue


def hensel_nth_root(a: PadicNumber, h: int, residue_anchor: int) -> PadicNumber:
    """Unique x with x^h = a and x = residue_anchor mod p (needs p not dividing h)."""
    p, n = a.prime, a.precision
    if h <= 0:
        raise ValueError("h must be positive")
    if h % p == 0:
        raise ValueError("root not in base field")
    x = residue_anchor % p
    if x == 0 or (pow(x, h, p) - a.residue) % p != 0:
        raise ValueError("no root")
    mod = p**n
    target = a.residue
    prec = 1
    while prec < n:
        prec = min(2 * prec, n)
        m = p**prec
        fx = (pow(x, h, m) - target) % m
        dfx = h * pow(x, h - 1, m) % m
        x = (x - fx * pow(dfx, -1, m)) % m
    return PadicNumber(p, n, x % mod)


def one_unit_projection(u: PadicNumber) -> PadicNumber:
    """<u> = u / teichmuller(u), the projection Z_p^x -> 1 + pZ_p."""
    if not u.is_unit():
        raise PrecisionError("valuation positive")
    return u * teichmuller(u).inverse()


def padic_log(x: PadicNumber) -> PadicNumber:
    """Logarithm of a 1-unit; the result lies in pZ_p."""
    p, n = x.prime, x.precision
    if (x.residue - 1) % p:
        raise ValueError("log needs a 1-unit")
    y = x.residue - 1
    # v(y^k / k) >= k - log_p(k); stop once that stays above n
    total = Fraction(0)
    k = 1
    while True:
        if k - _ilog(k, p) > n + 1 and k > n:
            break
        total += Fraction((-1) ** (k + 1) * y**k, k)
        k += 1
    return _frac_mod(total, p, n)


def _ilog(k: int, p: int) -> int:
    e = 0
    while p ** (e + 1) <= k:
        e += 1
    return e


def _frac_mod(q: Fraction, p: int, n: int) -> PadicNumber:
    vd = valuation(q.denominator, p) or 0
    num = q.numerator
    if (valuation(num, p) or 10**9) < vd:
        raise PrecisionError("log series lost integrality")
    num //= p**vd
    den = q.denominator // p**vd
    return PadicNumber(p, n, num * pow(den, -1, p**n))


def padic_exp(x: PadicNumber) -> PadicNumber:
    """Exponential on pZ_p (p odd)."""
    p, n = x.prime, x.precision
    if x.residue % p:
        raise ValueError("exp needs an element of pZ_p")
    total = Fraction(0)
    term = Fraction(1)
    k = 0
    while True:
        total += term
        k += 1
        term = term * x.residue / k
        if term == 0:
            break
        vt = (valuation(term.numerator, p) or 0) - (valuation(term.denominator, p) or 0)
        if vt >= n + 2 and k > n:
            break
    return _frac_mod(total, p, n)
