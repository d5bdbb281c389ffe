"""Truncated power series in O[[T_1..T_d]] with O = Z_p.

Coefficients are stored as integers modulo p^N keyed by exponent tuples;
every exponent is at most M.  Ring operations are exact modulo the ideal
(p^N, T_1^(M+1), ..., T_d^(M+1)).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .padic import PadicNumber, PrecisionError, valuation


def _as_int(x, p):
    if isinstance(x, PadicNumber):
        if x.prime != p:
            raise ValueError("mismatched primes")
        return x.residue
    return int(x)


class MultiPowerSeries:
    __slots__ = ("p", "N", "M", "d", "coeffs", "_hash")

    def __init__(self, p, N, M, d, coeffs=None):
        if d < 0 or M < 0 or N <= 0:
            raise ValueError("bad shape")
        self.p, self.N, self.M, self.d = p, N, M, d
        mod = p**N
        clean = {}
        for e, c in (coeffs or {}).items():
            e = tuple(e)
            if len(e) != d:
                raise ValueError("exponent arity mismatch")
            if any(k > M for k in e):
                continue
            c = _as_int(c, p) % mod
            if c:
                clean[e] = c
        self.coeffs = clean
        self._hash = None

    # construction
    def like(self, coeffs, d=None, N=None):
        return MultiPowerSeries(self.p, self.N if N is None else N, self.M,
                                self.d if d is None else d, coeffs)

    @classmethod
    def zero(cls, p, N, M, d):
        return cls(p, N, M, d, {})

    @classmethod
    def constant(cls, p, N, M, d, c):
        return cls(p, N, M, d, {(0,) * d: c})

    @classmethod
    def variable(cls, p, N, M, d, k):
        e = [0] * d
        e[k] = 1
        return cls(p, N, M, d, {tuple(e): 1})

    @classmethod
    def from_list(cls, p, N, M, coeffs):
        """One-variable series from a coefficient list c_0, c_1, ..."""
        return cls(p, N, M, 1, {(i,): c for i, c in enumerate(coeffs)})

    def to_list(self):
        if self.d != 1:
            raise ValueError("to_list needs one variable")
        out = [0] * (self.M + 1)
        for (i,), c in self.coeffs.items():
            out[i] = c
        return out

    @property
    def modulus(self):
        return self.p**self.N

    def _check(self, other):
        if not isinstance(other, MultiPowerSeries):
            raise TypeError("expected MultiPowerSeries")
        if (self.p, self.M, self.d) != (other.p, other.M, other.d):
            raise ValueError("incompatible series shapes")

    # ring structure
    def __add__(self, other):
        if isinstance(other, (int, PadicNumber)):
            other = self.like({(0,) * self.d: other})
        self._check(other)
        n = min(self.N, other.N)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return MultiPowerSeries(self.p, n, self.M, self.d, out)

    __radd__ = __add__

    def __neg__(self):
        return self.like({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        if isinstance(other, (int, PadicNumber)):
            other = self.like({(0,) * self.d: other})
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = _as_int(c, self.p)
        return self.like({e: c * v for e, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, (int, PadicNumber)):
            return self.scale(other)
        self._check(other)
        n = min(self.N, other.N)
        return MultiPowerSeries(self.p, n, self.M, self.d,
                                _mul_sparse(self.coeffs, other.coeffs, self.d, self.M, self.p**n))

    __rmul__ = __mul__

    def __pow__(self, e):
        out = self.like({(0,) * self.d: 1})
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.like({(0,) * self.d: other})
        if not isinstance(other, MultiPowerSeries):
            return NotImplemented
        if (self.p, self.M, self.d) != (other.p, other.M, other.d):
            return False
        mod = self.p ** min(self.N, other.N)
        keys = set(self.coeffs) | set(other.coeffs)
        return all((self.coeffs.get(k, 0) - other.coeffs.get(k, 0)) % mod == 0 for k in keys)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p, self.N, self.M, self.d, frozenset(self.coeffs.items())))
        return self._hash

    def is_zero(self):
        return not self.coeffs

    def coeff(self, e):
        return self.coeffs.get(tuple(e), 0)

    def constant_term(self):
        return self.coeffs.get((0,) * self.d, 0)

    def valuation(self):
        """min p-adic valuation of the coefficients (inf for zero)."""
        if not self.coeffs:
            return float("inf")
        return min(valuation(c, self.p) for c in self.coeffs.values())

    def degree(self, k):
        """Degree in T_k of the stored polynomial (-1 for zero)."""
        return max((e[k] for e in self.coeffs), default=-1)

    def total_degree(self):
        return max((sum(e) for e in self.coeffs), default=-1)

    # substitutions
    def specialize(self, k, value, drop=True):
        """Set T_k = value (an integer).  Exact on the stored polynomial.

        For value of positive valuation the omitted tail contributes only
        multiples of p^(M+1).
        """
        value = _as_int(value, self.p)
        mod = self.modulus
        pw = [1]
        for _ in range(self.M):
            pw.append(pw[-1] * value % mod)
        out = {}
        for e, c in self.coeffs.items():
            ne = e[:k] + e[k + 1:] if drop else e[:k] + (0,) + e[k + 1:]
            out[ne] = out.get(ne, 0) + c * pw[e[k]]
        return self.like(out, d=self.d - 1 if drop else self.d)

    def project(self, k, drop=False):
        """The map T_k -> 0."""
        return self.specialize(k, 0, drop=drop)

    def evaluate(self, values):
        """Evaluate all variables at integers; returns an int mod p^N."""
        f = self
        for v in values:
            f = f.specialize(0, v)
        return f.constant_term()

    def shift_exponents(self, k, by):
        """Multiply by T_k^by."""
        out = {}
        for e, c in self.coeffs.items():
            ne = e[:k] + (e[k] + by,) + e[k + 1:]
            out[ne] = c
        return self.like(out)

    def __repr__(self):
        return f"MultiPowerSeries({to_text(self)})"

    def __str__(self):
        return to_text(self)


def tw_alpha(f: MultiPowerSeries, k: int, alpha) -> MultiPowerSeries:
    """Substitute T_k <- alpha(1+T_k) - 1 for a 1-unit alpha.

    The substitution does not raise T_k-degree, so it acts exactly on the
    stored polynomial.
    """
    p = f.p
    if not 0 <= k < f.d:
        raise ValueError("variable index out of range")
    a = _as_int(alpha, p)
    if (a - 1) % p:
        raise ValueError("alpha must be congruent to 1 mod p")
    mod = f.modulus
    a %= mod
    shift = (a - 1) % mod
    # expansion rows: (shift + a T)^n = sum_j rows[n][j] T^j
    top = f.degree(k)
    rows = []
    for n in range(top + 1):
        sp = [pow(shift, n - j, mod) for j in range(n + 1)]
        rows.append([comb(n, j) * sp[j] * pow(a, j, mod) % mod for j in range(n + 1)])
    out = {}
    for e, c in f.coeffs.items():
        n = e[k]
        for j, r in enumerate(rows[n]):
            if r:
                ne = e[:k] + (j,) + e[k + 1:]
                out[ne] = out.get(ne, 0) + c * r
    return f.like(out)


# multiplication


def _mul_sparse(a, b, d, M, mod):
    if not a or not b:
        return {}
    if len(a) * len(b) <= 4000:
        out = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                if max(e, default=0) <= M:
                    out[e] = out.get(e, 0) + ca * cb
        return {e: c % mod for e, c in out.items() if c % mod}
    return _mul_kronecker(a, b, d, M, mod)


def _mul_kronecker(a, b, d, M, mod):
    # pack each series into one big integer, multiply once, unpack
    base = 2 * M + 1
    terms = min(len(a), len(b))
    width = (mod * mod * terms).bit_length() + 1
    width = (width + 7) // 8 * 8

    def pack(s):
        n = 0
        for e, c in s.items():
            idx = 0
            for x in reversed(e):
                idx = idx * base + x
            n |= c << (idx * width)
        return n

    prod = pack(a) * pack(b)
    nbytes = width // 8
    raw = prod.to_bytes((prod.bit_length() + 7) // 8 + nbytes, "little")
    out = {}
    ranges = [range(M + 1)] * d
    from itertools import product

    for e in product(*ranges):
        idx = 0
        for x in reversed(e):
            idx = idx * base + x
        chunk = raw[idx * nbytes:(idx + 1) * nbytes]
        if chunk:
            c = int.from_bytes(chunk, "little") % mod
            if c:
                out[e] = c
    return out


def mul_lists(a, b, K, mod):
    """Product of coefficient lists, truncated to length K, reduced mod ``mod``."""
    if not a or not b:
        return [0] * K
    width = (mod * mod * min(len(a), len(b))).bit_length() + 1
    width = (width + 7) // 8 * 8
    nb = width // 8

    def pack(xs):
        raw = b"".join((x % mod).to_bytes(nb, "little") for x in xs[:K])
        return int.from_bytes(raw, "little")

    prod = pack(a) * pack(b)
    raw = prod.to_bytes(max((prod.bit_length() + 7) // 8, K * nb) + nb, "little")
    return [int.from_bytes(raw[i * nb:(i + 1) * nb], "little") % mod for i in range(K)]


def inverse_list(c, K, mod):
    """Inverse of a power series with unit constant term, mod (mod, t^K)."""
    if not c or c[0] % mod == 0:
        raise PrecisionError("constant term not invertible")
    c = list(c[:K]) + [0] * max(0, K - len(c))
    inv0 = pow(c[0], -1, mod)
    out = [0] * K
    out[0] = inv0
    for n in range(1, K):
        s = 0
        for i in range(1, n + 1):
            if c[i]:
                s += c[i] * out[n - i]
        out[n] = -s * inv0 % mod
    return out


# canonical text form: "p=5 N=20 M=24 d=2 | 0,1:1.0.3 | 2,0:4"
# coefficient digits are base p, least significant first


def to_text(f: MultiPowerSeries) -> str:
    parts = [f"p={f.p} N={f.N} M={f.M} d={f.d}"]
    for e in sorted(f.coeffs):
        c, digs = f.coeffs[e], []
        while c:
            c, r = divmod(c, f.p)
            digs.append(str(r))
        parts.append(",".join(map(str, e)) + ":" + ".".join(digs))
    return " | ".join(parts)


def from_text(s: str) -> MultiPowerSeries:
    chunks = [c.strip() for c in s.split("|")]
    head = dict(kv.split("=") for kv in chunks[0].split())
    try:
        p, N, M, d = (int(head[k]) for k in ("p", "N", "M", "d"))
    except KeyError as exc:
        raise ValueError(f"series header missing {exc}") from None
    coeffs = {}
    for ch in chunks[1:]:
        if not ch:
            continue
        e, digs = ch.split(":")
        exps = tuple(int(x) for x in e.split(",")) if e else ()
        c = 0
        for r in reversed(digs.split(".")):
            r = int(r)
            if not 0 <= r < p:
                raise ValueError("digit out of range")
            c = c * p + r
        coeffs[exps] = c
    return MultiPowerSeries(p, N, M, d, coeffs)


def from_expr(expr: str, p: int, N: int, M: int, names=None) -> MultiPowerSeries:
    """Parse a polynomial such as '(t+5)*(t+1)' or 'T1^2 + 5*T2'.

    Variables default to the sorted free symbols; 't' is accepted for d = 1.
    Rational coefficients must be p-integral.
    """
    import sympy

    e = sympy.sympify(expr.replace("^", "**"))
    if names is None:
        names = sorted((str(s) for s in e.free_symbols), key=_var_key) or ["t"]
    syms = [sympy.Symbol(n) for n in names]
    poly = sympy.Poly(sympy.expand(e), *syms) if syms else None
    mod = p**N
    coeffs = {}
    for mon, c in poly.terms():
        c = sympy.Rational(c)
        if c.q % p == 0:
            raise ValueError("coefficient not p-integral")
        coeffs[tuple(mon)] = int(c.p) * pow(int(c.q), -1, mod)
    return MultiPowerSeries(p, N, M, len(names), coeffs)


def _var_key(name):
    digits = "".join(ch for ch in name if ch.isdigit())
    return (name.rstrip("0123456789"), int(digits) if digits else 0)


@dataclass(frozen=True)
class WeierstrassDecomposition:
    mu: int
    distinguished: MultiPowerSeries  # monic, precision N - mu
    unit: MultiPowerSeries

    @property
    def degree(self):
        return self.distinguished.degree(0)

    def reconstruct(self) -> MultiPowerSeries:
        P, U = self.distinguished, self.unit
        N = P.N + self.mu
        pm = P.p**self.mu
        prod = mul_lists(P.to_list(), U.to_list(), P.M + 1, P.p**P.N)
        return MultiPowerSeries.from_list(P.p, N, P.M, [pm * c for c in prod])


def weierstrass_prep(f: MultiPowerSeries) -> WeierstrassDecomposition:
    """Factor a one-variable series as p^mu * P * U.

    f is treated as the polynomial it stores.  The unit is found by the
    fixed point V = C^-1 (1 - tau(B V)) where f/p^mu = B + t^n C and tau
    drops the first n terms; then P = (f/p^mu) V and U = V^-1.
    """
    if f.d != 1:
        raise ValueError("weierstrass_prep needs one variable")
    p, M = f.p, f.M
    if f.is_zero():
        raise PrecisionError("insufficient precision")
    mu = f.valuation()
    prec = f.N - mu
    mod = p**prec
    g = [c // p**mu % mod for c in f.to_list()]
    n = next(i for i, c in enumerate(g) if c % p)
    B = g[:n]
    C = g[n:]
    # V is only needed mod t^(M+1), but errors in its top terms leak down
    # n places per step while gaining a factor p; pad enough to flush them
    K = M + 1 + n * (prec + 1)
    Cinv = inverse_list(C, K, mod)
    V = Cinv
    for _ in range(K + 2):
        BV = mul_lists(B, V, K + n, mod) if n else [0] * (K + n)
        rhs = [(-x) % mod for x in BV[n:n + K]]
        rhs[0] = (rhs[0] + 1) % mod
        nxt = mul_lists(Cinv, rhs, K, mod)
        if nxt == V:
            break
        V = nxt
    else:
        raise PrecisionError("preparation did not converge")
    P = mul_lists(g, V, n, mod) + [1]
    # P is monic, so P | g as power series forces exact polynomial division
    Ulist, rem = poly_divmod_monic(g, P, mod)
    if any(rem):
        raise PrecisionError("preparation did not converge")
    return WeierstrassDecomposition(
        mu,
        MultiPowerSeries.from_list(p, prec, M, P),
        MultiPowerSeries.from_list(p, prec, M, Ulist),
    )


def poly_divmod_monic(g, P, mod):
    """Long division of a coefficient list by a monic polynomial."""
    n = len(P) - 1
    r = [x % mod for x in g]
    q = [0] * max(0, len(r) - n)
    for i in range(len(r) - 1, n - 1, -1):
        c = r[i]
        if c:
            q[i - n] = c
            for j in range(n + 1):
                r[i - n + j] = (r[i - n + j] - c * P[j]) % mod
    return q, r[:n]


def divisibility_precision(f: MultiPowerSeries) -> int:
    """p-adic precision to which the remainder mod f is determined."""
    w = weierstrass_prep(f)
    n = w.degree
    if n == 0:
        return w.distinguished.N
    # t^(M+1) reduces mod P to something divisible by p^floor((M+1)/n)
    return min(w.distinguished.N, (f.M + 1) // n)


def divides_1var(f: MultiPowerSeries, g: MultiPowerSeries) -> bool:
    """Decide f | g in Z_p[[t]] modulo the working truncation."""
    if f.d != 1 or g.d != 1:
        raise ValueError("divides_1var needs one variable")
    f._check(g)
    w = weierstrass_prep(f)
    mu, n = w.mu, w.degree
    N = min(f.N, g.N)
    if mu >= N:
        raise PrecisionError("precision exhausted: p^mu exceeds working precision")
    if g.is_zero():
        return True
    if g.valuation() < mu:
        return False
    eff = N - mu
    if n:
        eff = min(eff, (f.M + 1) // n)
    if eff <= 0:
        raise PrecisionError("precision exhausted during division")
    mod = f.p**eff
    gg = [c // f.p**mu % mod for c in g.to_list()]
    _, r = poly_divmod_monic(gg, [c % mod for c in w.distinguished.to_list()[: n + 1]], mod)
    return not any(r)


def divides_by_specialization(f: MultiPowerSeries, g: MultiPowerSeries, J: int | None = None) -> bool:
    """Test f | g by specializing T_1 = jp for j = 0..J and recursing.

    "False" is always sound.  "True" certifies divisibility of every
    tested specialization; with J > M a nonzero T_1-polynomial of degree
    at most M cannot vanish at all the points.
    """
    f._check(g)
    if f.d == 1:
        return divides_1var(f, g)
    if J is None:
        J = f.M + 1
    if J < 1:
        raise ValueError("J must be at least 1")
    seen_nonzero = False
    for j in range(J + 1):
        fj = f.specialize(0, j * f.p)
        gj = g.specialize(0, j * f.p)
        if fj.is_zero():
            if not gj.is_zero():
                return False
            continue
        seen_nonzero = True
        try:
            ok = divides_by_specialization(fj, gj, J)
        except PrecisionError as exc:
            if "not witnessed" in str(exc):
                continue
            raise
        if not ok:
            return False
    if not seen_nonzero:
        raise PrecisionError("f not witnessed nonzero; raise J or precision")
    return True
