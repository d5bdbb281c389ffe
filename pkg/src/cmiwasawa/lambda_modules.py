"""Elementary modules over B = A[[t]] and their characteristic ideals.

An elementary module is B^r plus a sum of cyclic pieces B/(f_i).  Here B
is the series ring in d variables and t is one chosen variable; A is the
ring in the remaining d-1 variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .series import MultiPowerSeries, tw_alpha, weierstrass_prep


@dataclass(frozen=True)
class Ring:
    p: int
    N: int
    M: int
    d: int

    def one(self):
        return MultiPowerSeries.constant(self.p, self.N, self.M, self.d, 1)

    def zero(self):
        return MultiPowerSeries.zero(self.p, self.N, self.M, self.d)


@dataclass(frozen=True)
class ElementaryModule:
    ring: Ring
    free_rank: int = 0
    factors: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if self.free_rank < 0:
            raise ValueError("free rank must be >= 0")
        for f in self.factors:
            if f.is_zero():
                raise ValueError("cyclic factors must be nonzero")
            if (f.p, f.M, f.d) != (self.ring.p, self.ring.M, self.ring.d):
                raise ValueError("factor does not live in the module's ring")

    @property
    def is_torsion(self):
        return self.free_rank == 0

    def direct_sum(self, other):
        if other.ring != self.ring:
            raise ValueError("different rings")
        return ElementaryModule(self.ring, self.free_rank + other.free_rank,
                                self.factors + other.factors)

    def torsion_part(self):
        return ElementaryModule(self.ring, 0, self.factors)


def normalize(f: MultiPowerSeries) -> MultiPowerSeries:
    """Scale f by a unit of Z_p so its leading minimal-valuation coefficient is p^v.

    In one variable the Weierstrass form p^mu * P is returned instead, which
    is canonical for the ideal (f).
    """
    if f.is_zero():
        return f
    if f.d == 1:
        w = weierstrass_prep(f)
        return MultiPowerSeries.from_list(f.p, f.N, f.M,
                                          [c * f.p**w.mu for c in w.distinguished.to_list()])
    v = f.valuation()
    lead = min(e for e, c in f.coeffs.items() if (c // f.p**v) % f.p)
    u = f.coeffs[lead] // f.p**v
    inv = pow(u, -1, f.modulus)
    return f.scale(inv)


def char_ideal(E: ElementaryModule, normalized=True) -> MultiPowerSeries:
    """Generator of Char(E); zero when E has a free part."""
    if not E.is_torsion:
        return E.ring.zero()
    g = E.ring.one()
    for f in E.factors:
        g = g * f
    return normalize(g) if normalized else g


def twist_module(E: ElementaryModule, alpha, var: int = 0, check=True) -> ElementaryModule:
    """Elementary form of the twisted module whose factors are tw_alpha(f_i).

    Its characteristic ideal is tw_alpha of the original one; that identity
    is asserted unless check is off.
    """
    T = ElementaryModule(E.ring, E.free_rank, tuple(tw_alpha(f, var, alpha) for f in E.factors))
    if check:
        lhs = char_ideal(T, normalized=False)
        rhs = E.ring.zero() if not E.is_torsion else tw_alpha(char_ideal(E, normalized=False), var, alpha)
        if lhs != rhs:
            raise AssertionError("twisted characteristic ideal mismatch")
    return T


def t_divides(f: MultiPowerSeries, var: int) -> bool:
    return all(e[var] >= 1 for e in f.coeffs)


@dataclass
class SpecReport:
    holds: bool
    equivalence_holds: bool
    ch_Xt: MultiPowerSeries
    pi_ch: MultiPowerSeries
    ch_XmodT: MultiPowerSeries
    xt_pieces: list  # per factor: "0" or "A"

    def lines(self):
        from .series import to_text
        return [
            f"identity={'pass' if self.holds else 'fail'}",
            f"zero_equivalence={'pass' if self.equivalence_holds else 'fail'}",
            f"ch_Xt={to_text(self.ch_Xt)}",
            f"pi_ch={to_text(self.pi_ch)}",
            f"ch_X_mod_t={to_text(self.ch_XmodT)}",
            f"X_t_pieces={','.join(self.xt_pieces)}",
        ]


def _ring_A(R: Ring) -> Ring:
    return Ring(R.p, R.N, R.M, R.d - 1)


def check_spec_identity(E: ElementaryModule, var: int = 0) -> SpecReport:
    """Both sides of ch(X_t) * pi(ch(X)) = ch(X/tX) over A, plus the zero clause.

    On B/(f): if t does not divide f, multiplication by t is injective so
    X_t = 0 and X/tX = A/(pi f).  If f = t^a f' with a >= 1, the kernel of t
    is t^(a-1) f' B / t^a f' B, a copy of B/(t) = A, and pi(f) = 0.
    """
    if not E.is_torsion:
        raise ValueError("module must be torsion")
    R = E.ring
    A = _ring_A(R)
    ch_xt = A.one()
    ch_quot = A.one()
    pieces = []
    for f in E.factors:
        pf = f.project(var, drop=True)
        divisible = t_divides(f, var)
        if pf.is_zero() != divisible:
            raise ValueError("precision insufficient to classify")
        if divisible:
            pieces.append("A")
            ch_xt = A.zero()
        else:
            pieces.append("0")
        ch_quot = ch_quot * pf
    pi_ch = char_ideal(E, normalized=False).project(var, drop=True)
    holds = ch_xt * pi_ch == ch_quot
    eq = ch_xt.is_zero() == pi_ch.is_zero() == ch_quot.is_zero()
    return SpecReport(holds, eq, ch_xt, pi_ch, ch_quot, pieces)


@dataclass
class RankReport:
    holds: bool
    rank_X_mod_t: int
    rank_X: int
    rank_Y_mod_t: int

    def lines(self):
        return [
            f"rank_formula={'pass' if self.holds else 'fail'}",
            f"rank_A(X/tX)={self.rank_X_mod_t}",
            f"rank_B(X)={self.rank_X}",
            f"rank_A(Y/tY)={self.rank_Y_mod_t}",
        ]


def check_rank_formula(E: ElementaryModule, var: int = 0) -> RankReport:
    """rank_A(X/tX) = rank_B(X) + rank_A(Y/tY) with Y the torsion part.

    B/tB = A is free of rank one and A/(pi f) is torsion unless t | f.
    """
    def quot_rank(mod):
        return mod.free_rank + sum(1 for f in mod.factors if t_divides(f, var))

    lhs = quot_rank(E)
    y = quot_rank(E.torsion_part())
    return RankReport(lhs == E.free_rank + y, lhs, E.free_rank, y)


def twchar_holds(E: ElementaryModule, alpha, var: int = 0) -> bool:
    try:
        twist_module(E, alpha, var, check=True)
    except AssertionError:
        return False
    return True


def random_elementary_module(rng, p=5, N=20, M=24, max_d=3, max_factors=4, deg=5, free_rank=0):
    """A random torsion module for property suites; some factors are forced divisible by t."""
    d = rng.randrange(1, max_d + 1)
    R = Ring(p, N, M, d)
    fs = []
    for _ in range(rng.randrange(0, max_factors + 1)):
        coeffs = {}
        for _ in range(rng.randrange(1, 5)):
            coeffs[tuple(rng.randrange(deg + 1) for _ in range(d))] = rng.randrange(1, p**N)
        f = MultiPowerSeries(p, N, M, d, coeffs)
        fs.append(f if not f.is_zero() else MultiPowerSeries.constant(p, N, M, d, p))
    if fs and rng.random() < 0.3:
        k = rng.randrange(d)
        fs[0] = fs[0].shift_exponents(k, 1)
    return ElementaryModule(R, free_rank, fs)
