"""Command-line front end.  Reports are key=value lines; exit status 0 on
success, 1 when a check fails, 2 on usage or configuration errors."""

from __future__ import annotations

import argparse
import random
import sys

from .config import ConfigError, load_config


class CheckFailed(Exception):
    pass


def _common(p):
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--prime", type=int)
    p.add_argument("--precision", type=int)
    p.add_argument("--trunc", type=int)
    p.add_argument("--bound", type=int)
    p.add_argument("--cutoff", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("-J", type=int, dest="J")


def build_parser():
    ap = argparse.ArgumentParser(prog="cmiwasawa")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theta", help="q-expansion of a CM theta series")
    _common(p)
    p.add_argument("--character")

    p = sub.add_parser("eigen-check", help="verify Hecke eigenform relations")
    _common(p)
    p.add_argument("--character")

    p = sub.add_parser("euler-factor", help="Frobenius charpoly or P_l in both forms")
    _common(p)
    p.add_argument("--character")
    p.add_argument("--character2")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--i", type=int, default=0)

    p = sub.add_parser("hyp-check", help="residual hypotheses and the delta_d search")
    _common(p)
    p.add_argument("--pair")
    p.add_argument("--i", type=int, default=0)

    p = sub.add_parser("iwasawa", help="series operations")
    _common(p)
    p.add_argument("action", choices=["tw", "prep", "divides"])
    p.add_argument("--series", required=True, help="polynomial expression or series text")
    p.add_argument("--g", help="dividend for 'divides'")
    p.add_argument("--alpha", type=int, default=None)
    p.add_argument("--var", type=int, default=0)

    p = sub.add_parser("lambda-check", help="identities for elementary modules")
    _common(p)
    p.add_argument("action", choices=["spec", "rank", "twchar"])
    p.add_argument("--factor", action="append", default=[], help="cyclic factor expression (repeatable)")
    p.add_argument("--free-rank", type=int, default=0)
    p.add_argument("--var", type=int, default=0)
    p.add_argument("--count", type=int, default=1, help="random modules when no factor is given")

    p = sub.add_parser("lvalue", help="Euler product of L(Theta, s)")
    _common(p)
    p.add_argument("--theta", help="pair file")
    p.add_argument("--s", default="3")
    p.add_argument("--log", action="store_true", help="per-prime factor log")

    p = sub.add_parser("selftest", help="quick run of the main checks")
    _common(p)
    return ap


def _config(args):
    keys = ("prime", "precision", "trunc", "bound", "cutoff", "seed", "J")
    return load_config(args.config, **{k: getattr(args, k) for k in keys})


def _series(text, cfg, names=None):
    from .series import from_expr, from_text
    if "|" in text:
        return from_text(text)
    return from_expr(text, cfg.prime, cfg.precision, cfg.trunc, names)


def _common_names(exprs):
    """Variable names shared by several expressions, in T1, T2, ... order."""
    import sympy
    from .series import _var_key
    names = set()
    for e in exprs:
        if "|" not in e:
            names |= {str(x) for x in sympy.sympify(e.replace("^", "**")).free_symbols}
    return sorted(names, key=_var_key) or None


# commands


def cmd_theta(args, cfg, out):
    from .charfile import load_character
    from .cmforms import theta_expansion
    name = args.character or cfg.character
    psi = load_character(name)
    f = theta_expansion(psi, cfg.bound)
    out(f"character={name}")
    out(f"disc={psi.K.disc}")
    out(f"modulus={psi.modulus.literal()}")
    out(f"level={f.level}")
    out(f"bound={cfg.bound}")
    for row in f.rows():
        out(row)


def cmd_eigen(args, cfg, out):
    from .charfile import load_character
    from .cmforms import theta_expansion, verify_eigenform
    psi = load_character(args.character or cfg.character)
    rep = verify_eigenform(theta_expansion(psi, cfg.bound), cfg.bound)
    for line in rep.lines():
        out(line)
    if not rep.ok:
        raise CheckFailed("eigenform relations fail")


def cmd_euler(args, cfg, out):
    from .charfile import load_character
    from .cmforms import euler_factor_P, frobenius_charpoly, theta_expansion
    psi = load_character(args.character or cfg.character)
    ell = args.ell
    if not args.character2:
        f = theta_expansion(psi, ell)
        for line in frobenius_charpoly(f, ell, psi).lines():
            out(line)
        return
    psi2 = load_character(args.character2)
    K = psi.K
    if K.split_type(ell) != "split":
        raise ValueError("l must split in the first field")
    ok = True
    for j, L in enumerate(K.primes_above(ell)):
        a = euler_factor_P(psi, psi2, args.i, L, cfg.prime, "explicit", cfg.precision)
        b = euler_factor_P(psi, psi2, args.i, L, cfg.prime, "determinant", cfg.precision)
        same = a == b
        ok &= same
        out(f"prime{j}={L.literal()}")
        out(f"prime{j}.explicit=" + ",".join(str(c.residue) for c in a.coeffs))
        out(f"prime{j}.determinant=" + ",".join(str(c.residue) for c in b.coeffs))
        out(f"prime{j}.agree={'pass' if same else 'fail'}")
    if not ok:
        raise CheckFailed("Euler factor forms disagree")


def cmd_hyp(args, cfg, out):
    from .charfile import load_pair
    from .hecke import find_invertible_d, hyp_a_check
    chi, chi2 = load_pair(args.pair or cfg.pair)
    out(f"prime={cfg.prime}")
    out(f"i={args.i}")
    if chi.k == 0 and chi2.k == 0:
        for line in hyp_a_check(chi, chi2, args.i, cfg.prime, cfg.bound).lines():
            out(line)
    elif chi.k == 1 and chi2.k == 1:
        for line in find_invertible_d(chi, chi2, args.i, cfg.prime).lines():
            out(line)
    else:
        raise ValueError("pair must be two finite-order or two weight-one characters")


def cmd_iwasawa(args, cfg, out):
    from .series import divides_by_specialization, to_text, tw_alpha, weierstrass_prep
    names = _common_names([args.series] + ([args.g] if args.g else []))
    f = _series(args.series, cfg, names)
    if args.action == "tw":
        alpha = args.alpha if args.alpha is not None else 1 + cfg.prime
        out(f"alpha={alpha}")
        out(f"result={to_text(tw_alpha(f, args.var, alpha))}")
    elif args.action == "prep":
        w = weierstrass_prep(f)
        out(f"mu={w.mu}")
        out(f"degree={w.degree}")
        out(f"distinguished={to_text(w.distinguished)}")
        out(f"unit={to_text(w.unit)}")
        ok = w.reconstruct() == f
        out(f"reconstruct={'pass' if ok else 'fail'}")
        if not ok:
            raise CheckFailed("reconstruction fails")
    else:
        if not args.g:
            raise ValueError("divides needs --g")
        g = _series(args.g, cfg, names)
        out(f"divides={'true' if divides_by_specialization(f, g, cfg.J) else 'false'}")


def cmd_lambda(args, cfg, out):
    from .lambda_modules import (
        ElementaryModule, Ring, check_rank_formula, check_spec_identity,
        random_elementary_module, twchar_holds,
    )
    if args.factor:
        names = _common_names(args.factor)
        fs = [_series(x, cfg, names) for x in args.factor]
        d = fs[0].d
        mods = [ElementaryModule(Ring(cfg.prime, cfg.precision, cfg.trunc, d), args.free_rank, fs)]
    else:
        rng = random.Random(cfg.seed)
        mods = [random_elementary_module(rng, cfg.prime, cfg.precision, cfg.trunc, free_rank=args.free_rank)
                for _ in range(args.count)]
    ok = True
    for n, E in enumerate(mods):
        var = min(args.var, E.ring.d - 1)
        out(f"module={n} d={E.ring.d} factors={len(E.factors)} free_rank={E.free_rank}")
        if args.action == "spec":
            rep = check_spec_identity(E, var)
            lines, good = rep.lines(), rep.holds and rep.equivalence_holds
        elif args.action == "rank":
            rep = check_rank_formula(E, var)
            lines, good = rep.lines(), rep.holds
        else:
            alpha = 1 + cfg.prime
            good = twchar_holds(E, alpha, var)
            lines = [f"twchar={'pass' if good else 'fail'}"]
        ok &= good
        for line in lines:
            out(line)
    if not ok:
        raise CheckFailed("module identity fails")


def cmd_lvalue(args, cfg, out):
    import mpmath
    from .charfile import load_pair
    from .lvalues import BiquadraticCharacter, l_series
    theta = BiquadraticCharacter(*load_pair(args.theta or cfg.pair))
    s = mpmath.mpmathify(complex(args.s.replace(" ", "")))
    res = l_series(theta, s, cfg.cutoff, keep_log=args.log)
    for line in res.lines(with_log=args.log):
        out(line)


def cmd_selftest(args, cfg, out):
    import mpmath
    from .charfile import load_character, load_pair
    from .cmforms import frobenius_charpoly, theta_expansion, verify_eigenform
    from .hecke import construct_eta, find_invertible_d
    from .lambda_modules import check_spec_identity, random_elementary_module
    from .lvalues import BiquadraticCharacter, l_series, zeta_F_dirichlet
    from .padic import PadicNumber
    from .quadratic import QuadField
    from .series import from_expr, weierstrass_prep

    results = []

    def check(name, fn):
        try:
            ok = bool(fn())
        except Exception as exc:  # a crash is a failed check
            ok = False
            out(f"{name}.error={type(exc).__name__}: {exc}")
        results.append(ok)
        out(f"{name}={'pass' if ok else 'fail'}")

    psi = load_character("gauss32")
    f = theta_expansion(psi, 100)
    check("theta_a5", lambda: f[5] == -2 and f[3] == 0)
    check("eigenform", lambda: verify_eigenform(f).ok)
    check("charpoly", lambda: frobenius_charpoly(f, 5, psi).factors is not None)

    def delta():
        psi7 = load_character("sqrtm7")
        return find_invertible_d(psi, psi7, 0, 29).d == 5 and find_invertible_d(psi, psi7, 13, 29).d is None
    check("delta_search", delta)

    def eta():
        e = construct_eta(QuadField(-4), 5, 20)
        return e.omega ** e.h == PadicNumber(5, 20, 6) and e.check_torsion_trivial(1)[0]
    check("eta", eta)

    def modules():
        rng = random.Random(cfg.seed)
        return all(check_spec_identity(random_elementary_module(rng)).holds for _ in range(10))
    check("spec_identity", modules)

    def prep():
        g = from_expr("t^2 + 6*t + 5", 5, 20, 24)
        w = weierstrass_prep(g)
        return w.degree == 1 and w.reconstruct() == g
    check("weierstrass", prep)

    def lser():
        chi, chi2 = load_pair("pair_trivial")
        r = l_series(BiquadraticCharacter(chi, chi2), 3, 2000)
        z = zeta_F_dirichlet(chi.K, chi2.K, 3, 2000)
        return abs(r.value - z) < mpmath.mpf(10) ** -5
    check("lseries", lser)
    if not all(results):
        raise CheckFailed("selftest")


COMMANDS = {
    "theta": cmd_theta, "eigen-check": cmd_eigen, "euler-factor": cmd_euler, "hyp-check": cmd_hyp,
    "iwasawa": cmd_iwasawa, "lambda-check": cmd_lambda, "lvalue": cmd_lvalue, "selftest": cmd_selftest,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
    except (ConfigError, OSError) as exc:
        print(f"usage error: {exc}", file=stderr)
        return 2
    lines = []
    status = 0
    try:
        COMMANDS[args.command](args, cfg, lines.append)
    except CheckFailed as exc:
        lines.append(f"status=fail ({exc})")
        status = 1
    except (ValueError, ArithmeticError, KeyError) as exc:
        lines.append(f"error={exc}")
        status = 1
    stdout.write("".join(line + "\n" for line in lines))
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
