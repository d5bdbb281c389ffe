"""Text format for Hecke characters.

    # comment
    disc = -4
    modulus = (4, 2+w*2)
    k = 1
    eps = units            # units | legendre | trivial | ray
    ray = 1,0              # character vector on the ray class group (eps = ray, k = 0)
    value (5, 2+w*1) = -1 + s

Every ``value`` row is checked against the constructed character at load
time; the literal must equal Val.text() of the computed value.  A pair
file holds ``chi = <path>`` and ``chi2 = <path>`` with paths relative to
the pair file.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .hecke import RayCharacter, legendre_type, trivial_character, unit_normalized
from .quadratic import QuadField, ray_class_group

BUILTINS = ("gauss32", "sqrtm7", "sqrtm23", "sqrtm23_class3", "trivial_qi", "trivial_q7",
            "pair_trivial", "pair_class3", "pair_gauss_sqrtm7")


class CharFileError(ValueError):
    pass


def _parse_lines(text):
    fields, values = {}, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("value "):
            lhs, sep, rhs = line[6:].rpartition("=")
            if not sep:
                raise CharFileError(f"line {lineno}: value row needs '='")
            values.append((lhs.strip(), rhs.strip()))
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise CharFileError(f"line {lineno}: expected key = value")
        fields[key.strip()] = val.strip()
    return fields, values


def _norm_lit(s):
    return "".join(s.split())


def parse_character(text, name="psi"):
    fields, values = _parse_lines(text)
    for key in ("disc", "k", "eps"):
        if key not in fields:
            raise CharFileError(f"missing field: {key}")
    try:
        K = QuadField(int(fields["disc"]))
        k = int(fields["k"])
    except ValueError as e:
        raise CharFileError(f"bad field: {e}") from None
    mod = K.ideal(fields["modulus"]) if "modulus" in fields else K.unit_ideal()
    kind = fields["eps"]
    if kind == "units":
        chi = unit_normalized(K, mod, k, name)
    elif kind == "legendre":
        chi = legendre_type(K, k, name)
    elif kind == "trivial":
        if k != 0:
            raise CharFileError("eps = trivial needs k = 0")
        chi = trivial_character(K, name)
    elif kind == "ray":
        if k != 0:
            raise CharFileError("eps = ray needs k = 0")
        vec = tuple(int(x) for x in fields.get("ray", "").split(",") if x.strip())
        chi = RayCharacter(ray_class_group(K, mod), vec, name)
    else:
        raise CharFileError(f"unknown eps kind: {kind}")
    if mod != chi.modulus:
        raise CharFileError("modulus does not match the construction")
    for lit, want in values:
        got = chi.evaluate(K.ideal(lit)).text()
        if _norm_lit(got) != _norm_lit(want):
            raise CharFileError(f"value table mismatch at {lit}: file {want}, computed {got}")
    return chi


def _read(path_or_name):
    data = resources.files("cmiwasawa.data").joinpath(str(path_or_name) + ".char")
    if "/" not in str(path_or_name) and data.is_file():
        return data.read_text(), None
    p = Path(path_or_name)
    return p.read_text(), p.parent


def load_character(path_or_name, name="psi"):
    text, _ = _read(path_or_name)
    return parse_character(text, name)


def load_pair(path_or_name):
    text, base = _read(path_or_name)
    fields, _ = _parse_lines(text)
    out = []
    for key in ("chi", "chi2"):
        if key not in fields:
            raise CharFileError(f"missing field: {key}")
        ref = fields[key]
        if base is not None and (base / ref).is_file():
            ref = str(base / ref)
        out.append(load_character(ref, key))
    return tuple(out)


def character_text(chi, eps, primes=(), ray=None):
    """Canonical text for a constructed character plus value rows."""
    lines = [f"disc = {chi.K.disc}", f"modulus = {chi.modulus.literal()}", f"k = {chi.k}", f"eps = {eps}"]
    if ray is not None:
        lines.append("ray = " + ",".join(str(x) for x in ray))
    for P in primes:
        lines.append(f"value {P.literal()} = {chi.evaluate(P).text()}")
    return "\n".join(lines) + "\n"
