"""Run configuration: defaults, key=value files and validation.

Config file format, one setting per line, '#' starts a comment:

    prime = 5
    precision = 20
    trunc = 24
    bound = 500
    cutoff = 10000
    J = 25
    seed = 0
    character = gauss32
    character2 = sqrtm7
    pair = pair_class3
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace


class ConfigError(ValueError):
    def __init__(self, field, msg):
        super().__init__(f"{field}: {msg}")
        self.field = field


@dataclass(frozen=True)
class RunConfig:
    prime: int = 5
    precision: int = 20
    trunc: int = 24
    bound: int = 500
    cutoff: int = 10000
    J: int = 25
    seed: int = 0
    character: str = "gauss32"
    character2: str = "sqrtm7"
    pair: str = "pair_class3"

    def validate(self):
        if self.prime < 5:
            raise ConfigError("prime", "must be a prime >= 5")
        from sympy import isprime
        if not isprime(self.prime):
            raise ConfigError("prime", "must be a prime >= 5")
        for name in ("precision", "trunc", "bound", "cutoff", "J"):
            if getattr(self, name) <= 0:
                raise ConfigError(name, "must be positive")
        return self

    def with_overrides(self, **kw):
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw).validate()


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def parse_config(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not sep:
            raise ConfigError(f"line {lineno}", "expected key = value")
        if key not in _TYPES:
            raise ConfigError(key, "unknown field")
        if _TYPES[key] in ("int", int):
            try:
                out[key] = int(val)
            except ValueError:
                raise ConfigError(key, f"not an integer: {val!r}") from None
        else:
            out[key] = val
    return out


def load_config(path=None, **overrides) -> RunConfig:
    base = {}
    if path is not None:
        with open(path) as fh:
            base = parse_config(fh.read())
    return RunConfig(**base).with_overrides(**overrides)
