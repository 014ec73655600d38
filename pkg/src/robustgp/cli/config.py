"""Run configuration: defaults, flat ``key = value`` files, and validation.

Config files hold one ``key = value`` pair per line; blank lines and ``#``
comments are ignored.  Keys use the long flag names with dashes or
underscores (``gap-tol`` and ``gap_tol`` are the same key).  Values given on
the command line override the file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from ..formulations import METHODS, method_name
from ..uncertainty import BOX, ELLIPTICAL


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    method: str = "best-pairs"
    set: str = BOX
    gamma: float = 1.0
    gammas: str = "0:0.2:1"
    methods: str = ",".join(METHODS)
    r: int | None = None
    gap_tol: float = 1e-3
    r_cap: int = 100
    samples: int = 1000
    sim_gamma: float | None = None
    seed: int = 0
    max_iters: int = 20
    feas_tol: float = 1e-8
    opt_tol: float = 1e-9
    output: str | None = None

    def validate(self) -> "RunConfig":
        try:
            self.method = method_name(self.method) if self.method != "nominal" else "nominal"
            self.methods = ",".join(method_name(m.strip()) for m in self.methods.split(",") if m.strip())
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not self.methods:
            raise ConfigError("methods list is empty")
        if self.set not in (BOX, ELLIPTICAL):
            raise ConfigError(f"set must be {BOX!r} or {ELLIPTICAL!r}")
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise ConfigError("gamma must be a non-negative number")
        if self.sim_gamma is not None and not self.sim_gamma >= 0:
            raise ConfigError("sim-gamma must be non-negative")
        if self.r is not None and self.r < 2:
            raise ConfigError("r must be at least 2")
        if self.r_cap < 2:
            raise ConfigError("r-cap must be at least 2")
        if not self.gap_tol > 0:
            raise ConfigError("gap-tol must be positive")
        if self.samples < 1:
            raise ConfigError("samples must be at least 1")
        if self.max_iters < 0:
            raise ConfigError("max-iters must be non-negative")
        if not (self.feas_tol > 0 and self.opt_tol > 0):
            raise ConfigError("tolerances must be positive")
        parse_grid(self.gammas)
        return self

    def grid(self) -> list[float]:
        return parse_grid(self.gammas)


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(key: str, text: str):
    typ = _TYPES[key]
    if text.lower() in ("none", "") and "None" in typ:
        return None
    try:
        if typ.startswith("int"):
            return int(text)
        if typ.startswith("float"):
            return float(text)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r}") from None
    return text


def normalize_key(key: str) -> str:
    k = key.strip().replace("-", "_")
    if k not in _TYPES:
        raise ConfigError(f"unknown config key {key.strip()!r}")
    return k


def parse_config(text: str) -> dict:
    out = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {n}: expected key = value")
        key, value = line.split("=", 1)
        k = normalize_key(key)
        out[k] = _convert(k, value.strip())
    return out


def build_config(file_values: dict | None, overrides: dict) -> RunConfig:
    """Defaults, then file values, then explicit command-line values."""
    cfg = RunConfig()
    for source in (file_values or {}, overrides):
        for k, v in source.items():
            setattr(cfg, k, v)
    return cfg.validate()


def parse_grid(spec: str) -> list[float]:
    """``a:step:b`` (inclusive) or a comma list of values."""
    spec = spec.strip()
    try:
        if ":" in spec:
            a, step, b = (float(s) for s in spec.split(":"))
            if not step > 0 or b < a:
                raise ConfigError(f"bad grid {spec!r}")
            n = int(math.floor((b - a) / step + 1e-9)) + 1
            vals = [round(a + i * step, 12) for i in range(n)]
        else:
            vals = [float(s) for s in spec.split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"bad grid {spec!r}") from None
    if not vals or any(v < 0 for v in vals) or any(y <= x for x, y in zip(vals, vals[1:])):
        raise ConfigError(f"grid {spec!r} must be non-negative and strictly increasing")
    return vals
