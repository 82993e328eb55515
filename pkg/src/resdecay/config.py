"""Run configuration: nested dataclasses loaded from JSON with flag overrides."""

from __future__ import annotations

import dataclasses
import json
import re
from dataclasses import dataclass, field
from pathlib import Path


class ConfigError(ValueError):
    """Invalid configuration; carries the offending field path and source line."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        where = ""
        if field:
            where += f"{field}: "
        if line:
            where = f"line {line}: " + where
        super().__init__(where + message)


@dataclass
class PotentialConfig:
    lam: float = 6.0
    a: float = 1.0


@dataclass
class InitialConfig:
    kind: str = "box"  # box | factorized | entangled
    alpha: int = 1
    beta: int = 2
    sign: int = -1


@dataclass
class TruncationConfig:
    tol: float | None = 1e-8
    n: int | None = None


@dataclass
class TimeGridConfig:
    t_min: float = 1e-3
    t_max: float = 1e4
    points: int = 400
    unit: str = "lifetime"  # lifetime | absolute


@dataclass
class SpatialGridConfig:
    points: int = 32


@dataclass
class OutputConfig:
    directory: str = "resdecay-out"
    curves: bool = True
    frames: bool = True


@dataclass
class PolesConfig:
    n: int = 10


@dataclass
class TailfitConfig:
    quantity: str = "survival"  # survival | wavefunction
    window: list = field(default_factory=lambda: [1e3, 1e4])
    r: list = field(default_factory=lambda: [0.3, 0.6])
    points: int = 200


@dataclass
class AuditConfig:
    tolerance: float = 1e-3


@dataclass
class RunConfig:
    potential: PotentialConfig = field(default_factory=PotentialConfig)
    initial: InitialConfig = field(default_factory=InitialConfig)
    truncation: TruncationConfig = field(default_factory=TruncationConfig)
    time_grid: TimeGridConfig = field(default_factory=TimeGridConfig)
    spatial_grid: SpatialGridConfig = field(default_factory=SpatialGridConfig)
    outputs: OutputConfig = field(default_factory=OutputConfig)
    poles: PolesConfig = field(default_factory=PolesConfig)
    tailfit: TailfitConfig = field(default_factory=TailfitConfig)
    audit: AuditConfig = field(default_factory=AuditConfig)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def physics_dict(self) -> dict:
        """Everything that affects numbers; used for the config hash."""
        d = self.to_dict()
        d["outputs"] = {k: v for k, v in d["outputs"].items() if k != "directory"}
        return d


# JSON spells lambda out; the dataclass cannot
_ALIASES = {"lambda": "lam"}


def _locate(text: str | None, path: list[str]) -> int | None:
    if not text:
        return None
    pos = 0
    found = None
    for key in path:
        name = next((k for k, v in _ALIASES.items() if v == key), key)
        m = re.compile(r'"%s"\s*:' % re.escape(name)).search(text, pos)
        if m is None:
            return found
        pos = m.start()
        found = text.count("\n", 0, pos) + 1
    return found


def _coerce(value, ftype: str, where: str, text, path):
    def fail(msg):
        raise ConfigError(msg, where, _locate(text, path))

    base = ftype.replace(" | None", "")
    if value is None:
        if "None" in ftype:
            return None
        fail("may not be null")
    if base == "bool":
        if not isinstance(value, bool):
            fail("expected true or false")
        return value
    if isinstance(value, bool):
        fail(f"expected {base}, got a boolean")
    if base == "int":
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if not isinstance(value, int):
            fail("expected an integer")
        return value
    if base == "float":
        if not isinstance(value, (int, float)):
            fail("expected a number")
        return float(value)
    if base == "str":
        if not isinstance(value, str):
            fail("expected a string")
        return value
    if base == "list":
        if not isinstance(value, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            fail("expected a list of numbers")
        return [float(v) for v in value]
    fail(f"unsupported field type {ftype}")


def _build(cls, data, prefix: list[str], text):
    where = ".".join(prefix) or "<root>"
    if not isinstance(data, dict):
        raise ConfigError("expected an object", where, _locate(text, prefix))
    fields = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for raw_key, value in data.items():
        key = _ALIASES.get(raw_key, raw_key)
        path = prefix + [key]
        if key not in fields:
            raise ConfigError("unknown field", ".".join(prefix + [raw_key]),
                              _locate(text, prefix + [raw_key]))
        f = fields[key]
        if dataclasses.is_dataclass(f.default_factory if f.default_factory is not
                                    dataclasses.MISSING else None):
            kwargs[key] = _build(f.default_factory, value, path, text)
        else:
            kwargs[key] = _coerce(value, str(f.type), ".".join(path), text, path)
    return cls(**kwargs)


def validate(cfg: RunConfig, text: str | None = None) -> RunConfig:
    def check(ok, path, msg):
        if not ok:
            raise ConfigError(msg, path, _locate(text, path.split(".")))

    p, ini, tr, tg = cfg.potential, cfg.initial, cfg.truncation, cfg.time_grid
    check(p.lam > 0, "potential.lam", "lambda must be positive")
    check(p.a > 0, "potential.a", "shell radius must be positive")
    check(ini.kind in ("box", "factorized", "entangled"), "initial.kind",
          "must be one of box, factorized, entangled")
    check(ini.alpha >= 1, "initial.alpha", "must be a positive integer")
    check(ini.beta >= 1, "initial.beta", "must be a positive integer")
    check(ini.sign in (1, -1), "initial.sign", "must be +1 or -1")
    check((tr.tol is None) != (tr.n is None), "truncation",
          "give exactly one of tol and n")
    if tr.tol is not None:
        check(0 < tr.tol < 1, "truncation.tol", "must lie in (0, 1)")
    if tr.n is not None:
        check(1 <= tr.n <= 5000, "truncation.n", "must lie in [1, 5000]")
    check(tg.t_min > 0, "time_grid.t_min", "must be positive")
    check(tg.t_max > tg.t_min, "time_grid.t_max", "must exceed t_min")
    check(tg.points >= 2, "time_grid.points", "need at least two points")
    check(tg.unit in ("lifetime", "absolute"), "time_grid.unit",
          "must be lifetime or absolute")
    check(cfg.spatial_grid.points >= 1, "spatial_grid.points", "must be positive")
    check(cfg.poles.n >= 1, "poles.n", "must be positive")
    tf = cfg.tailfit
    check(tf.quantity in ("survival", "wavefunction"), "tailfit.quantity",
          "must be survival or wavefunction")
    check(len(tf.window) == 2, "tailfit.window", "expected [t_lo, t_hi]")
    check(0 < tf.window[0] < tf.window[1], "tailfit.window", "need 0 < t_lo < t_hi")
    check(len(tf.r) == 2 and all(0 <= x < p.a for x in tf.r), "tailfit.r",
          "expected two interior positions in [0, a)")
    check(tf.points >= 3, "tailfit.points", "need at least three points")
    check(0 < cfg.audit.tolerance < 1, "audit.tolerance", "must lie in (0, 1)")
    return cfg


def loads(text: str) -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, None, exc.lineno) from None
    return validate(_build(RunConfig, data, [], text), text)


def load(path) -> RunConfig:
    return loads(Path(path).read_text())


def override(cfg: RunConfig, dotted: str, value) -> None:
    """Set ``section.field`` on ``cfg``; flags use this so they win over the file."""
    section, name = dotted.split(".")
    setattr(getattr(cfg, section), name, value)
