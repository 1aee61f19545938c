"""Experiment configuration and the ``key=value`` config file format."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .graphs import GenConfig
from .inference import DIRECTED, UNDIRECTED
from .simulate import SimConfig

AUTO_K = "auto_truth_edges"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class InferConfig:
    k: int | str = AUTO_K
    mode: str = UNDIRECTED

    def __post_init__(self):
        if self.mode not in (DIRECTED, UNDIRECTED):
            raise ConfigError(f"bad mode {self.mode!r}")
        if isinstance(self.k, str):
            if self.k not in (AUTO_K, "auto"):
                raise ConfigError(f"k must be an integer or {AUTO_K!r}")
        elif self.k < 0:
            raise ConfigError("k must be non-negative")


@dataclass(frozen=True)
class EvalConfig:
    detector_seed: int = 0
    repeats: int = 1

    def __post_init__(self):
        if self.repeats < 1:
            raise ConfigError("repeats must be at least 1")


@dataclass(frozen=True)
class ExperimentConfig:
    gen: GenConfig = field(default_factory=GenConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    infer: InferConfig = field(default_factory=InferConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)
    counts: tuple[int, ...] = (500, 1000, 2000)
    output_dir: str = "experiment"

    def __post_init__(self):
        if not self.counts or min(self.counts) < 1:
            raise ConfigError("counts must be a non-empty list of positive integers")


def parse_value(text: str) -> Any:
    """Scalar or comma list from a config value; ``none`` maps to None."""
    s = text.strip()
    low = s.lower()
    if low in ("none", "null", ""):
        return None
    if low in ("true", "false"):
        return low == "true"
    if "," in s:
        return tuple(parse_value(t) for t in s.split(",") if t.strip())
    for cast in (int, float):
        try:
            return cast(s)
        except ValueError:
            pass
    return s


def read_kv(path) -> dict[str, Any]:
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, val = line.partition("=")
        if not eq:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        out[key.strip()] = parse_value(val)
    return out


def _coerce(cls, name: str, value: Any) -> Any:
    default = {f.name: f for f in dataclasses.fields(cls)}[name]
    hint = str(default.type)
    if value is None:
        return None
    if hint.startswith("tuple"):
        return tuple(value) if isinstance(value, tuple) else (value,)
    if hint.startswith("float") and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if hint == "str" and not isinstance(value, str):
        return str(value)
    return value


def build(cls, values: dict[str, Any], base=None):
    """Instantiate dataclass ``cls`` from ``values`` on top of ``base`` (or defaults)."""
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    kwargs = {}
    if base is not None:
        kwargs = {f.name: getattr(base, f.name) for f in dataclasses.fields(cls)}
    for k, v in values.items():
        kwargs[k] = _coerce(cls, k, v)
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{cls.__name__}: {e}") from e


_SECTIONS = {"gen": GenConfig, "sim": SimConfig, "infer": InferConfig, "eval": EvalConfig}


def experiment_from_kv(values: dict[str, Any], base: ExperimentConfig | None = None) -> ExperimentConfig:
    base = base or ExperimentConfig()
    nested: dict[str, dict[str, Any]] = {s: {} for s in _SECTIONS}
    top: dict[str, Any] = {}
    for key, val in values.items():
        section, dot, name = key.partition(".")
        if dot and section in _SECTIONS:
            nested[section][name] = val
        elif not dot:
            top[key] = val
        else:
            raise ConfigError(f"unknown config section in {key!r}")
    parts = {s: build(cls, nested[s], getattr(base, s)) for s, cls in _SECTIONS.items()}
    return build(ExperimentConfig, {**parts, **top}, base)


def to_kv(cfg) -> str:
    lines = []

    def emit(prefix, obj):
        for f in dataclasses.fields(obj):
            val = getattr(obj, f.name)
            if dataclasses.is_dataclass(val):
                emit(f"{prefix}{f.name}.", val)
                continue
            if val is None:
                text = "none"
            elif isinstance(val, tuple):
                text = ",".join(map(str, val))
            else:
                text = str(val)
            lines.append(f"{prefix}{f.name}={text}")

    emit("", cfg)
    return "\n".join(lines) + "\n"


def config_hash(obj) -> str:
    if dataclasses.is_dataclass(obj):
        obj = dataclasses.asdict(obj)
    blob = json.dumps(obj, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
