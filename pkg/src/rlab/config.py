"""Experiment configuration read from TOML files.

Every section has defaults; only ``kind``, ``seed`` and ``[system]`` are
required.  Unknown keys are rejected so typos surface as usage errors.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import UsageError
from .systems import (
    CAT_MATRIX,
    GOLDEN,
    CircleRotation,
    ExpandingCircleMap,
    SystemSpec,
    ToralAutomorphism,
)

KINDS = ("recurrence", "dimension", "correlation", "entropy", "partition", "longfly", "validate", "verify")
SYSTEMS = ("cat", "toral", "doubling", "expanding", "rotation")
MAX_SEED = (1 << 64) - 1


@dataclass
class SystemConfig:
    system: str = "cat"
    matrix: list[list[int]] | None = None
    m: int = 2
    alpha: float = GOLDEN
    seed: int | None = None  # digit stream; defaults to the master seed
    tail: str = "random"

    def build(self, master_seed: int) -> SystemSpec:
        if self.system == "cat":
            return ToralAutomorphism(self.matrix or CAT_MATRIX)
        if self.system == "toral":
            if not self.matrix:
                raise UsageError("system 'toral' needs a matrix")
            return ToralAutomorphism(self.matrix)
        if self.system in ("doubling", "expanding"):
            m = 2 if self.system == "doubling" else self.m
            return ExpandingCircleMap(m, self.seed if self.seed is not None else master_seed, self.tail)
        if self.system == "rotation":
            return CircleRotation.from_real(self.alpha)
        raise UsageError(f"unknown system {self.system!r}; expected one of {SYSTEMS}")


@dataclass
class GridConfig:
    m_min: float = 3.0
    m_max: float = 7.0
    step: float = 1.0


@dataclass
class RecurrenceConfig:
    points: int = 200
    n_max: int = 10_000_000


@dataclass
class DimensionConfig:
    points: int = 100
    model: str = "analytic"
    samples: int = 100_000


@dataclass
class CorrelationConfig:
    q: list[int] = field(default_factory=lambda: [1])
    phase: str = "cos"
    n_max: int = 100
    samples: int = 1_000_000
    estimator: str = "space"


@dataclass
class EntropyConfig:
    g: int = 1
    n_min: int = 10
    n_max: int = 20
    n_step: int = 1
    points: int = 100
    k_max: int = 10_000_000


@dataclass
class PartitionConfig:
    s: float = 0.1
    samples: int = 0  # 0 selects (4/s)^k, the documented minimum
    depth: int = 8


@dataclass
class LongFlyConfig:
    r: float = math.exp(-5)
    delta: float = 0.5
    epsilon: float = 0.2
    points: int = 500
    budget: int = 100_000_000


@dataclass
class Tolerances:
    slope: float = 0.15
    inequality: float = 0.2
    inequality_fraction: float = 0.9
    entropy_rel: float = 0.2
    entropy_abs: float = 0.05
    conformal: float = 0.1
    longfly_rate: float = 0.95


@dataclass
class ExperimentConfig:
    kind: str
    seed: int
    system: SystemConfig
    grid: GridConfig = field(default_factory=GridConfig)
    recurrence: RecurrenceConfig = field(default_factory=RecurrenceConfig)
    dimension: DimensionConfig = field(default_factory=DimensionConfig)
    correlation: CorrelationConfig = field(default_factory=CorrelationConfig)
    entropy: EntropyConfig = field(default_factory=EntropyConfig)
    partition: PartitionConfig = field(default_factory=PartitionConfig)
    longfly: LongFlyConfig = field(default_factory=LongFlyConfig)
    tolerances: Tolerances = field(default_factory=Tolerances)
    threads: int = 1
    out: str = "results"
    gnuplot: bool = False

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form; output location and thread count excluded."""
        d = self.to_dict()
        for key in ("out", "threads"):
            d.pop(key)
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def build_system(self) -> SystemSpec:
        return self.system.build(self.seed)


_SECTIONS = {
    "system": SystemConfig, "grid": GridConfig, "recurrence": RecurrenceConfig,
    "dimension": DimensionConfig, "correlation": CorrelationConfig, "entropy": EntropyConfig,
    "partition": PartitionConfig, "longfly": LongFlyConfig, "tolerances": Tolerances,
}


def _section(cls, data: dict, name: str):
    if not isinstance(data, dict):
        raise UsageError(f"[{name}] must be a table")
    known = {f.name for f in dataclasses.fields(cls)}
    extra = set(data) - known
    if extra:
        raise UsageError(f"unknown keys in [{name}]: {sorted(extra)}")
    return cls(**data)


def _check(cond: bool, message: str) -> None:
    if not cond:
        raise UsageError(message)


def validate(cfg: ExperimentConfig) -> ExperimentConfig:
    _check(cfg.kind in KINDS, f"kind must be one of {KINDS}")
    _check(isinstance(cfg.seed, int) and 0 <= cfg.seed <= MAX_SEED, "seed must be an unsigned 64-bit integer")
    _check(cfg.system.system in SYSTEMS, f"system must be one of {SYSTEMS}")
    _check(cfg.system.m >= 2, "m must be >= 2")
    _check(cfg.system.seed is None or 0 <= cfg.system.seed <= MAX_SEED, "system seed must be a u64")
    g = cfg.grid
    _check(0 < g.step and g.m_min < g.m_max, "grid needs step > 0 and m_min < m_max")
    _check(math.exp(-g.m_min) < 0.5, "largest radius e^-m_min must be below 1/2")
    _check(cfg.recurrence.points >= 1 and cfg.recurrence.n_max >= 1, "recurrence points and n_max must be positive")
    _check(cfg.dimension.model in ("analytic", "empirical"), "dimension model must be 'analytic' or 'empirical'")
    _check(cfg.dimension.points >= 1, "dimension points must be positive")
    _check(cfg.correlation.phase in ("cos", "sin"), "phase must be cos or sin")
    _check(cfg.correlation.estimator in ("space", "time"), "estimator must be space or time")
    _check(cfg.correlation.samples >= 1000 and cfg.correlation.n_max >= 1, "correlation needs samples >= 1000")
    e = cfg.entropy
    _check(1 <= e.n_min <= e.n_max and e.n_step >= 1 and e.g >= 1, "entropy needs 1 <= n_min <= n_max, g >= 1")
    _check(e.points >= 50 and e.k_max >= 1, "entropy needs at least 50 points")
    _check(0 < cfg.partition.s < 0.5 and cfg.partition.depth >= 1, "partition needs 0 < s < 1/2 and depth >= 1")
    lf = cfg.longfly
    _check(0 < lf.r < 0.5 and lf.delta > 0 and 0 < lf.epsilon < 1, "longfly needs 0<r<1/2, delta>0, 0<epsilon<1")
    _check(lf.points >= 1 and lf.budget >= 1, "longfly points and budget must be positive")
    _check(cfg.threads >= 1, "threads must be >= 1")
    t = cfg.tolerances
    _check(all(v >= 0 for v in dataclasses.astuple(t)), "tolerances must be nonnegative")
    return cfg


def from_dict(data: dict[str, Any]) -> ExperimentConfig:
    data = dict(data)
    for key in ("kind", "seed", "system"):
        if key not in data:
            raise UsageError(f"config is missing required key {key!r}")
    sections = {name: _section(cls, data.pop(name), name) for name, cls in _SECTIONS.items() if name in data}
    top = {f.name for f in dataclasses.fields(ExperimentConfig)} - set(_SECTIONS)
    extra = set(data) - top
    if extra:
        raise UsageError(f"unknown top-level keys: {sorted(extra)}")
    try:
        cfg = ExperimentConfig(**data, **sections)
    except TypeError as exc:
        raise UsageError(str(exc)) from None
    return validate(cfg)


def load(path: str | Path, **overrides) -> ExperimentConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    data.update({k: v for k, v in overrides.items() if v is not None})
    return from_dict(data)
