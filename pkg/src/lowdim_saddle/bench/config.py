"""Benchmark configuration: one JSON document, unknown keys rejected."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from ..core import SaddleConstants

PROBLEM_METHODS: dict[str, tuple[str, ...]] = {
    "quadratic": ("ellipsoid_dual", "triangle_dual", "dichotomy_outer", "fgm_dual"),
    "logsumexp": ("ellipsoid_dual", "dichotomy_outer", "fgm_dual", "approach2"),
    "bilinear": ("approach1", "approach2", "dichotomy_outer"),
}

INSTANCE_PARAMS: dict[str, tuple[str, ...]] = {
    "quadratic": ("sigma", "r", "inner_iters"),
    "logsumexp": ("alpha0", "k", "mu_x"),
    "bilinear": ("mu_x", "mu_y", "coupling_norm", "half_width", "shift"),
}

QUADRATIC_OVERRIDES = ("Omega", "M_g", "mu_f")
SPEC_OVERRIDES = tuple(f.name for f in fields(SaddleConstants))


def n_y_ok(dims: tuple[int, int]) -> bool:
    return 1 <= dims[1] <= 5


class ConfigError(ValueError):
    """Invalid benchmark configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def default_time_limit(problem: str, dims: tuple[int, int]) -> float:
    # the largest log-sum-exp size gets a doubled budget
    if problem == "logsumexp" and tuple(dims) == (4, 10000):
        return 200.0
    return 100.0


@dataclass
class BenchConfig:
    problem: str
    dims: tuple[int, int]
    eps: list[float]
    methods: list[str]
    seeds: list[int] = field(default_factory=lambda: [0])
    time_limit_sec: float | None = None
    output: str | None = None
    instance: dict = field(default_factory=dict)
    overrides: dict = field(default_factory=dict)
    workers: int = 1

    def __post_init__(self) -> None:
        if self.problem not in PROBLEM_METHODS:
            raise ConfigError("problem", f"unknown problem {self.problem!r}")
        try:
            n, m = (int(d) for d in self.dims)
        except (TypeError, ValueError):
            raise ConfigError("dims", "expected two positive integers") from None
        if n < 1 or m < 1:
            raise ConfigError("dims", "dimensions must be positive")
        self.dims = (n, m)
        if not self.eps:
            raise ConfigError("eps", "need at least one value")
        if any(not (isinstance(e, (int, float)) and e > 0) for e in self.eps):
            raise ConfigError("eps", "values must be positive numbers")
        if any(a <= b for a, b in zip(self.eps, self.eps[1:])):
            raise ConfigError("eps", "values must be strictly descending")
        self.eps = [float(e) for e in self.eps]
        if not self.methods:
            raise ConfigError("methods", "need at least one method")
        allowed = PROBLEM_METHODS[self.problem]
        for meth in self.methods:
            if meth not in allowed:
                raise ConfigError(f"methods.{meth}", f"not available for problem {self.problem!r}")
        if self.problem == "bilinear" and "dichotomy_outer" in self.methods and not n_y_ok(self.dims):
            raise ConfigError("methods.dichotomy_outer", "needs the y dimension (dims[1]) between 1 and 5")
        if not self.seeds or any(not isinstance(s, int) or s < 0 for s in self.seeds):
            raise ConfigError("seeds", "need nonnegative integer seeds")
        if self.time_limit_sec is None:
            self.time_limit_sec = default_time_limit(self.problem, self.dims)
        if not self.time_limit_sec > 0:
            raise ConfigError("time_limit_sec", "must be positive")
        for key in self.instance:
            if key not in INSTANCE_PARAMS[self.problem]:
                raise ConfigError(f"instance.{key}", f"unknown parameter for problem {self.problem!r}")
        valid = QUADRATIC_OVERRIDES if self.problem == "quadratic" else SPEC_OVERRIDES
        for key, value in self.overrides.items():
            if key not in valid:
                raise ConfigError(f"overrides.{key}", "unknown constant")
            if not isinstance(value, (int, float)):
                raise ConfigError(f"overrides.{key}", "must be a number")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError("workers", "must be a positive integer")

    @classmethod
    def from_dict(cls, doc: dict) -> "BenchConfig":
        if not isinstance(doc, dict):
            raise ConfigError("<root>", "config must be a JSON object")
        known = {f.name for f in fields(cls)} | {"seed"}
        for key in doc:
            if key not in known:
                raise ConfigError(key, "unknown key")
        doc = dict(doc)
        if "seed" in doc:
            if "seeds" in doc:
                raise ConfigError("seed", "give either seed or seeds")
            doc["seeds"] = [doc.pop("seed")]
        for key in ("problem", "dims", "eps", "methods"):
            if key not in doc:
                raise ConfigError(key, "missing required key")
        return cls(**doc)

    @classmethod
    def load(cls, path: str | Path) -> "BenchConfig":
        try:
            doc = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError("--config", f"file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError("--config", f"invalid JSON: {exc}") from None
        return cls.from_dict(doc)
