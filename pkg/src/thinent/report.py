"""Suite configuration, check records and deterministic JSON reports."""

from __future__ import annotations

import datetime as _dt
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import pmf as pm
from .errors import BadParameter

PASS, FAIL, EXPLORATORY = "pass", "fail", "exploratory"


@dataclass(frozen=True)
class SuiteConfig:
    master_seed: int = 0
    trunc_tol: float = pm.DEFAULT_TRUNC_TOL
    trials: int = 100
    grid_size: int = 101
    tolerance_overrides: dict[str, float] = field(default_factory=dict)
    output_path: str | None = None
    m: int = 8  # Bernoulli-sum size for the path suites

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise BadParameter("trials must be at least 1")
        if not 0 < self.trunc_tol <= 1e-3:
            raise BadParameter("trunc_tol must lie in (0, 1e-3]")
        if any(not v > 0 for v in self.tolerance_overrides.values()):
            raise BadParameter("tolerance overrides must be positive")
        if self.grid_size < 5:
            raise BadParameter("grid size must be at least 5")
        if self.m < 1:
            raise BadParameter("m must be at least 1")
        object.__setattr__(self, "master_seed", int(self.master_seed) & (2**64 - 1))

    def tolerance(self, name: str, default: float) -> float:
        return self.tolerance_overrides.get(name, default)


@dataclass
class Check:
    """One inequality check; ``slack >= 0`` means the inequality holds."""

    name: str
    paper_anchor: str
    slack: float
    tolerance: float
    exploratory: bool = False
    witness: Any = None
    error_budget: float = 0.0

    @property
    def status(self) -> str:
        if self.exploratory:
            return EXPLORATORY
        return FAIL if not self.slack >= -self.tolerance else PASS

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "paper_anchor": self.paper_anchor,
            "status": self.status,
            "slack": self.slack,
            "tolerance": self.tolerance,
            "witness": self.witness,
        }


@dataclass
class InequalityReport:
    suite: str
    checks: list[Check]
    seed: int
    values: dict[str, Any] | None = None
    timestamp: str = field(default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat())

    @property
    def error_budget(self) -> float:
        return max((c.error_budget for c in self.checks), default=0.0)

    @property
    def hard_failures(self) -> list[Check]:
        return [c for c in self.checks if c.status == FAIL]

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "suite": self.suite,
            "checks": [c.to_dict() for c in sorted(self.checks, key=lambda c: c.name)],
            "seed": self.seed,
            "error_budget": self.error_budget,
            "timestamp": self.timestamp,
        }
        if self.values is not None:
            d["values"] = self.values
        return d

    def to_json(self) -> str:
        return dumps(self.to_dict())


def jsonable(obj: Any) -> Any:
    """Plain JSON types; infinities become "+inf"/"-inf" and NaN "nan"."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "+inf" if v > 0 else "-inf"
        return v
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, allow_nan=False)


def append_report(report: InequalityReport, path: str | Path) -> None:
    """Reports accumulate one JSON object per line."""
    with open(path, "a") as fh:
        fh.write(report.to_json() + "\n")
