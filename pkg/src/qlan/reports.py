"""Report records produced by experiments and serialized by the CLI."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

CAMPAIGN_COLUMNS = (
    "experiment", "d", "r", "n", "reps", "seed",
    "mc_estimate", "mc_stderr", "theory", "elapsed_ms",
)


def _plain(value: Any) -> Any:
    """Convert numpy scalars/arrays and non-finite floats into JSON-safe values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, complex):
        return [_plain(value.real), _plain(value.imag)]
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return value


@dataclass
class RiskReport:
    experiment: str
    config: dict
    mc_estimate: float
    mc_stderr: float
    theory: float | None
    reps: int
    seed: int
    elapsed_ms: float = 0.0
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return _plain(asdict(self))

    def campaign_row(self) -> dict:
        cfg = self.config
        row = {
            "experiment": self.experiment,
            "d": cfg.get("d"),
            "r": cfg.get("r"),
            "n": cfg.get("n"),
            "reps": self.reps,
            "seed": self.seed,
            "mc_estimate": self.mc_estimate,
            "mc_stderr": self.mc_stderr,
            "theory": self.theory,
            "elapsed_ms": round(self.elapsed_ms, 3),
        }
        return _plain(row)


@dataclass(frozen=True)
class CheckRecord:
    check: str
    shape: tuple[int, ...]
    residual: float
    passed: bool
    detail: str = ""


@dataclass
class VerificationReport:
    records: list[CheckRecord] = field(default_factory=list)
    elapsed_ms: float = 0.0
    config: dict = field(default_factory=dict)

    def add(self, check: str, shape, residual: float, threshold: float, detail: str = "") -> CheckRecord:
        rec = CheckRecord(check, tuple(int(x) for x in shape), float(residual), bool(residual <= threshold), detail)
        self.records.append(rec)
        return rec

    def add_flag(self, check: str, shape, ok: bool, detail: str = "") -> CheckRecord:
        rec = CheckRecord(check, tuple(int(x) for x in shape), 0.0 if ok else 1.0, bool(ok), detail)
        self.records.append(rec)
        return rec

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def failures(self) -> list[CheckRecord]:
        return [r for r in self.records if not r.passed]

    def max_residual(self, check: str) -> float:
        vals = [r.residual for r in self.records if r.check == check]
        return max(vals) if vals else 0.0

    def to_dict(self) -> dict:
        return _plain({
            "experiment": "schurweyl-verify",
            "config": self.config,
            "passed": self.passed,
            "n_checks": len(self.records),
            "n_failed": len(self.failures()),
            "elapsed_ms": self.elapsed_ms,
            "records": [asdict(r) for r in self.records],
        })
