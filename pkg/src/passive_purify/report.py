"""Verification reports and their JSON serialisation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

SCHEMA_VERSION = 1


def _plain(obj):
    """Convert numpy scalars/arrays and complex numbers into JSON-native values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


@dataclass
class VerificationReport:
    check: str
    params: Dict[str, Any]
    residual: float
    tolerance: float
    tail: float = 0.0
    seed: Optional[int] = None
    details: Dict[str, Any] = field(default_factory=dict)
    wall_time: Optional[float] = None

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance + self.tail)

    def to_dict(self, timing: bool = False) -> dict:
        out = {
            "check": self.check,
            "params": _plain(self.params),
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "tail": float(self.tail),
            "passed": self.passed,
            "seed": self.seed,
            "details": _plain(self.details),
        }
        if timing:
            out["wall_time"] = self.wall_time
        return out

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return (
            f"[{flag}] {self.check}: residual={self.residual:.3e} "
            f"tolerance={self.tolerance:.1e} tail={self.tail:.1e}"
        )


def dumps_reports(command: str, reports: List[VerificationReport], config: dict, timing: bool = False) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": _plain(config),
        "passed": all(r.passed for r in reports),
        "reports": [r.to_dict(timing) for r in reports],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def recheck(doc: dict) -> bool:
    """Recompute every pass flag from residual, tolerance and tail."""
    return all(
        (r["residual"] <= r["tolerance"] + r["tail"]) == r["passed"] for r in doc["reports"]
    )
