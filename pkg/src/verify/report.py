"""
Suite results: per-trial checks with margins, aggregated into a SuiteReport.

JSON output is canonical (sorted keys, two-space indent, floats with 17
significant digits, non-finite numbers and indices as strings), so the same run always
serialises to the same bytes.
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from utils.schema import dumps

LESS_EQUAL = "<="
EQUAL = "=="


@dataclass
class Check:
    """`lhs <= rhs` or `lhs == rhs` within a relative tolerance"""

    name: str
    lhs: float
    rhs: float
    relation: str = LESS_EQUAL
    tol: float = 1e-9

    def __post_init__(self):
        self.lhs = float(self.lhs)
        self.rhs = float(self.rhs)

    @property
    def scale(self) -> float:
        return max(1.0, abs(self.lhs), abs(self.rhs))

    @property
    def margin(self) -> float:
        if self.relation == EQUAL:
            return -abs(self.lhs - self.rhs)
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        if math.isnan(self.lhs) or math.isnan(self.rhs):
            return False
        return self.margin >= -self.tol * self.scale

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "relation": self.relation,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "tol": self.tol,
            "passed": self.passed,
        }


@dataclass
class TrialResult:
    index: int
    inputs: Dict[str, Any]
    checks: List[Check] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.passed for c in self.checks)

    @property
    def worst_margin(self) -> Optional[float]:
        margins = [c.margin / c.scale for c in self.checks]
        return min(margins) if margins else None

    def to_dict(self, full: bool = False) -> Dict:
        out = {
            "index": self.index,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }
        if self.error is not None:
            out["error"] = self.error
        # failing trials always carry their inputs so they can be re-run by hand
        if full or not self.passed:
            out["inputs"] = self.inputs
        return out


@dataclass
class SuiteReport:
    suite: str
    seed: int
    trials: List[TrialResult]
    config: Dict[str, Any] = field(default_factory=dict)
    covers: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(t.passed for t in self.trials)

    @property
    def failures(self) -> List[TrialResult]:
        return [t for t in self.trials if not t.passed]

    @property
    def max_violation(self) -> float:
        margins = [t.worst_margin for t in self.trials if t.worst_margin is not None]
        return max(0.0, -min(margins)) if margins else 0.0

    def to_dict(self, full: bool = False) -> Dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "passed": self.passed,
            "trials": len(self.trials),
            "failures": len(self.failures),
            "max_violation": self.max_violation,
            "config": self.config,
            "covers": list(self.covers),
            "results": [t.to_dict(full) for t in self.trials],
        }

    def to_json(self, full: bool = False) -> str:
        return dumps(self.to_dict(full))

    def to_frame(self) -> pd.DataFrame:
        """One row per check, for tabular printing."""
        rows = []
        for trial in self.trials:
            if trial.error is not None:
                rows.append({"trial": trial.index, "check": "error", "relation": "", "lhs": np.nan,
                             "rhs": np.nan, "margin": np.nan, "passed": False})
            for c in trial.checks:
                rows.append({"trial": trial.index, "check": c.name, "relation": c.relation, "lhs": c.lhs,
                             "rhs": c.rhs, "margin": c.margin, "passed": c.passed})
        return pd.DataFrame(rows, columns=["trial", "check", "relation", "lhs", "rhs", "margin", "passed"])

