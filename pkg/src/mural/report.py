"""Run reports shared by every learner."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .oracles import QueryLedger


@dataclass
class RunReport:
    algorithm: str
    output_h: int
    ledger: QueryLedger
    config: dict = field(default_factory=dict)
    excess_true_loss: float | None = None
    output_max_loss: float | None = None
    nu: float | None = None
    traces: list = field(default_factory=list)
    subreports: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    runtime_ms: float | None = None
    # in-memory only (tests, counterfactual checks); never serialized
    artifacts: dict = field(default_factory=dict, repr=False)

    @property
    def total_labels(self) -> int:
        return self.ledger.total_labels

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "algorithm": self.algorithm,
            "config": self.config,
            "output_h": int(self.output_h),
            "excess_true_loss": self.excess_true_loss,
            "output_max_loss": self.output_max_loss,
            "nu": self.nu,
            "ledger": self.ledger.snapshot(),
            "total_labels": self.total_labels,
            "diagnostics": self.diagnostics,
            "traces": self.traces,
            "subreports": [s.to_dict(timing=timing) if isinstance(s, RunReport) else s for s in self.subreports],
        }
        if timing:
            out["runtime_ms"] = self.runtime_ms
        return _jsonable(out)

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing=timing), indent=2, sort_keys=True)


def _jsonable(obj: Any):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if hasattr(obj, "numerator") and hasattr(obj, "denominator") and not isinstance(obj, (int, bool)):
        return float(obj)
    return obj


def attach_truth(report: RunReport, inst) -> RunReport:
    """Fill in exact output loss, nu and excess from brute-force enumeration."""
    from .baselines import brute_force_optimum

    opt = brute_force_optimum(inst)
    out_loss = float(opt.max_losses[report.output_h])
    report.output_max_loss = out_loss
    report.nu = float(opt.nu)
    report.excess_true_loss = out_loss - float(opt.nu)
    report.diagnostics.setdefault("optimal_ids", list(opt.tied_ids))
    report.diagnostics.setdefault("nu_g", [float(v) for v in opt.nu_g])
    return report
