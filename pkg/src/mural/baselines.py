"""Ground truth by enumeration, and the passive uniform-allocation learner."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .domain import loss_matrix
from .estimation import empirical_losses
from .oracles import Oracles
from .regions import Region
from .report import RunReport, attach_truth

TIE_TOL = 1e-12


@dataclass(frozen=True)
class Optimum:
    h: int
    nu: float
    nu_g: tuple
    tied_ids: tuple
    max_losses: np.ndarray


def brute_force_optimum(inst) -> Optimum:
    """Exact minimax hypothesis, its value nu, and per-group optima nu_g."""
    losses = loss_matrix(inst)
    max_losses = losses.max(axis=1)
    nu = min(max_losses)
    exact = losses.dtype == object
    tied = tuple(int(i) for i, v in enumerate(max_losses) if (v == nu if exact else v <= nu + TIE_TOL))
    nu_g = tuple(min(losses[:, g]) for g in range(losses.shape[1]))
    return Optimum(tied[0], nu, nu_g, tied, max_losses)


def minimax_erm(labels: np.ndarray, sets) -> int:
    """argmin_h max_g empirical loss on the per-group sets; lowest id on ties."""
    per_group = np.stack([empirical_losses(labels, s) for s in sets])
    return int(np.argmin(per_group.max(axis=0)))


def passive_sample_size(eps: float, delta: float, d: int, n_groups: int) -> int:
    return math.ceil(8 / eps ** 2 * (2 * d * math.log(13 / eps) + math.log(4 * n_groups / delta)))


def run_passive(inst, eps: float, delta: float, seed: int, oracles: Oracles | None = None) -> RunReport:
    """Label a uniform per-group sample and return the minimax ERM."""
    t0 = time.perf_counter()
    oracles = oracles or Oracles(inst, seed)
    n = passive_sample_size(eps, delta, inst.vc_dim, inst.n_groups)
    full = Region.full(inst.domain.size)
    sets = [oracles.labeled_set(g, full, n, ("passive",)) for g in range(inst.n_groups)]
    h = minimax_erm(inst.hclass.labels, sets)
    report = RunReport(
        "passive", h, oracles.ledger,
        config={"eps": eps, "delta": delta, "seed": seed, "per_group_samples": n,
                "sample_size_rule": "ceil(8/eps^2 (2d ln(13/eps) + ln(4G/delta)))"},
    )
    attach_truth(report, inst)
    report.runtime_ms = (time.perf_counter() - t0) * 1e3
    return report
