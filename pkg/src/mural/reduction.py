"""Per-group active learning followed by artificial relabeling and minimax ERM.

``run_group_realizable`` uses the realizable learner on each group;
``run_approximation`` substitutes the agnostic learner (restricted to one group)
and carries the weaker additive ``2 max_g nu_g`` guarantee.
"""

from __future__ import annotations

import math
import time

import numpy as np

from .agnostic import AgnosticConfig, run_agnostic
from .baselines import minimax_erm
from .cal import run_cal
from .oracles import LabeledSet, Oracles, label_counts, make_rng, stream_seed
from .regions import Region
from .report import RunReport, attach_truth


def relabel_sample_size(eps: float, delta: float, d: int, n_groups: int) -> int:
    return math.ceil(144 / eps ** 2 * (2 * d * math.log(24 / eps) + math.log(8 * n_groups / delta)))


def _relabel_and_erm(inst, oracles: Oracles, hat_h: list[int], eps: float, delta: float, phase: str):
    """Draw fresh unlabeled points per group, label them with that group's
    learned hypothesis (no oracle charges), and return the minimax ERM."""
    labels = inst.hclass.labels
    n = relabel_sample_size(eps, delta, inst.vc_dim, inst.n_groups)
    full = Region.full(inst.domain.size)
    unlabeled, artificial = [], []
    for g, h in enumerate(hat_h):
        pts, counts = oracles.unlabeled_counts(g, full, n, (phase, "relabel"))
        plus = labels[h, pts] == 1
        artificial.append(LabeledSet(g, pts, np.where(plus, counts, 0), np.where(plus, 0, counts)))
        unlabeled.append((pts, counts))
    return minimax_erm(labels, artificial), n, unlabeled, artificial


def run_group_realizable(inst, eps: float, delta: float, seed: int,
                         oracles: Oracles | None = None) -> RunReport:
    t0 = time.perf_counter()
    oracles = oracles or Oracles(inst, seed)
    G = inst.n_groups
    hat_h, subs = [], []
    for g in range(G):
        res = run_cal(inst, g, eps / 6, delta / (2 * G), oracles=oracles, phase=("group_realizable", "cal"))
        hat_h.append(res.h)
        subs.append({"group": g, "learner": "cal", "h": res.h, "label_queries": res.label_queries,
                     "unlabeled_draws": res.n_draws, "inferred_labels": res.inferred,
                     "version_space_size": len(res.version_space)})
    labels_after_phase1 = oracles.ledger.total_labels
    h, n, unlabeled, artificial = _relabel_and_erm(inst, oracles, hat_h, eps, delta, "group_realizable")
    report = RunReport(
        "group_realizable", h, oracles.ledger,
        config={"eps": eps, "delta": delta, "seed": seed, "relabel_samples_per_group": n,
                "subroutine": "cal", "cal_budget_rule": "ceil((4/eps)(d ln(12/eps) + ln(2/delta)))"},
        subreports=subs,
    )
    report.diagnostics["labels_after_phase1"] = labels_after_phase1
    report.artifacts.update(hat_h=hat_h, unlabeled=unlabeled, artificial=artificial)
    attach_truth(report, inst)
    report.runtime_ms = (time.perf_counter() - t0) * 1e3
    return report


def run_approximation(inst, eps: float, delta: float, seed: int, oracles: Oracles | None = None,
                      constant_scale: float = 1.0) -> RunReport:
    t0 = time.perf_counter()
    oracles = oracles or Oracles(inst, seed)
    G = inst.n_groups
    sub_cfg = AgnosticConfig(eps / 6, delta / (2 * G), constant_scale)
    hat_h, subs = [], []
    for g in range(G):
        sub_seed = int(stream_seed(seed, "approximation", "sub", g).generate_state(1, np.uint64)[0])
        sub = inst.subinstance(g)
        sub_report = run_agnostic(sub, sub_cfg, sub_seed)
        oracles.ledger.absorb(sub_report.ledger, [g])
        hat_h.append(sub_report.output_h)
        subs.append({"group": g, "learner": "agnostic(single group)", "h": sub_report.output_h,
                     "label_queries": sub_report.total_labels,
                     "group_excess": sub_report.excess_true_loss,
                     "iterations": sub_report.config["iterations"]})
    labels_after_phase1 = oracles.ledger.total_labels
    h, n, unlabeled, artificial = _relabel_and_erm(inst, oracles, hat_h, eps, delta, "approximation")
    report = RunReport(
        "approximation", h, oracles.ledger,
        config={"eps": eps, "delta": delta, "seed": seed, "constant_scale": constant_scale,
                "relabel_samples_per_group": n,
                "subroutine": "agnostic multi-group learner run on each group alone (eps/6, delta/2G)"},
        subreports=subs,
    )
    report.diagnostics["labels_after_phase1"] = labels_after_phase1
    report.artifacts.update(hat_h=hat_h, unlabeled=unlabeled, artificial=artificial)
    attach_truth(report, inst)
    nu_g = report.diagnostics["nu_g"]
    report.diagnostics["approximation_bound"] = 2 * max(nu_g) + eps
    report.runtime_ms = (time.perf_counter() - t0) * 1e3
    return report


def counterfactual_sets(inst, report: RunReport, seed: int) -> list[LabeledSet]:
    """Truly labeled versions of the relabeled samples, drawn from an uncharged
    shadow oracle. For checks only."""
    out = []
    for g, (pts, counts) in enumerate(report.artifacts["unlabeled"]):
        rng = make_rng(seed, "shadow", g)
        out.append(label_counts(inst, g, pts, counts, rng, ledger=None))
    return out
