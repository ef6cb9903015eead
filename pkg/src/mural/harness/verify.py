"""Recompute a report's excess from the instance document alone.

Deliberately written with plain loops over the serialized instance so it
shares no code with the loss routines it checks.
"""

from __future__ import annotations

TOL = 1e-9


def _loss(labels, marginal, eta) -> float:
    total = 0.0
    for lab, p, e in zip(labels, marginal, eta):
        total += p * ((1.0 - e) if lab == 1 else e)
    return total


def recompute_excess(instance: dict, h: int) -> tuple[float, float]:
    """(true max loss of hypothesis h, minimax value nu)."""
    hyps = instance["hypotheses"]
    groups = instance["groups"]
    best = None
    out = None
    for i, labels in enumerate(hyps):
        worst = max(_loss(labels, grp["marginal"], grp["eta"]) for grp in groups)
        best = worst if best is None else min(best, worst)
        if i == h:
            out = worst
    if out is None:
        raise ValueError(f"report output {h} is not a hypothesis of the instance")
    return out, best


def verify_report(report: dict, instance: dict) -> list[str]:
    """Problems found (empty list means the report checks out)."""
    problems = []
    out_loss, nu = recompute_excess(instance, int(report["output_h"]))
    if abs((out_loss - nu) - report["excess_true_loss"]) > TOL:
        problems.append(f"excess {report['excess_true_loss']!r} != recomputed {out_loss - nu!r}")
    if report.get("nu") is not None and abs(report["nu"] - nu) > TOL:
        problems.append(f"nu {report['nu']!r} != recomputed {nu!r}")
    ledger = report["ledger"]
    if sum(ledger["label_queries"]) != report["total_labels"]:
        problems.append("total_labels does not equal the ledger sum")
    if len(ledger["label_queries"]) != len(instance["groups"]):
        problems.append("ledger group count does not match the instance")
    if report["algorithm"] == "agnostic" and report.get("traces"):
        per_group = [0] * len(instance["groups"])
        for tr in report["traces"]:
            for g in range(len(per_group)):
                per_group[g] += tr["labeled_in"][g] + tr["labeled_out"][g]
        if per_group != ledger["label_queries"]:
            problems.append(f"traces account for {per_group} labels, ledger says {ledger['label_queries']}")
    return problems
