"""Pair active-learner reports with passive-baseline reports."""

from __future__ import annotations

import glob
import json
import statistics
from pathlib import Path

from .config import scenario_key

COMPARE_COLUMNS = ("scenario", "eps", "algorithm", "baseline", "n_pairs", "active_labels_median",
                   "passive_labels_median", "ratio_median", "ratio_max", "active_excess_mean",
                   "passive_excess_mean")


class CompareError(ValueError):
    pass


def load_reports(patterns) -> list[dict]:
    paths: list[str] = []
    for pat in patterns:
        p = Path(pat)
        if p.is_dir():
            paths.extend(sorted(str(q) for q in p.glob("*.json")))
        else:
            paths.extend(sorted(glob.glob(pat)))
    if not paths:
        raise CompareError(f"no report files matched {list(patterns)}")
    reports = []
    for path in sorted(set(paths)):
        with open(path) as fh:
            rep = json.load(fh)
        if "algorithm" not in rep or "ledger" not in rep:
            continue
        rep["_path"] = path
        reports.append(rep)
    return reports


def _key(rep) -> str:
    scen = rep["config"].get("scenario", {"name": "?", "params": {}})
    return scenario_key(scen["name"], scen.get("params", {}))


def compare_reports(reports: list[dict], baseline: str = "passive") -> list[dict]:
    algos = {r["algorithm"] for r in reports}
    if len(algos) < 2 or baseline not in algos:
        raise CompareError(f"need reports from {baseline!r} and at least one other algorithm; found {sorted(algos)}")
    index: dict[tuple, dict] = {}
    for r in reports:
        k = (_key(r), float(r["config"]["eps"]), r["algorithm"], int(r["config"]["seed"]))
        if k in index:
            raise CompareError(f"duplicate report for {k}: {index[k]['_path']} and {r['_path']}")
        index[k] = r

    base_cells = {(s, e) for (s, e, a, _) in index if a == baseline}
    active_cells = {(s, e, a) for (s, e, a, _) in index if a != baseline}
    offenders = sorted(f"{a} @ {s} eps={e:g}" for (s, e, a) in active_cells if (s, e) not in base_cells)
    if offenders:
        raise CompareError("scenarios without a matching baseline: " + ", ".join(offenders))

    rows = []
    for s, e, a in sorted(active_cells):
        seeds = sorted(sd for (s2, e2, a2, sd) in index if (s2, e2, a2) == (s, e, a))
        missing = [sd for sd in seeds if (s, e, baseline, sd) not in index]
        if missing:
            raise CompareError(f"missing {baseline} pair for {a} @ {s} eps={e:g}, seeds {missing}")
        act = [index[(s, e, a, sd)] for sd in seeds]
        pas = [index[(s, e, baseline, sd)] for sd in seeds]
        ratios = [x["total_labels"] / y["total_labels"] if y["total_labels"] else float("inf")
                  for x, y in zip(act, pas)]
        rows.append({
            "scenario": s,
            "eps": f"{e:g}",
            "algorithm": a,
            "baseline": baseline,
            "n_pairs": len(seeds),
            "active_labels_median": statistics.median(x["total_labels"] for x in act),
            "passive_labels_median": statistics.median(y["total_labels"] for y in pas),
            "ratio_median": f"{statistics.median(ratios):.6g}",
            "ratio_max": f"{max(ratios):.6g}",
            "active_excess_mean": f"{statistics.fmean(x['excess_true_loss'] for x in act):.6g}",
            "passive_excess_mean": f"{statistics.fmean(y['excess_true_loss'] for y in pas):.6g}",
        })
    return rows
