"""Execute (algorithm x eps x seed) cells and write reports."""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from ..agnostic import AgnosticConfig, run_agnostic, label_bound_shape
from ..baselines import brute_force_optimum, run_passive
from ..cal import is_realizable
from ..reduction import run_approximation, run_group_realizable
from ..regions import disagreement_coefficients
from ..report import RunReport
from ..scenarios import build_scenario
from .config import ConfigError, ExperimentConfig

log = logging.getLogger(__name__)

CSV_COLUMNS = ("scenario", "algorithm", "eps", "seed", "excess", "total_labels", "per_group_labels",
               "theta_max", "runtime_ms", "flagged")


class InvariantViolation(RuntimeError):
    """A structural property of a run failed; never a statistical miss."""


def check_compatibility(cfg: ExperimentConfig, inst):
    if "group_realizable" in cfg.algorithms:
        bad = [g for g in range(inst.n_groups) if not is_realizable(inst, g)]
        if bad:
            line = cfg.line_of.get("algorithms") or cfg.line_of.get("algorithm")
            raise ConfigError(f"group_realizable needs every group realizable; scenario {cfg.scenario!r} "
                              f"has non-realizable groups {bad}", line, cfg.source)


def run_cell(inst, algorithm: str, eps: float, delta: float, seed: int, constant_scale: float = 1.0) -> RunReport:
    if algorithm == "agnostic":
        return run_agnostic(inst, AgnosticConfig(eps, delta, constant_scale), seed)
    if algorithm == "group_realizable":
        return run_group_realizable(inst, eps, delta, seed)
    if algorithm == "approximation":
        return run_approximation(inst, eps, delta, seed, constant_scale=constant_scale)
    if algorithm == "passive":
        return run_passive(inst, eps, delta, seed)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def guarantee_bound(report: RunReport, eps: float) -> float:
    if report.algorithm == "approximation":
        return 2 * max(report.diagnostics["nu_g"]) + eps
    return eps


def structural_checks(report: RunReport):
    if report.excess_true_loss < -1e-12:
        raise InvariantViolation(f"negative excess {report.excess_true_loss}")
    if report.algorithm == "agnostic":
        labeled = [0] * report.ledger.n_groups
        for tr in report.traces:
            for g in range(len(labeled)):
                labeled[g] += tr["labeled_in"][g] + tr["labeled_out"][g]
        if labeled != [int(v) for v in report.ledger.label_queries]:
            raise InvariantViolation("ledger label counts disagree with iteration traces")
        sizes = [tr["vs_size"] for tr in report.traces]
        if any(b > a for a, b in zip(sizes, sizes[1:])):
            raise InvariantViolation("version space grew between iterations")
    if report.algorithm in ("group_realizable", "approximation"):
        if report.diagnostics["labels_after_phase1"] != report.total_labels:
            raise InvariantViolation("relabeling phase charged the label oracle")


@dataclass(frozen=True)
class Cell:
    algorithm: str
    eps: float
    seed: int


def _execute(args) -> dict:
    cfg_echo, cell, seed_offset, theta = args
    scen = cfg_echo["scenario"]
    inst = build_scenario(scen["name"], scen["params"])
    seed = cell.seed + seed_offset
    report = run_cell(inst, cell.algorithm, cell.eps, cfg_echo["delta"], seed, cfg_echo["constant_scale"])
    report.config["scenario"] = scen
    report.diagnostics["theta"] = theta["per_group"]
    report.diagnostics["theta_max"] = theta["max"]
    if report.algorithm == "agnostic":
        env = label_bound_shape(inst.n_groups, theta["max"], report.config["d"], cell.eps, cfg_echo["delta"])
        report.diagnostics["label_bound_shape"] = env
        report.diagnostics["labels_over_bound_shape"] = report.total_labels / env if env > 0 else None
    structural_checks(report)
    bound = guarantee_bound(report, cell.eps)
    report.diagnostics["guarantee_bound"] = bound
    report.diagnostics["guarantee_miss"] = bool(report.excess_true_loss > bound + 1e-12)
    return {"cell": cell, "seed": seed, "report": report.to_dict(timing=True)}


def report_filename(scenario: str, algorithm: str, eps: float, seed: int) -> str:
    return f"{scenario}_{algorithm}_eps{eps:g}_seed{seed}.json"


def _atomic_write(path: Path, text: str):
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def csv_row(scenario: str, rep: dict) -> dict:
    return {
        "scenario": scenario,
        "algorithm": rep["algorithm"],
        "eps": f"{rep['config']['eps']:g}",
        "seed": rep["config"]["seed"],
        "excess": f"{rep['excess_true_loss']:.12g}",
        "total_labels": rep["total_labels"],
        "per_group_labels": ";".join(str(v) for v in rep["ledger"]["label_queries"]),
        "theta_max": f"{rep['diagnostics']['theta_max']:.12g}",
        "runtime_ms": f"{rep.get('runtime_ms') or 0:.3f}",
        "flagged": int(rep["diagnostics"]["guarantee_miss"]),
    }


def write_csv(path: Path, rows: list[dict]):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    _atomic_write(path, buf.getvalue())


@dataclass
class RunOutcome:
    reports: list
    rows: list
    misses: dict
    over_budget: list

    @property
    def ok(self) -> bool:
        return not self.over_budget


def run_experiment(cfg: ExperimentConfig, out_dir, jobs: int = 1, seed_offset: int = 0,
                   figures: bool = True) -> RunOutcome:
    """Run every cell, then write per-run JSON, one aggregate CSV and figures.

    Config/scenario validation happens before anything touches ``out_dir``.
    """
    inst = build_scenario(cfg.scenario, cfg.scenario_params)
    check_compatibility(cfg, inst)
    opt = brute_force_optimum(inst)
    thetas = {}
    for eps in cfg.eps:
        per = disagreement_coefficients(inst, float(opt.nu), eps)
        thetas[eps] = {"per_group": per, "max": max(per)}

    cells = [Cell(a, e, s) for a in cfg.algorithms for e in cfg.eps for s in cfg.seeds]
    echo = cfg.echo()
    args = [(echo, c, seed_offset, thetas[c.eps]) for c in cells]
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_execute, args))
    else:
        results = [_execute(a) for a in args]

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows, reports = [], []
    misses: dict[tuple, int] = {}
    for res in results:
        cell, rep = res["cell"], res["report"]
        _atomic_write(out / report_filename(cfg.scenario, cell.algorithm, cell.eps, res["seed"]),
                      json.dumps(rep, indent=2, sort_keys=True) + "\n")
        rows.append(csv_row(cfg.scenario, rep))
        reports.append(rep)
        if rep["diagnostics"]["guarantee_miss"]:
            misses[(cell.algorithm, cell.eps)] = misses.get((cell.algorithm, cell.eps), 0) + 1
            log.warning("guarantee miss: %s eps=%g seed=%d excess=%.4g", cell.algorithm, cell.eps, res["seed"],
                        rep["excess_true_loss"])
    write_csv(out / "runs.csv", rows)

    budget = int(cfg.delta * len(cfg.seeds))
    over = [k for k, v in misses.items() if v > budget and cfg.constant_scale == 1.0]
    if figures:
        from ..plotting import plot_run_figures

        plot_run_figures(rows, out / "figures")
    return RunOutcome(reports, rows, misses, over)
