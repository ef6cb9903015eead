"""General agnostic multi-group active learner.

Iterative version-space elimination: each round labels a sample from the
current disagreement region and a sample from its complement for every group,
scores survivors with the two-part max-over-groups estimate and discards any
hypothesis more than 2^(I-i) eps / 4 above the round's minimizer.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, asdict

import numpy as np

from .domain import max_loss_vector
from .estimation import estimate_all
from .oracles import Oracles
from .regions import EmptyVersionSpaceError, VersionSpace, disagreement_region
from .report import RunReport, attach_truth

ELIM_TOL = 1e-12


@dataclass(frozen=True)
class AgnosticConfig:
    eps: float
    delta: float
    constant_scale: float = 1.0
    d_override: int | None = None
    # skip remaining rounds once one hypothesis is left (its output is fixed)
    stop_when_resolved: bool = False

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if not 0 < self.constant_scale <= 1:
            raise ValueError("constant_scale must lie in (0, 1]")
        if self.d_override is not None and self.d_override < 1:
            raise ValueError("d_override must be a positive integer")


def n_iterations(eps: float) -> int:
    """ceil(log2(1/eps)); 0 when eps >= 1."""
    if eps >= 1:
        return 0
    return math.ceil(math.log2(1 / eps) - 1e-9)


def round_sizes(i: int, I: int, m_i: float, eps: float, delta: float, d: int, G: int,
                c: float = 1.0) -> tuple[int, int]:
    """Labeled sample sizes (in-region, complement) for round i of I."""
    L = max(I, 1)
    scale = eps * 2.0 ** (I - i)
    n_in = c * 1024 * (m_i / scale) ** 2 * (2 * d * math.log(64 / eps) + math.log(8 * G * L / delta))
    n_out = c * 128 * math.log(4 * G * L / delta) / scale ** 2
    return math.ceil(n_in - 1e-9), math.ceil(n_out - 1e-9)


def label_bound_shape(G: int, theta: float, d: int, eps: float, delta: float) -> float:
    """Constant-free shape of the label bound at nu = 0:
    G theta^2 (d log2(1/eps) + ln(1/delta)) log2(1/eps) + G ln(1/delta) log2(1/eps) / eps^2.
    """
    lg = math.log2(1 / eps)
    return G * theta ** 2 * (d * lg + math.log(1 / delta)) * lg + G * math.log(1 / delta) * lg / eps ** 2


def _estimation_round(inst, oracles, vs, i, I, cfg, d):
    G = inst.n_groups
    region = disagreement_region(inst.hclass, vs)
    w = [np.asarray(grp.marginal, dtype=np.float64) for grp in inst.groups]
    masses_in = [float(wg[region.mask].sum()) for wg in w]
    masses_out = [float(wg[~region.mask].sum()) for wg in w]
    m_i = max(masses_in)
    n_in, n_out = round_sizes(min(i, I), I, m_i, cfg.eps, cfg.delta, d, G, cfg.constant_scale)
    outside = region.complement()
    sets = []
    for g in range(G):
        s_in = oracles.labeled_set(g, region, n_in, ("agnostic", i, "in"))
        s_out = oracles.labeled_set(g, outside, n_out, ("agnostic", i, "out"))
        sets.append((s_in, s_out))
    est = estimate_all(inst, vs, region, sets)
    trace = {
        "iter": i,
        "region": region.indices.tolist(),
        "region_mass": masses_in,
        "complement_mass": masses_out,
        "m_i": m_i,
        "n_in": n_in,
        "n_out": n_out,
        "labeled_in": [len(s) for s, _ in sets],
        "labeled_out": [len(s) for _, s in sets],
        "vs_size": len(vs),
        "representative": est.representative,
    }
    return est, trace


def run_agnostic(inst, cfg: AgnosticConfig, seed: int, oracles: Oracles | None = None) -> RunReport:
    t0 = time.perf_counter()
    oracles = oracles or Oracles(inst, seed)
    d = cfg.d_override or inst.vc_dim
    I = n_iterations(cfg.eps)
    vs = VersionSpace.full(len(inst.hclass))
    traces = []
    resolved_at = None
    for i in range(1, I + 1):
        if len(vs) == 1 and cfg.stop_when_resolved:
            resolved_at = i
            break
        est, trace = _estimation_round(inst, oracles, vs, i, I, cfg, d)
        scores = est.max_over_groups
        k = int(np.argmin(scores))
        width = 2.0 ** (I - i) * cfg.eps / 4
        keep = scores <= scores[k] + width + ELIM_TOL
        vs = VersionSpace.from_indices(est.ids[keep], len(inst.hclass))
        if not vs:
            raise EmptyVersionSpaceError(f"version space emptied at iteration {i}")
        trace.update(erm=int(est.ids[k]), erm_score=float(scores[k]), threshold=float(scores[k] + width),
                     survivors=vs.indices.tolist())
        traces.append(trace)

    if len(vs) == 1 and cfg.stop_when_resolved:
        output = vs.representative
        if resolved_at is None:
            resolved_at = I + 1
    else:
        est, trace = _estimation_round(inst, oracles, vs, I + 1, I, cfg, d)
        scores = est.max_over_groups
        output = int(est.ids[int(np.argmin(scores))])
        trace.update(erm=output, erm_score=float(scores.min()), final=True, survivors=vs.indices.tolist())
        traces.append(trace)

    report = RunReport(
        "agnostic", output, oracles.ledger,
        config={**asdict(cfg), "seed": seed, "d": d, "iterations": I},
        traces=traces,
    )
    report.diagnostics["resolved_at"] = resolved_at
    attach_truth(report, inst)
    _annotate_traces(report, inst)
    report.runtime_ms = (time.perf_counter() - t0) * 1e3
    return report


def _annotate_traces(report: RunReport, inst):
    optimal = set(report.diagnostics["optimal_ids"])
    losses = max_loss_vector(inst).astype(np.float64)
    nu = report.nu
    for tr in report.traces:
        surv = tr["survivors"]
        tr["hstar_survived"] = optimal <= set(surv)
        tr["max_survivor_excess"] = float(max(losses[surv]) - nu)


def check_lemma_invariants(traces, inst, hstar, eps: float) -> list[dict]:
    """Per elimination round: did every optimal hypothesis survive, and is every
    survivor of round i within 2^(I-i) eps of the optimum (exact losses)?

    ``hstar`` is an id or an iterable of tied optimal ids.
    """
    optimal = {int(hstar)} if np.isscalar(hstar) else {int(h) for h in hstar}
    losses = max_loss_vector(inst).astype(np.float64)
    nu = min(losses[h] for h in optimal)
    I = n_iterations(eps)
    out = []
    for tr in traces:
        if tr.get("final"):
            continue
        i = tr["iter"]
        surv = tr["survivors"]
        bound = 2.0 ** (I - i) * eps
        worst = float(max(losses[surv]) - nu)
        out.append({
            "iter": i,
            "hstar_survived": optimal <= set(surv),
            "max_excess": worst,
            "bound": bound,
            "excess_ok": worst <= bound + 1e-12,
        })
    return out
